#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ctxeval {

std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory and renames into
/// place, so a failing run never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest round-trip decimal representation.
std::string fmt_double(double value);

/// Compact display form (%g), for grid values like sweep margins.
std::string fmt_double_compact(double value);

/// Fixed two decimals on the 0-100 display scale.
std::string fmt_display_score(double unit_scale_value);

/// Splits one CSV line into fields; supports RFC-4180 style quoting.
std::vector<std::string> split_csv_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view value);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace ctxeval
