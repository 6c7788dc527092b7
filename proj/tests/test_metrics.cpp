#include <doctest.h>

#include <cmath>
#include <random>

#include "ctxeval/error.hpp"
#include "ctxeval/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace ctxeval;

TEST_CASE("rouge_n worked examples") {
    const Tokens same{"the", "quick", "fox"};
    CHECK(rouge_n(same, same, 1).f1 == doctest::Approx(1.0));

    CHECK(rouge_n({"a", "b"}, {"c", "d"}, 1).f1 == 0.0);

    const auto score = rouge_n({"a", "b"}, {"a", "c"}, 1);
    CHECK(score.precision == doctest::Approx(0.5));
    CHECK(score.recall == doctest::Approx(0.5));
    CHECK(score.f1 == doctest::Approx(0.5));
}

TEST_CASE("rouge_n clips repeated n-grams and handles empties") {
    const auto clipped = rouge_n({"a", "a", "a"}, {"a"}, 1);
    CHECK(clipped.precision == doctest::Approx(1.0 / 3.0));
    CHECK(clipped.recall == doctest::Approx(1.0));

    const auto empty = rouge_n({}, {"a"}, 1);
    CHECK(empty.precision == 0.0);
    CHECK(empty.recall == 0.0);
    CHECK(empty.f1 == 0.0);
    CHECK(rouge_n({}, {}, 2).f1 == 0.0);
    CHECK_THROWS_AS(rouge_n({"a"}, {"a"}, 0), Error);
}

TEST_CASE("rouge f1 is symmetric under swapping the sides") {
    std::mt19937 rng(7201);
    for (int round = 0; round < 300; ++round) {
        const auto a = testutil::random_tokens(rng, 8);
        const auto b = testutil::random_tokens(rng, 8);
        for (int n = 1; n <= 2; ++n) {
            const auto ab = rouge_n(a, b, n);
            const auto ba = rouge_n(b, a, n);
            CHECK(ab.precision == doctest::Approx(ba.recall).epsilon(1e-12));
            CHECK(ab.recall == doctest::Approx(ba.precision).epsilon(1e-12));
            CHECK(ab.f1 == doctest::Approx(ba.f1).epsilon(1e-12));
        }
        const auto lab = rouge_l(a, b);
        const auto lba = rouge_l(b, a);
        CHECK(lab.precision == doctest::Approx(lba.recall).epsilon(1e-12));
        CHECK(lab.f1 == doctest::Approx(lba.f1).epsilon(1e-12));
    }
}

TEST_CASE("rouge_l worked examples") {
    const Tokens x{"u", "v", "w"};
    CHECK(rouge_l(x, x).f1 == doctest::Approx(1.0));

    const auto score = rouge_l({"a", "b", "c", "d"}, {"a", "c", "d"});
    CHECK(score.precision == doctest::Approx(0.75));
    CHECK(score.recall == doctest::Approx(1.0));
    CHECK(score.f1 == doctest::Approx(6.0 / 7.0));

    const auto empty = rouge_l({}, {"a"});
    CHECK(empty.precision == 0.0);
    CHECK(empty.recall == 0.0);
    CHECK(empty.f1 == 0.0);
}

TEST_CASE("rouge_l matches the exhaustive-subsequence oracle") {
    std::mt19937 rng(7202);
    for (int round = 0; round < 300; ++round) {
        const auto cand = testutil::random_tokens(rng, 10);
        const auto ref = testutil::random_tokens(rng, 10);
        const auto fast = rouge_l(cand, ref);
        const auto brute = oracles::rouge_l_enumerate(cand, ref);
        CHECK(fast.precision == doctest::Approx(brute.precision).epsilon(1e-12));
        CHECK(fast.recall == doctest::Approx(brute.recall).epsilon(1e-12));
        CHECK(fast.f1 == doctest::Approx(brute.f1).epsilon(1e-12));
    }
}

TEST_CASE("density worked examples") {
    // verbatim contiguous span
    const Tokens span{"x", "y", "z"};
    const Tokens source{"a", "x", "y", "z", "b"};
    CHECK(density(span, source) == doctest::Approx(3.0));

    CHECK(density({"p", "q"}, {"r", "s"}) == 0.0);

    CHECK(density({"a", "b", "c", "d"}, {"a", "b", "x", "c", "d"}) == doctest::Approx(2.0));
    CHECK(density({}, source) == 0.0);
}

TEST_CASE("density is bounded by candidate length, equality iff one span") {
    std::mt19937 rng(7203);
    for (int round = 0; round < 400; ++round) {
        const auto cand = testutil::random_tokens(rng, 8);
        const auto source = testutil::random_tokens(rng, 12);
        const double d = density(cand, source);
        CHECK(d >= 0.0);
        CHECK(d <= static_cast<double>(cand.size()) + 1e-12);
        CHECK(d == doctest::Approx(oracles::density_search(cand, source)).epsilon(1e-12));
    }
    // one contiguous span hits the bound; a split match stays below it
    CHECK(density({"a", "b"}, {"a", "b"}) == doctest::Approx(2.0));
    CHECK(density({"a", "b"}, {"a", "z", "b"}) == doctest::Approx(1.0));
}

TEST_CASE("max_over_refs") {
    const MetricFn first_token_value = [](const Tokens&, const Tokens& ref) {
        return ref.front() == "hi" ? 0.7 : 0.3;
    };
    const Tokens cand{"c"};
    CHECK(max_over_refs(first_token_value, cand, {{"hi"}}) == doctest::Approx(0.7));
    CHECK(max_over_refs(first_token_value, cand, {{"lo"}, {"hi"}}) == doctest::Approx(0.7));
    CHECK(max_over_refs(first_token_value, cand, {{"hi"}, {"lo"}}) == doctest::Approx(0.7));
    CHECK_THROWS_AS(max_over_refs(first_token_value, cand, {}), Error);

    // identity dominates with rouge-l
    const MetricFn rl = builtin_metric("rouge-l");
    const Tokens self{"one", "two", "three"};
    CHECK(max_over_refs(rl, self, {self, {"unrelated"}}) == doctest::Approx(1.0));
}

TEST_CASE("max_over_refs is invariant under reference permutation") {
    std::mt19937 rng(7204);
    const MetricFn r1 = builtin_metric("rouge-1");
    for (int round = 0; round < 200; ++round) {
        const auto cand = testutil::random_tokens(rng, 6);
        std::vector<Tokens> refs;
        const int n_refs = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int i = 0; i < n_refs; ++i) refs.push_back(testutil::random_tokens(rng, 6));
        const double base = max_over_refs(r1, cand, refs);
        std::shuffle(refs.begin(), refs.end(), rng);
        CHECK(max_over_refs(r1, cand, refs) == doctest::Approx(base).epsilon(1e-15));
    }
}

TEST_CASE("pearson worked examples") {
    const std::vector<double> x{1, 2, 3}, y{2, 4, 6};
    CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> a{0.5, 1.5, -2.0, 0.25}, na{-0.5, -1.5, 2.0, -0.25};
    CHECK(pearson(a, na) == doctest::Approx(-1.0).epsilon(1e-12));

    const std::vector<double> p{1, 0, 1, 0}, q{1, 0, 0, 0};
    CHECK(pearson(p, q) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("pearson rejects undefined inputs") {
    const std::vector<double> x{1, 2, 3}, short_y{1, 2};
    CHECK_THROWS_AS(pearson(x, short_y), Error);
    const std::vector<double> one_x{1.0}, one_y{2.0};
    CHECK_THROWS_AS(pearson(one_x, one_y), Error);
    const std::vector<double> constant{1, 1, 1};
    CHECK_THROWS_WITH_AS(pearson(constant, x), doctest::Contains("undefined"), Error);
    const std::vector<double> with_nan{1, std::nan(""), 3};
    CHECK_THROWS_AS(pearson(with_nan, x), Error);
}

TEST_CASE("pearson symmetry and affine invariance") {
    std::mt19937 rng(7205);
    std::uniform_real_distribution<double> value(-3.0, 3.0);
    for (int round = 0; round < 200; ++round) {
        const int n = std::uniform_int_distribution<int>(3, 20)(rng);
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = value(rng);
            y[i] = value(rng);
        }
        const double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));

        double a = value(rng);
        if (std::abs(a) < 0.1) a = 0.5;
        const double b = value(rng);
        std::vector<double> ax(n);
        for (int i = 0; i < n; ++i) ax[i] = a * x[i] + b;
        const double expected = a > 0 ? r : -r;
        CHECK(pearson(ax, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("builtin metric registry") {
    CHECK(is_builtin_metric("rouge-1"));
    CHECK(is_builtin_metric("density"));
    CHECK(!is_builtin_metric("bert-score"));
    CHECK(builtin_metric_default_kind("rouge-l") == MetricKind::answers);
    CHECK(builtin_metric_default_kind("density") == MetricKind::contexts);
    CHECK_THROWS_AS(builtin_metric("nope"), Error);

    // density is stored rescaled by candidate length
    const MetricFn d = builtin_metric("density");
    CHECK(d({"a", "b", "c", "d"}, {"a", "b", "x", "c", "d"}) == doctest::Approx(0.5));
    CHECK(d({}, {"a"}) == 0.0);
}
