/* C API for the ctxeval toolkit: text-similarity metrics, BM25 retrieval,
 * margin-failure evaluation and the benchmark/report pipeline.
 *
 * Conventions:
 *   - functions return CTXEVAL_OK (0) or a nonzero status code;
 *   - ctxeval_last_error() describes the most recent failure on the
 *     calling thread;
 *   - strings and string lists handed out by the library are released
 *     with ctxeval_free_string / ctxeval_free_string_list;
 *   - handles are opaque and freed with their _destroy function.
 */
#ifndef CTXEVAL_H
#define CTXEVAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CTXEVAL_OK 0
#define CTXEVAL_ERR_INVALID 1   /* invalid argument or contract violation */
#define CTXEVAL_ERR_PARSE 2    /* malformed input file or record */
#define CTXEVAL_ERR_IO 3       /* file cannot be read or written */
#define CTXEVAL_ERR_NOT_FOUND 4 /* unknown id, metric or missing entry */
#define CTXEVAL_ERR_DOMAIN 5   /* mathematically undefined result */
#define CTXEVAL_ERR_INTERNAL 6

const char* ctxeval_version(void);

/* Message for the last failing call on this thread; empty string if none. */
const char* ctxeval_last_error(void);

void ctxeval_free_string(char* s);
void ctxeval_free_string_list(char** list, size_t len);

/* ------------------------------------------------------------------ */
/* Text primitives                                                     */
/* ------------------------------------------------------------------ */

/* Lowercase, collapse whitespace, mask digit runs as "#". */
int ctxeval_normalize(const char* text, char** out);

/* Normalized word tokens; punctuation split off and dropped. */
int ctxeval_tokenize(const char* text, char*** out_tokens, size_t* out_len);

/* Character-level edit distance. */
int ctxeval_levenshtein(const char* a, const char* b, size_t* out);

/* ------------------------------------------------------------------ */
/* Metrics                                                             */
/* ------------------------------------------------------------------ */

typedef struct {
    double precision;
    double recall;
    double f1;
} ctxeval_metric_score;

int ctxeval_rouge_n(const char* candidate, const char* reference, unsigned n,
                    ctxeval_metric_score* out);
int ctxeval_rouge_l(const char* candidate, const char* reference, ctxeval_metric_score* out);

/* Average squared extractive-fragment length (raw, unnormalized scale). */
int ctxeval_density(const char* candidate, const char* source, double* out);

/* Sample Pearson correlation; CTXEVAL_ERR_DOMAIN when undefined. */
int ctxeval_pearson(const double* x, const double* y, size_t len, double* out);

/* 1 iff phi_train > margin * phi_test (margin >= 1). */
int ctxeval_margin_failure(double phi_train, double phi_test, double margin, int* out);

/* ------------------------------------------------------------------ */
/* BM25 index                                                          */
/* ------------------------------------------------------------------ */

typedef struct ctxeval_index ctxeval_index;

/* Builds an index over n documents; ids must be unique, n >= 1.
 * Pass k1 <= 0 or b < 0 to use the defaults (1.2, 0.75). */
int ctxeval_index_create(const char* const* doc_ids, const char* const* texts, size_t n,
                         double k1, double b, ctxeval_index** out);
void ctxeval_index_destroy(ctxeval_index* index);

int ctxeval_index_score(const ctxeval_index* index, const char* query, const char* doc_id,
                        double* out);

/* Top k doc ids for the query, descending score, ties by ascending id,
 * skipping the excluded ids. */
int ctxeval_index_top_k(const ctxeval_index* index, const char* query, size_t k,
                        const char* const* exclude_ids, size_t n_exclude, char*** out_ids,
                        size_t* out_len);

/* ------------------------------------------------------------------ */
/* Pipeline commands (file level; mirrors the CLI)                     */
/* ------------------------------------------------------------------ */

#define CTXEVAL_MODE_NONE_NEG 0
#define CTXEVAL_MODE_HARD_NEG 1
#define CTXEVAL_MODE_RAND_NEG 2

#define CTXEVAL_TRANSFER_POS 0
#define CTXEVAL_TRANSFER_ALL 1

typedef struct {
    const char* corpus_path;
    const char* out_dir;
    int mode;             /* CTXEVAL_MODE_* */
    int variant;          /* CTXEVAL_TRANSFER_* */
    int n_neg;            /* negatives per example */
    int dedup_threshold;  /* drop pairs under this edit distance */
    uint64_t seed;
    double k1; /* <= 0 for default */
    double b;  /* < 0 for default */
} ctxeval_build_options;

/* Defaults: hard-neg, transfer-pos, 4 negatives, threshold 4, seed 17. */
void ctxeval_build_options_init(ctxeval_build_options* options);

/* Emits train.jsonl, dev.jsonl, test.jsonl and manifest.json. */
int ctxeval_build(const ctxeval_build_options* options);

typedef struct {
    const char* predictions_path;
    const char* test_path;
    const char* train_path; /* NULL unless a context-kind metric is used */
    const char* metrics;    /* comma-separated, e.g. "rouge-1,rouge-l,density" */
    const char* out_csv;
} ctxeval_score_options;

int ctxeval_score(const ctxeval_score_options* options);

/* Validates an externally produced score CSV against the table rules. */
int ctxeval_validate_scores(const char* csv_path);

typedef struct {
    const char* scores_path;      /* NULL to compute phi in-process */
    const char* predictions_path; /* required in-process or for filtering */
    const char* test_path;
    const char* train_path;
    const char* metric;
    double margin;
    int filter_candidates;   /* nonzero applies the ROUGE-1 filter */
    double filter_threshold; /* display scale, default 40 */
    const char* out_json;
    const char* out_table; /* optional; "-" writes to stdout */
} ctxeval_mfr_options;

void ctxeval_mfr_options_init(ctxeval_mfr_options* options);
int ctxeval_mfr(const ctxeval_mfr_options* options);

typedef struct {
    const char* scores_path;
    const char* metric;
    const char* labels_path;
    double m_min;
    double m_max;
    double step;
    const char* out_csv;
    const char* out_json;
} ctxeval_sweep_options;

void ctxeval_sweep_options_init(ctxeval_sweep_options* options);
int ctxeval_sweep(const ctxeval_sweep_options* options);

typedef struct {
    const char* scores_path;
    const char* labels_path;
    double margin;
    const char* out_csv;
} ctxeval_correlate_options;

void ctxeval_correlate_options_init(ctxeval_correlate_options* options);
int ctxeval_correlate(const ctxeval_correlate_options* options);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CTXEVAL_H */
