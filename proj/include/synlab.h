/* synlab — sentence-structure agreement laboratory.
 *
 * C API over the C++ core: PCFG corpus generation, the four sentence
 * encoders (bilstm, constituency, dependency, headlex), training,
 * evaluation, gradient checking, and the two canned experiments.
 *
 * All functions return SYNLAB_OK on success; on failure they return an
 * error code and synlab_last_error() describes the problem (thread-local).
 * Strings returned through char** are heap-allocated; release them with
 * synlab_string_free().
 */
#ifndef SYNLAB_H
#define SYNLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum synlab_status {
  SYNLAB_OK = 0,
  SYNLAB_ERR_INVALID_ARGUMENT = 1,
  SYNLAB_ERR_IO = 2,
  SYNLAB_ERR_CONSTRAINT = 3,
  SYNLAB_ERR_INTERNAL = 4,
} synlab_status;

const char* synlab_last_error(void);
void synlab_string_free(char* s);

typedef struct synlab_corpus synlab_corpus;
typedef struct synlab_model synlab_model;

/* ---- corpora ---------------------------------------------------------- */

typedef struct synlab_gen_options {
  int min_attractors;     /* -1 = unset */
  int max_attractors;     /* -1 = unset */
  const char* exclude_path; /* corpus file whose sentences are excluded; NULL = none */
  int balance;            /* 0/1 */
  double pp_rate;         /* target PP-presence rate; < 0 disables targeting */
  int minimal_ambiguous;  /* 0/1: 5-token clauses with disagreeing nouns */
} synlab_gen_options;

void synlab_gen_options_default(synlab_gen_options* opts);

/* variant is "test" or "augmentation". */
synlab_status synlab_corpus_generate(const char* variant, int n,
                                     unsigned long long seed,
                                     const synlab_gen_options* opts,
                                     synlab_corpus** out);
synlab_status synlab_corpus_read(const char* path, synlab_corpus** out);
synlab_status synlab_corpus_write(const synlab_corpus* c, const char* path);
int synlab_corpus_size(const synlab_corpus* c);
/* CSV: label balance, attractor histogram, PP rate, length histogram. */
synlab_status synlab_corpus_stats_csv(const synlab_corpus* c, char** csv_out);
void synlab_corpus_free(synlab_corpus* c);

/* ---- models ----------------------------------------------------------- */

/* arch is "bilstm", "constituency", "dependency" or "headlex". */
synlab_status synlab_model_create(const char* arch, int d_emb, int d_h,
                                  unsigned long long seed,
                                  synlab_model** out);
synlab_status synlab_model_load(const char* path, synlab_model** out);
synlab_status synlab_model_save(const synlab_model* m, const char* path);
void synlab_model_free(synlab_model* m);

/* ---- training and evaluation ------------------------------------------ */

typedef struct synlab_train_config {
  double learning_rate;       /* default 0.001 */
  int max_epochs;             /* default 50 */
  int eval_every;             /* sentences between validation evals; default 1000 */
  double early_stop_threshold;/* default 0.0005 */
  int early_stop_window;      /* default 5 */
  int embeddings_trainable;   /* default 0 */
} synlab_train_config;

void synlab_train_config_default(synlab_train_config* cfg);

/* Trains in place (keeps the best-validation-loss weights). history_csv_out
 * (optional) receives "sentences_seen,loss,accuracy" rows. */
synlab_status synlab_train(synlab_model* m, const synlab_corpus* train_set,
                           const synlab_corpus* val_set,
                           const synlab_train_config* cfg,
                           unsigned long long seed, char** history_csv_out);

/* Exactly one epoch with a fresh optimizer state. */
synlab_status synlab_finetune(synlab_model* m, const synlab_corpus* aug,
                              const synlab_train_config* cfg,
                              unsigned long long seed);

/* CSV rows per attractor split in Table-3 row order
 * (no, any, 1, 2, 3, 4+, constructed), where "constructed" is the whole
 * corpus. */
synlab_status synlab_eval_csv(const synlab_model* m, const synlab_corpus* c,
                              char** csv_out);

/* Max relative error of backward vs central finite differences. */
synlab_status synlab_gradcheck(const char* arch, int d_h, int n_examples,
                               unsigned long long seed, double* max_rel_err);

/* ---- experiments ------------------------------------------------------ */

/* seeds_csv: comma-separated seed list, e.g. "0,1,2"; NULL = "0,1,2".
 * train_n <= 0 and d_h <= 0 select the defaults (8000 / 50).
 * *pass is set to 1 iff every experiment assertion held. */
synlab_status synlab_exp1(const char* outdir, const char* seeds_csv,
                          int train_n, int d_h, int* pass);
synlab_status synlab_exp2(const char* outdir, const char* seeds_csv,
                          int train_n, int d_h, int* pass);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SYNLAB_H */
