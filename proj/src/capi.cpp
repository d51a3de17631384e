#include "synlab.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "exp/experiments.hpp"

using namespace synlab;

struct synlab_corpus {
  std::vector<Example> examples;
};

struct synlab_model {
  Checkpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

synlab_status fail(synlab_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
synlab_status guarded(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    return fail(SYNLAB_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SYNLAB_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<uint64_t> parse_seeds(const char* csv) {
  if (!csv || !*csv) return {0, 1, 2};
  std::vector<uint64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  if (out.empty()) throw std::invalid_argument("empty seed list");
  return out;
}

// null-pointer guard: returns from the enclosing function on failure
#define SYNLAB_REQUIRE(p)                                              \
  do {                                                                 \
    if (!(p)) {                                                        \
      return fail(SYNLAB_ERR_INVALID_ARGUMENT, #p " must not be null"); \
    }                                                                  \
  } while (0)

TrainConfig to_cpp(const synlab_train_config* cfg) {
  TrainConfig tc;
  if (cfg) {
    tc.learning_rate = cfg->learning_rate;
    tc.max_epochs = cfg->max_epochs;
    tc.eval_every = cfg->eval_every;
    tc.early_stop_threshold = cfg->early_stop_threshold;
    tc.early_stop_window = cfg->early_stop_window;
    tc.embeddings_trainable = cfg->embeddings_trainable != 0;
  }
  return tc;
}

ExpConfig exp_config(const char* seeds_csv, int train_n, int d_h) {
  ExpConfig cfg;
  cfg.seeds = parse_seeds(seeds_csv);
  if (train_n > 0) cfg.train_n = train_n;
  if (d_h > 0) {
    cfg.d_h = d_h;
    cfg.d_emb = d_h;
  }
  return cfg;
}

}  // namespace

extern "C" {

const char* synlab_last_error(void) { return g_last_error.c_str(); }

void synlab_string_free(char* s) { std::free(s); }

void synlab_gen_options_default(synlab_gen_options* opts) {
  opts->min_attractors = -1;
  opts->max_attractors = -1;
  opts->exclude_path = nullptr;
  opts->balance = 0;
  opts->pp_rate = -1.0;
  opts->minimal_ambiguous = 0;
}

synlab_status synlab_corpus_generate(const char* variant, int n,
                                     unsigned long long seed,
                                     const synlab_gen_options* opts,
                                     synlab_corpus** out) {
  SYNLAB_REQUIRE(variant);
  SYNLAB_REQUIRE(out);
  return guarded([&]() -> synlab_status {
    Grammar g = load_builtin_grammar(variant_from_string(variant));
    GenConstraints c;
    if (opts) {
      if (opts->min_attractors >= 0) c.min_attractors = opts->min_attractors;
      if (opts->max_attractors >= 0) c.max_attractors = opts->max_attractors;
      if (opts->exclude_path) {
        for (const Example& e : read_corpus(opts->exclude_path)) {
          c.exclude.insert(e.sentence());
        }
      }
      c.balance = opts->balance != 0;
      if (opts->pp_rate >= 0.0) c.pp_rate = opts->pp_rate;
      c.minimal_ambiguous = opts->minimal_ambiguous != 0;
    }
    try {
      *out = new synlab_corpus{gen_corpus(g, n, seed, c)};
    } catch (const std::runtime_error& e) {
      return fail(SYNLAB_ERR_CONSTRAINT, e.what());
    }
    return SYNLAB_OK;
  });
}

synlab_status synlab_corpus_read(const char* path, synlab_corpus** out) {
  SYNLAB_REQUIRE(path);
  SYNLAB_REQUIRE(out);
  return guarded([&]() -> synlab_status {
    try {
      *out = new synlab_corpus{read_corpus(path)};
    } catch (const std::runtime_error& e) {
      return fail(SYNLAB_ERR_IO, e.what());
    }
    return SYNLAB_OK;
  });
}

synlab_status synlab_corpus_write(const synlab_corpus* c, const char* path) {
  SYNLAB_REQUIRE(c);
  SYNLAB_REQUIRE(path);
  return guarded([&]() -> synlab_status {
    try {
      write_corpus(path, c->examples);
    } catch (const std::runtime_error& e) {
      return fail(SYNLAB_ERR_IO, e.what());
    }
    return SYNLAB_OK;
  });
}

int synlab_corpus_size(const synlab_corpus* c) {
  return c ? static_cast<int>(c->examples.size()) : 0;
}

synlab_status synlab_corpus_stats_csv(const synlab_corpus* c, char** csv_out) {
  SYNLAB_REQUIRE(c);
  SYNLAB_REQUIRE(csv_out);
  return guarded([&]() -> synlab_status {
    *csv_out = dup_string(corpus_stats_csv(c->examples));
    return SYNLAB_OK;
  });
}

void synlab_corpus_free(synlab_corpus* c) { delete c; }

synlab_status synlab_model_create(const char* arch, int d_emb, int d_h,
                                  unsigned long long seed,
                                  synlab_model** out) {
  SYNLAB_REQUIRE(arch);
  SYNLAB_REQUIRE(out);
  return guarded([&]() -> synlab_status {
    if (d_emb < 1 || d_h < 1) {
      return fail(SYNLAB_ERR_INVALID_ARGUMENT, "d_emb and d_h must be >= 1");
    }
    ModelSpec spec{arch_from_string(arch), d_emb, d_h};
    *out = new synlab_model{init_checkpoint(spec, builtin_vocab(), seed)};
    return SYNLAB_OK;
  });
}

synlab_status synlab_model_load(const char* path, synlab_model** out) {
  SYNLAB_REQUIRE(path);
  SYNLAB_REQUIRE(out);
  return guarded([&]() -> synlab_status {
    try {
      *out = new synlab_model{load_checkpoint(path)};
    } catch (const std::runtime_error& e) {
      return fail(SYNLAB_ERR_IO, e.what());
    }
    return SYNLAB_OK;
  });
}

synlab_status synlab_model_save(const synlab_model* m, const char* path) {
  SYNLAB_REQUIRE(m);
  SYNLAB_REQUIRE(path);
  return guarded([&]() -> synlab_status {
    try {
      save_checkpoint(path, m->ckpt);
    } catch (const std::runtime_error& e) {
      return fail(SYNLAB_ERR_IO, e.what());
    }
    return SYNLAB_OK;
  });
}

void synlab_model_free(synlab_model* m) { delete m; }

void synlab_train_config_default(synlab_train_config* cfg) {
  TrainConfig d;
  cfg->learning_rate = d.learning_rate;
  cfg->max_epochs = d.max_epochs;
  cfg->eval_every = d.eval_every;
  cfg->early_stop_threshold = d.early_stop_threshold;
  cfg->early_stop_window = d.early_stop_window;
  cfg->embeddings_trainable = d.embeddings_trainable ? 1 : 0;
}

synlab_status synlab_train(synlab_model* m, const synlab_corpus* train_set,
                           const synlab_corpus* val_set,
                           const synlab_train_config* cfg,
                           unsigned long long seed, char** history_csv_out) {
  SYNLAB_REQUIRE(m);
  SYNLAB_REQUIRE(train_set);
  SYNLAB_REQUIRE(val_set);
  return guarded([&]() -> synlab_status {
    TrainResult tr = train(std::move(m->ckpt), train_set->examples,
                           val_set->examples, to_cpp(cfg), seed);
    m->ckpt = std::move(tr.best);
    if (history_csv_out) {
      std::ostringstream os;
      os << "sentences_seen,loss,accuracy\n";
      for (const EvalRecord& r : tr.history) {
        os << r.sentences_seen << ',' << r.loss << ',' << r.accuracy << '\n';
      }
      *history_csv_out = dup_string(os.str());
    }
    return SYNLAB_OK;
  });
}

synlab_status synlab_finetune(synlab_model* m, const synlab_corpus* aug,
                              const synlab_train_config* cfg,
                              unsigned long long seed) {
  SYNLAB_REQUIRE(m);
  SYNLAB_REQUIRE(aug);
  return guarded([&]() -> synlab_status {
    FineTuneResult ft =
        fine_tune(std::move(m->ckpt), aug->examples, to_cpp(cfg), seed);
    m->ckpt = std::move(ft.ckpt);
    return SYNLAB_OK;
  });
}

synlab_status synlab_eval_csv(const synlab_model* m, const synlab_corpus* c,
                              char** csv_out) {
  SYNLAB_REQUIRE(m);
  SYNLAB_REQUIRE(c);
  SYNLAB_REQUIRE(csv_out);
  return guarded([&]() -> synlab_status {
    auto split = split_by_attractors(c->examples);
    std::vector<Example> any = any_attractors(split);
    std::ostringstream os;
    os << "split,n,accuracy\n";
    auto row = [&](const std::string& name, const std::vector<Example>& xs) {
      EvalResult ev = evaluate(m->ckpt, xs);
      os << name << ',' << ev.n << ',' << ev.accuracy << '\n';
    };
    row("no", split.at("0"));
    row("any", any);
    row("1", split.at("1"));
    row("2", split.at("2"));
    row("3", split.at("3"));
    row("4+", split.at("4+"));
    row("constructed", c->examples);
    *csv_out = dup_string(os.str());
    return SYNLAB_OK;
  });
}

synlab_status synlab_gradcheck(const char* arch, int d_h, int n_examples,
                               unsigned long long seed, double* max_rel_err) {
  SYNLAB_REQUIRE(arch);
  SYNLAB_REQUIRE(max_rel_err);
  return guarded([&]() -> synlab_status {
    *max_rel_err =
        gradcheck_arch(arch_from_string(arch), d_h, n_examples, seed);
    return SYNLAB_OK;
  });
}

synlab_status synlab_exp1(const char* outdir, const char* seeds_csv,
                          int train_n, int d_h, int* pass) {
  SYNLAB_REQUIRE(outdir);
  return guarded([&]() -> synlab_status {
    ExpResult r = run_exp1(outdir, exp_config(seeds_csv, train_n, d_h));
    if (pass) *pass = r.pass ? 1 : 0;
    return SYNLAB_OK;
  });
}

synlab_status synlab_exp2(const char* outdir, const char* seeds_csv,
                          int train_n, int d_h, int* pass) {
  SYNLAB_REQUIRE(outdir);
  return guarded([&]() -> synlab_status {
    ExpResult r = run_exp2(outdir, exp_config(seeds_csv, train_n, d_h));
    if (pass) *pass = r.pass ? 1 : 0;
    return SYNLAB_OK;
  });
}

}  // extern "C"
