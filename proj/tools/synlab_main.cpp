// synlab command-line frontend. Links only the C API.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "synlab.h"

namespace {

int die(synlab_status st) {
  std::fprintf(stderr, "error: %s\n", synlab_last_error());
  return st == SYNLAB_OK ? 1 : static_cast<int>(st);
}

void print_and_free(char* s) {
  std::fputs(s, stdout);
  synlab_string_free(s);
}

struct CorpusGuard {
  synlab_corpus* c = nullptr;
  ~CorpusGuard() { synlab_corpus_free(c); }
};
struct ModelGuard {
  synlab_model* m = nullptr;
  ~ModelGuard() { synlab_model_free(m); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synlab: masked-verb number prediction with sequential and "
               "tree-structured encoders over PCFG-generated corpora"};
  app.require_subcommand(1);

  // gen ------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a corpus");
  std::string variant = "test", out_path, exclude_path;
  int n = 0;
  unsigned long long seed = 0;
  int min_attr = -1, max_attr = -1;
  bool balance = false, ambig = false;
  double pp_rate = -1.0;
  gen->add_option("--variant", variant, "test | augmentation");
  gen->add_option("--n", n, "number of sentences")->required()
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("--out", out_path, "output corpus path")->required();
  gen->add_option("--min-attractors", min_attr);
  gen->add_option("--max-attractors", max_attr);
  gen->add_option("--exclude", exclude_path,
                  "corpus whose sentences must not reappear");
  gen->add_flag("--balance", balance, "exact label balance");
  gen->add_option("--pp-rate", pp_rate, "target PP-presence rate");
  gen->add_flag("--ambig", ambig,
                "minimal transitive clauses with disagreeing nouns");

  // train ------------------------------------------------------------------
  auto* train = app.add_subcommand("train", "train a model");
  std::string arch = "bilstm", train_path, val_path, ckpt_out;
  int d_emb = 50, d_h = 50;
  synlab_train_config tc;
  synlab_train_config_default(&tc);
  train->add_option("--arch", arch,
                    "bilstm | constituency | dependency | headlex");
  train->add_option("--train", train_path)->required();
  train->add_option("--val", val_path)->required();
  train->add_option("--out", ckpt_out, "checkpoint path")->required();
  train->add_option("--seed", seed);
  train->add_option("--d-emb", d_emb);
  train->add_option("--d-h", d_h);
  train->add_option("--lr", tc.learning_rate);
  train->add_option("--max-epochs", tc.max_epochs);
  train->add_option("--eval-every", tc.eval_every);
  train->add_option("--early-stop-threshold", tc.early_stop_threshold);
  train->add_option("--early-stop-window", tc.early_stop_window);
  train->add_flag("--train-embeddings", tc.embeddings_trainable);

  // eval ------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string model_path, corpus_path;
  eval->add_option("--model", model_path)->required();
  eval->add_option("--corpus", corpus_path)->required();

  // finetune ----------------------------------------------------------------
  auto* finetune =
      app.add_subcommand("finetune", "one-epoch fine-tuning on a corpus");
  finetune->add_option("--model", model_path)->required();
  finetune->add_option("--corpus", corpus_path)->required();
  finetune->add_option("--out", ckpt_out)->required();
  finetune->add_option("--seed", seed);
  finetune->add_option("--lr", tc.learning_rate);

  // gradcheck ---------------------------------------------------------------
  auto* gradcheck = app.add_subcommand(
      "gradcheck", "finite-difference check of all four architectures");
  int gc_dh = 4, gc_n = 5;
  gradcheck->add_option("--d-h", gc_dh);
  gradcheck->add_option("--n", gc_n, "examples per architecture");
  gradcheck->add_option("--seed", seed);

  // stats -------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "corpus statistics as CSV");
  stats->add_option("--corpus", corpus_path)->required();

  // experiments ---------------------------------------------------------------
  std::string outdir, seeds_csv = "0,1,2";
  int exp_train_n = -1, exp_dh = -1;
  auto* exp1 = app.add_subcommand("exp1", "train all four models and assert "
                                          "the generalization pattern");
  exp1->add_option("--outdir", outdir)->required()->envname("SYNLAB_OUT");
  exp1->add_option("--seeds", seeds_csv, "comma-separated seeds");
  exp1->add_option("--train-n", exp_train_n);
  exp1->add_option("--d-h", exp_dh);
  auto* exp2 = app.add_subcommand("exp2", "fine-tune the exp1 checkpoints on "
                                          "an augmentation set");
  exp2->add_option("--outdir", outdir)->required()->envname("SYNLAB_OUT");
  exp2->add_option("--seeds", seeds_csv, "comma-separated seeds");
  exp2->add_option("--train-n", exp_train_n);
  exp2->add_option("--d-h", exp_dh);

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    synlab_gen_options opts;
    synlab_gen_options_default(&opts);
    opts.min_attractors = min_attr;
    opts.max_attractors = max_attr;
    if (!exclude_path.empty()) opts.exclude_path = exclude_path.c_str();
    opts.balance = balance ? 1 : 0;
    opts.pp_rate = pp_rate;
    opts.minimal_ambiguous = ambig ? 1 : 0;
    CorpusGuard corpus;
    synlab_status st =
        synlab_corpus_generate(variant.c_str(), n, seed, &opts, &corpus.c);
    if (st != SYNLAB_OK) return die(st);
    st = synlab_corpus_write(corpus.c, out_path.c_str());
    if (st != SYNLAB_OK) return die(st);
    char* csv = nullptr;
    if (synlab_corpus_stats_csv(corpus.c, &csv) == SYNLAB_OK) {
      print_and_free(csv);
    }
    return 0;
  }

  if (train->parsed()) {
    CorpusGuard tr, va;
    ModelGuard m;
    if (synlab_corpus_read(train_path.c_str(), &tr.c) != SYNLAB_OK ||
        synlab_corpus_read(val_path.c_str(), &va.c) != SYNLAB_OK ||
        synlab_model_create(arch.c_str(), d_emb, d_h, seed, &m.m) !=
            SYNLAB_OK) {
      return die(SYNLAB_ERR_IO);
    }
    char* history = nullptr;
    synlab_status st = synlab_train(m.m, tr.c, va.c, &tc, seed, &history);
    if (st != SYNLAB_OK) return die(st);
    print_and_free(history);
    st = synlab_model_save(m.m, ckpt_out.c_str());
    if (st != SYNLAB_OK) return die(st);
    return 0;
  }

  if (eval->parsed()) {
    ModelGuard m;
    CorpusGuard c;
    if (synlab_model_load(model_path.c_str(), &m.m) != SYNLAB_OK ||
        synlab_corpus_read(corpus_path.c_str(), &c.c) != SYNLAB_OK) {
      return die(SYNLAB_ERR_IO);
    }
    char* csv = nullptr;
    synlab_status st = synlab_eval_csv(m.m, c.c, &csv);
    if (st != SYNLAB_OK) return die(st);
    print_and_free(csv);
    return 0;
  }

  if (finetune->parsed()) {
    ModelGuard m;
    CorpusGuard c;
    if (synlab_model_load(model_path.c_str(), &m.m) != SYNLAB_OK ||
        synlab_corpus_read(corpus_path.c_str(), &c.c) != SYNLAB_OK) {
      return die(SYNLAB_ERR_IO);
    }
    synlab_status st = synlab_finetune(m.m, c.c, &tc, seed);
    if (st != SYNLAB_OK) return die(st);
    st = synlab_model_save(m.m, ckpt_out.c_str());
    if (st != SYNLAB_OK) return die(st);
    return 0;
  }

  if (gradcheck->parsed()) {
    double worst = 0.0;
    bool ok = true;
    for (const char* a :
         {"bilstm", "constituency", "dependency", "headlex"}) {
      double err = 0.0;
      synlab_status st = synlab_gradcheck(a, gc_dh, gc_n, seed, &err);
      if (st != SYNLAB_OK) return die(st);
      std::printf("%s,%.3e\n", a, err);
      worst = err > worst ? err : worst;
      ok = ok && err < 1e-4;
    }
    std::printf("max,%.3e\n", worst);
    return ok ? 0 : 1;
  }

  if (stats->parsed()) {
    CorpusGuard c;
    synlab_status st = synlab_corpus_read(corpus_path.c_str(), &c.c);
    if (st != SYNLAB_OK) return die(st);
    char* csv = nullptr;
    st = synlab_corpus_stats_csv(c.c, &csv);
    if (st != SYNLAB_OK) return die(st);
    print_and_free(csv);
    return 0;
  }

  if (exp1->parsed() || exp2->parsed()) {
    int pass = 0;
    synlab_status st =
        exp1->parsed()
            ? synlab_exp1(outdir.c_str(), seeds_csv.c_str(), exp_train_n,
                          exp_dh, &pass)
            : synlab_exp2(outdir.c_str(), seeds_csv.c_str(), exp_train_n,
                          exp_dh, &pass);
    if (st != SYNLAB_OK) return die(st);
    std::printf("report written to %s; assertions %s\n", outdir.c_str(),
                pass ? "passed" : "FAILED");
    return pass ? 0 : 1;
  }

  return 0;
}
