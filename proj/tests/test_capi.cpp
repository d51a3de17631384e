#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include <synlab.h>

namespace {

std::string tmp(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct CorpusGuard {
  synlab_corpus* c = nullptr;
  ~CorpusGuard() { synlab_corpus_free(c); }
};
struct ModelGuard {
  synlab_model* m = nullptr;
  ~ModelGuard() { synlab_model_free(m); }
};
struct StrGuard {
  char* s = nullptr;
  ~StrGuard() { synlab_string_free(s); }
};

synlab_corpus* gen(int n, unsigned long long seed,
                   const synlab_gen_options* opts = nullptr) {
  synlab_corpus* c = nullptr;
  REQUIRE(synlab_corpus_generate("test", n, seed, opts, &c) == SYNLAB_OK);
  REQUIRE(c != nullptr);
  return c;
}

}  // namespace

TEST_CASE("generate, write, read, stats") {
  CorpusGuard g{gen(30, 1)};
  CHECK(synlab_corpus_size(g.c) == 30);

  std::string path = tmp("synlab_capi_corpus.jsonl");
  CHECK(synlab_corpus_write(g.c, path.c_str()) == SYNLAB_OK);
  CorpusGuard r;
  CHECK(synlab_corpus_read(path.c_str(), &r.c) == SYNLAB_OK);
  CHECK(synlab_corpus_size(r.c) == 30);

  StrGuard csv;
  CHECK(synlab_corpus_stats_csv(r.c, &csv.s) == SYNLAB_OK);
  REQUIRE(csv.s != nullptr);
  CHECK(std::strstr(csv.s, "label") != nullptr);
  std::filesystem::remove(path);
}

TEST_CASE("generation options are honored") {
  synlab_gen_options opts;
  synlab_gen_options_default(&opts);
  CHECK(opts.min_attractors == -1);
  CHECK(opts.max_attractors == -1);
  opts.minimal_ambiguous = 1;
  CorpusGuard g;
  CHECK(synlab_corpus_generate("test", 5, 3, &opts, &g.c) == SYNLAB_OK);
  CHECK(synlab_corpus_size(g.c) == 5);
}

TEST_CASE("bad generation arguments set the error string") {
  synlab_corpus* c = nullptr;
  CHECK(synlab_corpus_generate("nope", 5, 1, nullptr, &c) != SYNLAB_OK);
  CHECK(c == nullptr);
  CHECK(std::strlen(synlab_last_error()) > 0);

  CHECK(synlab_corpus_generate("test", 0, 1, nullptr, &c) != SYNLAB_OK);
  CHECK(synlab_corpus_read("/nonexistent/dir/x.jsonl", &c) != SYNLAB_OK);
}

TEST_CASE("model create, save, load round trip") {
  ModelGuard m;
  REQUIRE(synlab_model_create("constituency", 4, 4, 7, &m.m) == SYNLAB_OK);
  std::string path = tmp("synlab_capi_model.json");
  CHECK(synlab_model_save(m.m, path.c_str()) == SYNLAB_OK);
  ModelGuard m2;
  CHECK(synlab_model_load(path.c_str(), &m2.m) == SYNLAB_OK);

  CorpusGuard g{gen(10, 9)};
  StrGuard e1, e2;
  CHECK(synlab_eval_csv(m.m, g.c, &e1.s) == SYNLAB_OK);
  CHECK(synlab_eval_csv(m2.m, g.c, &e2.s) == SYNLAB_OK);
  CHECK(std::string(e1.s) == e2.s);
  std::filesystem::remove(path);

  ModelGuard bad;
  CHECK(synlab_model_create("transformer", 4, 4, 7, &bad.m) != SYNLAB_OK);
  CHECK(synlab_model_load("/nonexistent/m.json", &bad.m) != SYNLAB_OK);
}

TEST_CASE("train, evaluate and finetune through the C API") {
  ModelGuard m;
  REQUIRE(synlab_model_create("dependency", 4, 4, 11, &m.m) == SYNLAB_OK);
  CorpusGuard tr{gen(12, 13)}, val{gen(4, 15)}, aug{gen(6, 17)};

  synlab_train_config cfg;
  synlab_train_config_default(&cfg);
  CHECK(cfg.learning_rate == 0.001);
  CHECK(cfg.early_stop_window == 5);
  cfg.max_epochs = 1;
  cfg.eval_every = 6;

  StrGuard hist;
  CHECK(synlab_train(m.m, tr.c, val.c, &cfg, 19, &hist.s) == SYNLAB_OK);
  REQUIRE(hist.s != nullptr);
  CHECK(std::strstr(hist.s, ",") != nullptr);

  StrGuard eval;
  CHECK(synlab_eval_csv(m.m, val.c, &eval.s) == SYNLAB_OK);
  CHECK(std::strstr(eval.s, "constructed") != nullptr);

  CHECK(synlab_finetune(m.m, aug.c, &cfg, 21) == SYNLAB_OK);
}

TEST_CASE("gradient check through the C API") {
  double err = 1.0;
  CHECK(synlab_gradcheck("bilstm", 2, 2, 23, &err) == SYNLAB_OK);
  CHECK(err < 1e-4);
  CHECK(synlab_gradcheck("nope", 2, 2, 23, &err) != SYNLAB_OK);
}

TEST_CASE("null arguments are rejected, not crashed on") {
  CHECK(synlab_corpus_generate("test", 5, 1, nullptr, nullptr) != SYNLAB_OK);
  CHECK(synlab_corpus_write(nullptr, "x") != SYNLAB_OK);
  CHECK(synlab_eval_csv(nullptr, nullptr, nullptr) != SYNLAB_OK);
  CHECK(synlab_train(nullptr, nullptr, nullptr, nullptr, 0, nullptr) !=
        SYNLAB_OK);
  synlab_string_free(nullptr);
  synlab_corpus_free(nullptr);
  synlab_model_free(nullptr);
}
