// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Runs both experiments end to end, so expect tens of minutes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "exp/experiments.hpp"
#include "grammar/grammar.hpp"
#include "models/models.hpp"
#include "train/train.hpp"

using namespace synlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Example clause(const std::string& subj, const std::string& obj) {
  Example e;
  e.tokens = {"the", subj, "hates", "the", obj};
  e.mask_index = 2;
  e.label = Label::Singular;
  e.const_tree = parse_tree("((0 1) (2 (3 4)))");
  e.dep_heads = {2, 3, 0, 5, 3};
  return e;
}

// 1. backward pass vs central finite differences, all four architectures
void criterion_gradients() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int examples = 0;
  for (Arch a : kAllArchs) {
    for (int dh : {2, 4}) {
      worst = std::max(worst, gradcheck_arch(a, dh, 3, 1000 + dh));
      examples += 3;
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << "gradient check, " << examples << " examples, max rel err " << worst
     << ", " << secs << "s";
  report(1, worst < 1e-4 && secs < 60.0, os.str());
}

// 2. child-sum dependency composition ignores subject/object order
void criterion_childsum_invariance() {
  Grammar g = load_builtin_grammar(Variant::Test);
  const auto& sg = g.lexicon.at(Sym::Noun_s);
  const auto& pl = g.lexicon.at(Sym::Noun_p);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    ModelSpec spec{Arch::Dependency, 6, 6};
    Checkpoint ckpt = init_checkpoint(spec, builtin_vocab(), rng());
    for (int pair = 0; pair < 20; ++pair) {
      const std::string& a = sg[rng() % sg.size()];
      const std::string& b = pl[rng() % pl.size()];
      double fwd = model_prob(ckpt, clause(a, b));
      double bwd = model_prob(ckpt, clause(b, a));
      worst = std::max(worst, std::fabs(fwd - bwd));
    }
  }
  std::ostringstream os;
  os << "dependency swap invariance, 100 draws x 20 pairs, max diff " << worst;
  report(2, worst <= 1e-9, os.str());
}

// 3. head-lexicalized model with zeroed internal inputs == constituency model
void criterion_headlex_reduction() {
  Grammar g = load_builtin_grammar(Variant::Test);
  std::mt19937_64 rng(31337);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Example e = make_example(sample_derivation(g, rng));
    ModelSpec spec{Arch::HeadLex, 5, 5};
    Checkpoint ckpt = init_checkpoint(spec, builtin_vocab(), rng());
    std::vector<int> ids = token_ids_for(ckpt.vocab, e.tokens);
    HeadLexTree hl = head_lexicalize(e.const_tree, e.dep_heads);
    Tape t1;
    int reduced = headlex_prob(t1, ckpt.params, ckpt.embeddings, ids, hl,
                               e.mask_index, /*zero_internal_inputs=*/true);
    Tape t2;
    int plain = constituency_prob(t2, ckpt.params, ckpt.embeddings, ids,
                                  e.const_tree, e.mask_index);
    worst = std::max(worst,
                     std::fabs(t1.value(reduced).v[0] - t2.value(plain).v[0]));
  }
  std::ostringstream os;
  os << "head-lex reduction over 100 trees, max diff " << worst;
  report(3, worst <= 1e-12, os.str());
}

// 4. the binary tree cell distinguishes child order
void criterion_binary_order_sensitivity() {
  Grammar g = load_builtin_grammar(Variant::Test);
  const auto& sg = g.lexicon.at(Sym::Noun_s);
  const auto& pl = g.lexicon.at(Sym::Noun_p);
  std::mt19937_64 rng(777);
  int sensitive = 0;
  for (int draw = 0; draw < 100; ++draw) {
    ModelSpec spec{Arch::Constituency, 6, 6};
    Checkpoint ckpt = init_checkpoint(spec, builtin_vocab(), rng());
    const std::string& a = sg[rng() % sg.size()];
    const std::string& b = pl[rng() % pl.size()];
    double fwd = model_prob(ckpt, clause(a, b));
    double bwd = model_prob(ckpt, clause(b, a));
    if (std::fabs(fwd - bwd) > 1e-12) ++sensitive;
  }
  std::ostringstream os;
  os << "constituency order sensitivity in " << sensitive << "/100 draws";
  report(4, sensitive >= 99, os.str());
}

// 5. grammar fidelity: production frequencies, label balance, attractors
void criterion_pcfg_fidelity() {
  bool ok = true;
  std::ostringstream os;
  for (Variant v : {Variant::Test, Variant::Augmentation}) {
    Grammar g = load_builtin_grammar(v);
    std::mt19937_64 rng(v == Variant::Test ? 555 : 556);
    std::vector<long> counts(g.productions.size(), 0);
    long sg_labels = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      Derivation d = sample_derivation(g, rng);
      for (size_t p = 0; p < counts.size(); ++p) {
        counts[p] += d.production_counts[p];
      }
      if (d.tokens[d.verb_index].tag == Sym::Verb_s) ++sg_labels;
    }
    double worst = 0.0;
    for (size_t p = 0; p < g.productions.size(); ++p) {
      long lhs_total = 0;
      for (int q : g.prods_for(g.productions[p].lhs)) lhs_total += counts[q];
      if (lhs_total == 0) {
        ok = false;
        continue;
      }
      double emp = static_cast<double>(counts[p]) / lhs_total;
      worst = std::max(worst, std::fabs(emp - g.productions[p].prob));
    }
    double balance = static_cast<double>(sg_labels) / n;
    ok = ok && worst <= 0.02 && std::fabs(balance - 0.5) <= 0.02;
    os << variant_str(v) << ": max prod dev " << worst << ", sg rate "
       << balance << "; ";
  }

  // attractor counter vs a direct token scan
  Grammar g = load_builtin_grammar(Variant::Test);
  std::mt19937_64 rng(999);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    Derivation d = sample_derivation(g, rng);
    Example e = make_example(d);
    bool subj_sg = d.tokens[d.subject_index].tag == Sym::Noun_s;
    int manual = 0;
    for (int t = d.subject_index + 1; t < d.verb_index; ++t) {
      Sym tag = d.tokens[t].tag;
      if (tag == Sym::Noun_s || tag == Sym::Noun_p) {
        bool noun_sg = tag == Sym::Noun_s;
        if (noun_sg != subj_sg) ++manual;
      }
    }
    if (manual != e.attractors) ++mismatches;
  }
  ok = ok && mismatches == 0;
  os << mismatches << "/1000 attractor mismatches";
  report(5, ok, os.str());
}

bool files_identical(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

int main_impl() {
  criterion_gradients();
  criterion_childsum_invariance();
  criterion_headlex_reduction();
  criterion_binary_order_sensitivity();
  criterion_pcfg_fidelity();

  ExpConfig cfg;  // defaults: seeds {0,1,2}, d_h 50, 8000 training sentences
  const std::string dir_a = "acceptance_run_a";
  const std::string dir_b = "acceptance_run_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  // 6. experiment 1: generalization across attractor splits
  auto t0 = std::chrono::steady_clock::now();
  ExpResult exp1 = run_exp1(dir_a, cfg);
  double exp1_secs = seconds_since(t0);
  {
    std::ostringstream os;
    os << "experiment 1 in " << exp1_secs << "s";
    for (const auto& a : exp1.assertions) os << "; " << a;
    report(6, exp1.pass && exp1_secs < 1800.0, os.str());
  }

  // 7. experiment 2: one-epoch fine-tuning on the augmentation variant
  ExpResult exp2 = run_exp2(dir_a, cfg);
  {
    std::ostringstream os;
    os << "experiment 2";
    for (const auto& a : exp2.assertions) os << "; " << a;
    report(7, exp2.pass, os.str());
  }

  // 8. byte-identical rerun of experiment 1
  run_exp1(dir_b, cfg);
  {
    bool same = true;
    std::string first_diff;
    std::vector<std::string> names = {"train.jsonl", "val.jsonl",
                                      "test_hard.jsonl", "ambig.jsonl",
                                      "exp1_report.csv", "exp1_report.txt"};
    for (Arch a : kAllArchs) {
      for (uint64_t s : cfg.seeds) {
        names.push_back("ckpt_" + std::string(arch_str(a)) + "_" +
                        std::to_string(s) + ".json");
      }
    }
    for (const std::string& n : names) {
      if (!files_identical(fs::path(dir_a) / n, fs::path(dir_b) / n)) {
        same = false;
        if (first_diff.empty()) first_diff = n;
      }
    }
    report(8, same,
           same ? "rerun is byte-identical (reports, corpora, checkpoints)"
                : "rerun differs, first at " + first_diff);
  }

  // 9. early-stopping rule on the pinned examples
  {
    auto hist = [](std::initializer_list<double> ls) {
      std::vector<EvalRecord> h;
      long seen = 0;
      for (double l : ls) h.push_back({seen += 1000, l, 0.0});
      return h;
    };
    bool flat = early_stop_check(hist({.5, .5, .5, .5, .5, .5}), 0.0005, 5);
    bool steady =
        early_stop_check(hist({.55, .54, .53, .52, .51, .50}), 0.0005, 5);
    bool noisy = early_stop_check(hist({.6, .58, .59, .585, .584, .5838}),
                                  0.0005, 5);
    report(9, flat && !steady && !noisy,
           "early stopping: flat stops, improving histories continue");
  }

  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "OK" : "FAILED",
              g_failures);
  return g_failures;
}

}  // namespace

int main() {
  try {
    return main_impl();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: uncaught exception: %s\n", e.what());
    return 100;
  }
}
