#include "exp/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "core/gradcheck.hpp"

namespace synlab {

namespace fs = std::filesystem;

const std::vector<Arch> kAllArchs = {Arch::BiLstm, Arch::Constituency,
                                     Arch::Dependency, Arch::HeadLex};

namespace {

const std::vector<std::string> kSplits = {"train", "val", "test_hard",
                                          "ambig"};

std::string fmt_acc(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", a);
  return buf;
}

void write_report(const std::string& path, const std::vector<ReportRow>& rows,
                  const std::vector<std::string>& assertions) {
  {
    std::ofstream csv(path + ".csv");
    csv << "model,seed,split,n,accuracy\n";
    for (const ReportRow& r : rows) {
      csv << r.model << ',' << r.seed << ',' << r.split << ',' << r.n << ','
          << fmt_acc(r.accuracy) << '\n';
    }
  }
  std::ofstream txt(path + ".txt");
  txt << std::left << std::setw(14) << "model";
  for (const auto& s : kSplits) txt << std::setw(12) << s;
  txt << "\n";
  for (Arch a : kAllArchs) {
    txt << std::left << std::setw(14) << arch_str(a);
    for (const auto& s : kSplits) {
      double acc = 0.0;
      for (const ReportRow& r : rows) {
        if (r.model == arch_str(a) && r.seed == "mean" && r.split == s) {
          acc = r.accuracy;
        }
      }
      txt << std::setw(12) << fmt_acc(acc);
    }
    txt << "\n";
  }
  txt << "\n";
  for (const auto& a : assertions) txt << a << "\n";
}

std::set<std::string> sentences_of(const std::vector<Example>& xs) {
  std::set<std::string> out;
  for (const Example& e : xs) out.insert(e.sentence());
  return out;
}

struct Exp1Data {
  std::vector<Example> train, val, test_hard, ambig;
};

Exp1Data make_exp1_data(const ExpConfig& cfg) {
  Grammar g = load_builtin_grammar(Variant::Test);
  Exp1Data d;
  // TRAIN/VAL follow the grammar's natural distribution, which is dominated
  // by simple sentences but contains a few percent attractor sentences --
  // without those, every model converges on the "nearest noun before the
  // verb" shortcut (perfectly consistent with attractor-free data) and
  // inverts on TEST-HARD.
  GenConstraints train_c;
  train_c.balance = true;
  train_c.pp_rate = 1.0 / 3.0;  // the grammar's documented PP-presence rate
  d.train = gen_corpus(g, cfg.train_n, cfg.data_seed, train_c);

  GenConstraints val_c = train_c;
  val_c.exclude = sentences_of(d.train);
  d.val = gen_corpus(g, cfg.val_n, cfg.data_seed + 1, val_c);

  GenConstraints hard_c;
  hard_c.min_attractors = 1;
  hard_c.balance = true;
  hard_c.exclude = val_c.exclude;
  for (const Example& e : d.val) hard_c.exclude.insert(e.sentence());
  d.test_hard = gen_corpus(g, cfg.test_n, cfg.data_seed + 2, hard_c);

  GenConstraints ambig_c;
  ambig_c.minimal_ambiguous = true;
  ambig_c.balance = true;
  ambig_c.exclude = hard_c.exclude;
  for (const Example& e : d.test_hard) ambig_c.exclude.insert(e.sentence());
  d.ambig = gen_corpus(g, cfg.ambig_n, cfg.data_seed + 3, ambig_c);
  return d;
}

const std::vector<Example>& split_of(const Exp1Data& d, const std::string& s) {
  if (s == "train") return d.train;
  if (s == "val") return d.val;
  if (s == "test_hard") return d.test_hard;
  return d.ambig;
}

uint64_t run_seed(Arch arch, uint64_t seed) {
  uint64_t ai = 0;
  for (size_t i = 0; i < kAllArchs.size(); ++i) {
    if (kAllArchs[i] == arch) ai = i;
  }
  return seed * 16 + ai;
}

std::string ckpt_path(const std::string& outdir, Arch arch, uint64_t seed,
                      bool finetuned = false) {
  return outdir + "/ckpt_" + arch_str(arch) + "_" + std::to_string(seed) +
         (finetuned ? "_ft" : "") + ".json";
}

void append_means(std::vector<ReportRow>& rows, size_t n_seeds) {
  std::vector<ReportRow> means;
  for (Arch a : kAllArchs) {
    for (const auto& s : kSplits) {
      double acc = 0.0;
      long n = 0;
      size_t count = 0;
      for (const ReportRow& r : rows) {
        if (r.model == arch_str(a) && r.split == s && r.seed != "mean") {
          acc += r.accuracy;
          n = r.n;
          ++count;
        }
      }
      if (count == n_seeds) {
        means.push_back({arch_str(a), "mean", s, n, acc / n_seeds});
      }
    }
  }
  rows.insert(rows.end(), means.begin(), means.end());
}

void check(ExpResult& res, bool ok, const std::string& what) {
  res.assertions.push_back(std::string(ok ? "PASS " : "FAIL ") + what);
  if (!ok) res.pass = false;
}

}  // namespace

double ExpResult::mean(const std::string& model,
                       const std::string& split) const {
  for (const ReportRow& r : rows) {
    if (r.model == model && r.seed == "mean" && r.split == split) {
      return r.accuracy;
    }
  }
  throw std::runtime_error("no mean row for " + model + "/" + split);
}

ExpResult run_exp1(const std::string& outdir, const ExpConfig& cfg) {
  fs::create_directories(outdir);
  Exp1Data data = make_exp1_data(cfg);
  write_corpus(outdir + "/train.jsonl", data.train);
  write_corpus(outdir + "/val.jsonl", data.val);
  write_corpus(outdir + "/test_hard.jsonl", data.test_hard);
  write_corpus(outdir + "/ambig.jsonl", data.ambig);

  Vocab vocab = builtin_vocab();
  ExpResult res;
  for (Arch arch : kAllArchs) {
    for (uint64_t seed : cfg.seeds) {
      ModelSpec spec{arch, cfg.d_emb, cfg.d_h};
      Checkpoint init = init_checkpoint(spec, vocab, run_seed(arch, seed),
                                        cfg.train_cfg.embeddings_trainable);
      TrainResult tr = train(std::move(init), data.train, data.val,
                             cfg.train_cfg, run_seed(arch, seed) + 1);
      save_checkpoint(ckpt_path(outdir, arch, seed), tr.best);
      for (const auto& s : kSplits) {
        EvalResult ev = evaluate(tr.best, split_of(data, s));
        res.rows.push_back(
            {arch_str(arch), std::to_string(seed), s, ev.n, ev.accuracy});
      }
    }
  }
  append_means(res.rows, cfg.seeds.size());

  double const_hard = res.mean("constituency", "test_hard");
  double head_hard = res.mean("headlex", "test_hard");
  double dep_hard = res.mean("dependency", "test_hard");
  double dep_ambig = res.mean("dependency", "ambig");
  check(res, const_hard >= 0.90,
        "constituency mean accuracy >= 90% on TEST-HARD (" +
            fmt_acc(const_hard) + ")");
  check(res, head_hard >= 0.90,
        "headlex mean accuracy >= 90% on TEST-HARD (" + fmt_acc(head_hard) +
            ")");
  check(res, dep_ambig >= 0.40 && dep_ambig <= 0.60,
        "dependency mean accuracy on AMBIG in [40%, 60%] (" +
            fmt_acc(dep_ambig) + ")");
  check(res, const_hard > dep_hard,
        "constituency > dependency on TEST-HARD (" + fmt_acc(const_hard) +
            " vs " + fmt_acc(dep_hard) + ")");

  write_report(outdir + "/exp1_report", res.rows, res.assertions);
  return res;
}

ExpResult run_exp2(const std::string& outdir, const ExpConfig& cfg) {
  fs::create_directories(outdir);
  bool have_exp1 = fs::exists(outdir + "/exp1_report.csv");
  for (Arch arch : kAllArchs) {
    for (uint64_t seed : cfg.seeds) {
      have_exp1 = have_exp1 && fs::exists(ckpt_path(outdir, arch, seed));
    }
  }
  ExpResult exp1;
  if (!have_exp1) {
    exp1 = run_exp1(outdir, cfg);
  }

  std::vector<Example> test_hard = read_corpus(outdir + "/test_hard.jsonl");
  std::vector<Example> ambig = read_corpus(outdir + "/ambig.jsonl");
  std::vector<Example> val = read_corpus(outdir + "/val.jsonl");
  std::vector<Example> train_set = read_corpus(outdir + "/train.jsonl");
  Exp1Data data{train_set, val, test_hard, ambig};

  // augmentation set disjoint from every evaluation set
  Grammar g = load_builtin_grammar(Variant::Augmentation);
  GenConstraints aug_c;
  aug_c.balance = true;
  // raw augmentation-variant probabilities rarely produce PPs (.04); the
  // documented one-third PP rate is what makes the set carry an agreement
  // signal (attractors) instead of just long adjective chains
  aug_c.pp_rate = 1.0 / 3.0;
  aug_c.exclude = sentences_of(test_hard);
  for (const Example& e : ambig) aug_c.exclude.insert(e.sentence());
  std::vector<Example> aug =
      gen_corpus(g, cfg.aug_n, cfg.data_seed + 4, aug_c);
  write_corpus(outdir + "/aug.jsonl", aug);

  ExpResult res;
  bool any_attractor = false;
  for (const Example& e : aug) any_attractor = any_attractor || e.attractors > 0;
  check(res, any_attractor, "augmentation set contains attractor sentences");

  std::vector<ReportRow> before_rows;
  for (Arch arch : kAllArchs) {
    for (uint64_t seed : cfg.seeds) {
      Checkpoint base = load_checkpoint(ckpt_path(outdir, arch, seed));
      FineTuneResult ft =
          fine_tune(base, aug, cfg.train_cfg, run_seed(arch, seed) + 2);
      save_checkpoint(ckpt_path(outdir, arch, seed, true), ft.ckpt);
      check(res, ft.updates == static_cast<long>(aug.size()),
            std::string(arch_str(arch)) + " seed " + std::to_string(seed) +
                ": exactly one epoch of " + std::to_string(aug.size()) +
                " updates");
      bool changed = false;
      for (const auto& [name, t] : base.params) {
        const Tensor& after = ft.ckpt.params.at(name);
        for (int i = 0; i < t.size() && !changed; ++i) {
          changed = t.v[i] != after.v[i];
        }
      }
      check(res, changed,
            std::string(arch_str(arch)) + " seed " + std::to_string(seed) +
                ": fine-tuned checkpoint differs from source");
      for (const auto& s : kSplits) {
        const auto& xs = split_of(data, s);
        EvalResult before = evaluate(base, xs);
        EvalResult after = evaluate(ft.ckpt, xs);
        before_rows.push_back(
            {arch_str(arch), std::to_string(seed), s, before.n,
             before.accuracy});
        res.rows.push_back({arch_str(arch), std::to_string(seed), s, after.n,
                            after.accuracy});
      }
    }
  }
  append_means(res.rows, cfg.seeds.size());
  append_means(before_rows, cfg.seeds.size());

  ExpResult before;
  before.rows = before_rows;
  double dep_ambig_after = res.mean("dependency", "ambig");
  check(res, dep_ambig_after >= 0.40 && dep_ambig_after <= 0.60,
        "dependency mean accuracy on AMBIG stays in [40%, 60%] (" +
            fmt_acc(dep_ambig_after) + ")");
  for (const char* m : {"constituency", "headlex"}) {
    double drop = before.mean(m, "test_hard") - res.mean(m, "test_hard");
    check(res, drop <= 0.02,
          std::string(m) + " TEST-HARD accuracy drop <= 2 points (" +
              fmt_acc(drop) + ")");
  }

  // combined CSV: before/after/delta per row
  {
    std::ofstream csv(outdir + "/exp2_report.csv");
    csv << "model,seed,split,n,accuracy_before,accuracy_after,delta\n";
    for (size_t i = 0; i < res.rows.size(); ++i) {
      const ReportRow& a = res.rows[i];
      const ReportRow& b = before.rows[i];
      csv << a.model << ',' << a.seed << ',' << a.split << ',' << a.n << ','
          << fmt_acc(b.accuracy) << ',' << fmt_acc(a.accuracy) << ','
          << fmt_acc(a.accuracy - b.accuracy) << '\n';
    }
  }
  {
    std::ofstream txt(outdir + "/exp2_report.txt");
    txt << std::left << std::setw(14) << "model";
    for (const auto& s : kSplits) txt << std::setw(22) << (s + " before/after");
    txt << "\n";
    for (Arch a : kAllArchs) {
      txt << std::left << std::setw(14) << arch_str(a);
      for (const auto& s : kSplits) {
        txt << std::setw(22)
            << (fmt_acc(before.mean(arch_str(a), s)) + " -> " +
                fmt_acc(res.mean(arch_str(a), s)));
      }
      txt << "\n";
    }
    txt << "\n";
    for (const auto& as : res.assertions) txt << as << "\n";
  }
  return res;
}

// fd_step 1e-4 balances truncation against cancellation for losses of
// order 1: central differences truncate at ~step^2 while the subtraction
// loses ~eps/step of absolute precision.
double gradcheck_arch(Arch arch, int d_h, int n_examples, uint64_t seed,
                      double fd_step) {
  Grammar g = load_builtin_grammar(Variant::Test);
  Vocab vocab = builtin_vocab();
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n_examples; ++i) {
    Derivation d = sample_derivation(g, rng);
    while (d.tokens.size() > 11) d = sample_derivation(g, rng);
    Example e = make_example(d);
    ModelSpec spec{arch, d_h, d_h};
    Checkpoint ckpt = init_checkpoint(spec, vocab, rng());
    LossFn loss = [&](const ParamBundle& p, Gradient* grad) {
      Checkpoint c = ckpt;
      c.params = p;
      Tape tape;
      int prob = build_prob(tape, c, e);
      int l = tape.bce(prob, static_cast<double>(e.label));
      if (grad) {
        tape.backward(l);
        *grad = tape.grads();
      }
      return tape.value(l).v[0];
    };
    worst = std::max(worst, grad_check(loss, ckpt.params, fd_step));
  }
  return worst;
}

}  // namespace synlab
