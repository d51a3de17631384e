#include "train/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace synlab {

double bce_loss(double p, int y) {
  double pc = std::min(1.0 - 1e-12, std::max(1e-12, p));
  return -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
}

void adam_step(ParamBundle& params, const Gradient& grads, AdamState& state,
               double lr) {
  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, state.t);
  double bc2 = 1.0 - std::pow(state.beta2, state.t);
  for (const auto& [name, g] : grads) {
    auto pit = params.find(name);
    if (pit == params.end()) {
      throw std::runtime_error("adam_step: unknown parameter " + name);
    }
    Tensor& p = pit->second;
    if (!g.same_shape(p)) {
      throw std::runtime_error("adam_step: gradient shape mismatch for " +
                               name);
    }
    Tensor& m = state.m[name];
    Tensor& v = state.v[name];
    if (m.size() == 0) m = Tensor(p.rows, p.cols);
    if (v.size() == 0) v = Tensor(p.rows, p.cols);
    for (int i = 0; i < p.size(); ++i) {
      double gi = g.v[i];
      if (!std::isfinite(gi)) {
        throw std::runtime_error("adam_step: non-finite gradient in " + name +
                                 "[" + std::to_string(i) + "]");
      }
      m.v[i] = state.beta1 * m.v[i] + (1.0 - state.beta1) * gi;
      v.v[i] = state.beta2 * v.v[i] + (1.0 - state.beta2) * gi * gi;
      double mhat = m.v[i] / bc1;
      double vhat = v.v[i] / bc2;
      p.v[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

bool early_stop_check(const std::vector<EvalRecord>& history, double threshold,
                      int window) {
  if (static_cast<int>(history.size()) < window + 1) return false;
  size_t last = history.size() - 1;
  double mean_decrease =
      (history[last - window].loss - history[last].loss) / window;
  return mean_decrease < threshold;
}

EvalResult evaluate(const Checkpoint& ckpt, const std::vector<Example>& xs) {
  EvalResult r;
  r.n = static_cast<long>(xs.size());
  long correct = 0;
  for (const Example& e : xs) {
    double p = model_prob(ckpt, e);
    r.loss += bce_loss(p, static_cast<int>(e.label));
    if (predict(p) == e.label) ++correct;
  }
  if (r.n > 0) {
    r.loss /= r.n;
    r.accuracy = static_cast<double>(correct) / r.n;
  }
  return r;
}

namespace {

// One example, one update.
void update_once(Checkpoint& ckpt, const Example& e, AdamState& state,
                 double lr) {
  Tape tape;
  int prob = build_prob(tape, ckpt, e);
  int loss = tape.bce(prob, static_cast<double>(e.label));
  tape.backward(loss);
  Gradient g = tape.grads();
  // split out the embedding update when embeddings are trainable
  auto eit = g.find("embedding");
  if (eit != g.end()) {
    Gradient eg;
    eg["embedding"] = std::move(eit->second);
    g.erase(eit);
    ParamBundle ep;
    ep["embedding"] = std::move(ckpt.embeddings.weights);
    adam_step(ep, eg, state, lr);
    state.t -= 1;  // the main step below advances the counter
    ckpt.embeddings.weights = std::move(ep["embedding"]);
  }
  adam_step(ckpt.params, g, state, lr);
}

}  // namespace

TrainResult train(Checkpoint init, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& cfg,
                  uint64_t seed) {
  if (train_set.empty() || val_set.empty()) {
    throw std::invalid_argument("train: train and val must be non-empty");
  }
  TrainResult out;
  Checkpoint current = std::move(init);
  AdamState state;
  double best_loss = std::numeric_limits<double>::infinity();
  out.best = current;
  long sentences_seen = 0;

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (epoch + 1));
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t idx : order) {
      update_once(current, train_set[idx], state, cfg.learning_rate);
      ++out.updates;
      ++sentences_seen;
      if (sentences_seen % cfg.eval_every == 0) {
        EvalResult ev = evaluate(current, val_set);
        out.history.push_back({sentences_seen, ev.loss, ev.accuracy});
        if (ev.loss < best_loss) {
          best_loss = ev.loss;
          out.best = current;
        }
        if (early_stop_check(out.history, cfg.early_stop_threshold,
                             cfg.early_stop_window)) {
          return out;
        }
      }
    }
  }
  if (out.history.empty()) {
    // corpus smaller than one evaluation interval: evaluate once at the end
    EvalResult ev = evaluate(current, val_set);
    out.history.push_back({sentences_seen, ev.loss, ev.accuracy});
    if (ev.loss < best_loss) out.best = current;
  }
  return out;
}

FineTuneResult fine_tune(Checkpoint ckpt, const std::vector<Example>& aug,
                         const TrainConfig& cfg, uint64_t seed) {
  if (aug.empty()) {
    throw std::invalid_argument("fine_tune: augmentation set is empty");
  }
  AdamState state;  // fresh optimizer state
  std::vector<size_t> order(aug.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FineTuneResult out;
  for (size_t idx : order) {
    update_once(ckpt, aug[idx], state, cfg.learning_rate);
    ++out.updates;
  }
  out.ckpt = std::move(ckpt);
  return out;
}

}  // namespace synlab
