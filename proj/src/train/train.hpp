#pragma once

#include <cstdint>
#include <vector>

#include "models/models.hpp"

namespace synlab {

struct TrainConfig {
  double learning_rate = 0.001;
  int max_epochs = 50;
  int eval_every = 1000;  // sentences between validation evaluations
  double early_stop_threshold = 0.0005;
  int early_stop_window = 5;
  bool embeddings_trainable = false;
};

// -[y ln p + (1-y) ln(1-p)], with p clamped to [1e-12, 1-1e-12].
double bce_loss(double p, int y);

struct AdamState {
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard bias-corrected Adam update, one gradient entry at a time.
// Throws std::runtime_error naming the parameter on a non-finite gradient.
void adam_step(ParamBundle& params, const Gradient& grads, AdamState& state,
               double lr);

struct EvalRecord {
  long sentences_seen = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

// True iff the mean of the last `window` consecutive loss decreases is
// below the threshold. Needs at least window+1 records.
bool early_stop_check(const std::vector<EvalRecord>& history, double threshold,
                      int window);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
  long n = 0;
};

EvalResult evaluate(const Checkpoint& ckpt, const std::vector<Example>& xs);

struct TrainResult {
  Checkpoint best;
  std::vector<EvalRecord> history;
  long updates = 0;
};

// One update per example, per-epoch seeded reshuffle, periodic validation,
// minimum-validation-loss checkpointing, early stopping.
TrainResult train(Checkpoint init, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& cfg,
                  uint64_t seed);

// Exactly one pass with a fresh Adam state; no early stopping or
// checkpoint selection. Returns the post-epoch parameters and the number of
// updates performed.
struct FineTuneResult {
  Checkpoint ckpt;
  long updates = 0;
};
FineTuneResult fine_tune(Checkpoint ckpt, const std::vector<Example>& aug,
                         const TrainConfig& cfg, uint64_t seed);

}  // namespace synlab
