#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "core/tensor.hpp"
#include "treebank/corpus.hpp"

namespace synlab {

enum class Arch { BiLstm, Constituency, Dependency, HeadLex };

Arch arch_from_string(const std::string& s);
const char* arch_str(Arch a);

struct ModelSpec {
  Arch arch = Arch::BiLstm;
  int d_emb = 50;
  int d_h = 50;
};

// All weights uniform in [-0.1, 0.1], seeded.
ParamBundle init_params(const ModelSpec& spec, std::mt19937_64& rng);
EmbeddingTable init_embeddings(int vocab_size, int dim, std::mt19937_64& rng,
                               bool trainable = false);

struct Checkpoint {
  ModelSpec spec;
  Vocab vocab;
  ParamBundle params;
  EmbeddingTable embeddings;
};

Checkpoint init_checkpoint(const ModelSpec& spec, const Vocab& vocab,
                           uint64_t seed, bool emb_trainable = false);

// Versioned JSON checkpoint; doubles round-trip exactly.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace synlab
