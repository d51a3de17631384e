#pragma once

#include <vector>

#include "core/tape.hpp"
#include "models/params.hpp"
#include "treebank/example.hpp"

namespace synlab {

struct HC {
  int h;
  int c;
};

// Gate parameter node ids for one LSTM-style cell, registered on a tape.
struct SeqCellRefs {
  int W[4], U[4], b[4];  // i, f, o, u
};
struct BinaryCellRefs {
  int W[4], b[4];        // i, f, o, u
  int U_i[2], U_o[2], U_u[2];
  int U_f[2][2];         // U_f[k][l]
};
struct ChildSumCellRefs {
  int W[4], U[4], b[4];  // i, f, o, u
};

SeqCellRefs register_seq_cell(Tape& tape, const ParamBundle& p,
                              const std::string& prefix);
BinaryCellRefs register_binary_cell(Tape& tape, const ParamBundle& p);
ChildSumCellRefs register_childsum_cell(Tape& tape, const ParamBundle& p);

// Standard LSTM cell: i,f,o = sigmoid(Wx + Uh + b), u = tanh(...),
// c = i*u + f*c_prev, h = o*tanh(c).
HC lstm_cell(Tape& tape, const SeqCellRefs& r, int x, int h_prev, int c_prev);

// Binary tree cell with per-position recurrences and four forget matrices.
HC binary_tree_cell(Tape& tape, const BinaryCellRefs& r, int x, HC left,
                    HC right);

// Child-sum cell; children may be empty. The summation order is the order
// given (callers pass children in ascending token order).
HC childsum_cell(Tape& tape, const ChildSumCellRefs& r, int x,
                 const std::vector<HC>& children);

// Each builder returns the node id of the scalar probability that the
// masked verb is SINGULAR. Token ids are vocab ids; the *MASK* embedding is
// substituted at mask_index.
int bilstm_prob(Tape& tape, const ParamBundle& p, const EmbeddingTable& emb,
                const std::vector<int>& token_ids, int mask_index);
int constituency_prob(Tape& tape, const ParamBundle& p,
                      const EmbeddingTable& emb,
                      const std::vector<int>& token_ids, const ConstTree& tree,
                      int mask_index);
int dependency_prob(Tape& tape, const ParamBundle& p,
                    const EmbeddingTable& emb,
                    const std::vector<int>& token_ids,
                    const std::vector<int>& heads, int mask_index);
// zero_internal_inputs reduces the model to the plain constituency one.
int headlex_prob(Tape& tape, const ParamBundle& p, const EmbeddingTable& emb,
                 const std::vector<int>& token_ids, const HeadLexTree& hl,
                 int mask_index, bool zero_internal_inputs = false);

// Dispatch on the checkpoint's architecture; builds the graph on `tape`.
int build_prob(Tape& tape, const Checkpoint& ckpt, const Example& e);

// Convenience: evaluate the probability on a private tape.
double model_prob(const Checkpoint& ckpt, const Example& e);

inline Label predict(double prob) {
  // exactly 0.5 predicts PLURAL
  return prob > 0.5 ? Label::Singular : Label::Plural;
}

std::vector<int> token_ids_for(const Vocab& vocab,
                               const std::vector<std::string>& tokens);

}  // namespace synlab
