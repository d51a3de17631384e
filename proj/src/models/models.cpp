#include "models/models.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace synlab {

namespace {

const char* kGates[4] = {"i", "f", "o", "u"};

int classifier(Tape& tape, const ParamBundle& p, int h) {
  int w = tape.param("cls.w", p.at("cls.w"));
  int b = tape.param("cls.b", p.at("cls.b"));
  return tape.sigmoid(tape.affine(w, h, b));
}

}  // namespace

SeqCellRefs register_seq_cell(Tape& tape, const ParamBundle& p,
                              const std::string& prefix) {
  SeqCellRefs r;
  for (int g = 0; g < 4; ++g) {
    r.W[g] = tape.param(prefix + ".W_" + kGates[g],
                        p.at(prefix + ".W_" + kGates[g]));
    r.U[g] = tape.param(prefix + ".U_" + kGates[g],
                        p.at(prefix + ".U_" + kGates[g]));
    r.b[g] = tape.param(prefix + ".b_" + kGates[g],
                        p.at(prefix + ".b_" + kGates[g]));
  }
  return r;
}

BinaryCellRefs register_binary_cell(Tape& tape, const ParamBundle& p) {
  BinaryCellRefs r;
  for (int g = 0; g < 4; ++g) {
    r.W[g] = tape.param(std::string("W_") + kGates[g],
                        p.at(std::string("W_") + kGates[g]));
    r.b[g] = tape.param(std::string("b_") + kGates[g],
                        p.at(std::string("b_") + kGates[g]));
  }
  for (int l = 0; l < 2; ++l) {
    std::string suf = "_" + std::to_string(l + 1);
    r.U_i[l] = tape.param("U_i" + suf, p.at("U_i" + suf));
    r.U_o[l] = tape.param("U_o" + suf, p.at("U_o" + suf));
    r.U_u[l] = tape.param("U_u" + suf, p.at("U_u" + suf));
  }
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      std::string name =
          "U_f_" + std::to_string(k + 1) + std::to_string(l + 1);
      r.U_f[k][l] = tape.param(name, p.at(name));
    }
  }
  return r;
}

ChildSumCellRefs register_childsum_cell(Tape& tape, const ParamBundle& p) {
  ChildSumCellRefs r;
  for (int g = 0; g < 4; ++g) {
    r.W[g] = tape.param(std::string("W_") + kGates[g],
                        p.at(std::string("W_") + kGates[g]));
    r.U[g] = tape.param(std::string("U_") + kGates[g],
                        p.at(std::string("U_") + kGates[g]));
    r.b[g] = tape.param(std::string("b_") + kGates[g],
                        p.at(std::string("b_") + kGates[g]));
  }
  return r;
}

HC lstm_cell(Tape& tape, const SeqCellRefs& r, int x, int h_prev, int c_prev) {
  int dh = tape.value(r.b[0]).rows;
  int zero = tape.input(Tensor::zeros(dh));
  auto gate = [&](int g) {
    return tape.add(tape.affine(r.W[g], x, r.b[g]),
                    tape.affine(r.U[g], h_prev, zero));
  };
  int i = tape.sigmoid(gate(0));
  int f = tape.sigmoid(gate(1));
  int o = tape.sigmoid(gate(2));
  int u = tape.tanh_op(gate(3));
  int c = tape.add(tape.hadamard(i, u), tape.hadamard(f, c_prev));
  int h = tape.hadamard(o, tape.tanh_op(c));
  return {h, c};
}

HC binary_tree_cell(Tape& tape, const BinaryCellRefs& r, int x, HC left,
                    HC right) {
  int dh = tape.value(r.b[0]).rows;
  int zero = tape.input(Tensor::zeros(dh));
  int hl[2] = {left.h, right.h};
  auto gate = [&](int W, int b, int U1, int U2) {
    int pre = tape.affine(W, x, b);
    pre = tape.add(pre, tape.affine(U1, hl[0], zero));
    pre = tape.add(pre, tape.affine(U2, hl[1], zero));
    return pre;
  };
  int i = tape.sigmoid(gate(r.W[0], r.b[0], r.U_i[0], r.U_i[1]));
  int f1 = tape.sigmoid(gate(r.W[1], r.b[1], r.U_f[0][0], r.U_f[0][1]));
  int f2 = tape.sigmoid(gate(r.W[1], r.b[1], r.U_f[1][0], r.U_f[1][1]));
  int o = tape.sigmoid(gate(r.W[2], r.b[2], r.U_o[0], r.U_o[1]));
  int u = tape.tanh_op(gate(r.W[3], r.b[3], r.U_u[0], r.U_u[1]));
  int c = tape.sum({tape.hadamard(i, u), tape.hadamard(f1, left.c),
                    tape.hadamard(f2, right.c)});
  int h = tape.hadamard(o, tape.tanh_op(c));
  return {h, c};
}

HC childsum_cell(Tape& tape, const ChildSumCellRefs& r, int x,
                 const std::vector<HC>& children) {
  int dh = tape.value(r.b[0]).rows;
  int zero = tape.input(Tensor::zeros(dh));
  int h_tilde;
  if (children.empty()) {
    h_tilde = zero;
  } else {
    std::vector<int> hs;
    hs.reserve(children.size());
    for (const HC& ch : children) hs.push_back(ch.h);
    h_tilde = tape.sum(hs);
  }
  auto gate = [&](int g, int h) {
    return tape.add(tape.affine(r.W[g], x, r.b[g]),
                    tape.affine(r.U[g], h, zero));
  };
  int i = tape.sigmoid(gate(0, h_tilde));
  int o = tape.sigmoid(gate(2, h_tilde));
  int u = tape.tanh_op(gate(3, h_tilde));
  std::vector<int> cell_terms = {tape.hadamard(i, u)};
  for (const HC& ch : children) {
    int fk = tape.sigmoid(gate(1, ch.h));  // per-child forget from its own h
    cell_terms.push_back(tape.hadamard(fk, ch.c));
  }
  int c = tape.sum(cell_terms);
  int h = tape.hadamard(o, tape.tanh_op(c));
  return {h, c};
}

namespace {

int embed(Tape& tape, const EmbeddingTable& emb,
          const std::vector<int>& token_ids, int mask_index, int pos) {
  int id = pos == mask_index ? Vocab::kMask : token_ids[pos];
  return tape.emb_row(emb, id);
}

}  // namespace

int bilstm_prob(Tape& tape, const ParamBundle& p, const EmbeddingTable& emb,
                const std::vector<int>& token_ids, int mask_index) {
  int n = static_cast<int>(token_ids.size());
  if (n < 1) throw std::invalid_argument("bilstm: empty sequence");
  if (mask_index < 0 || mask_index >= n) {
    throw std::invalid_argument("bilstm: mask_index out of range");
  }
  int dh = p.at("cls.w").cols / 2;
  SeqCellRefs fwd = register_seq_cell(tape, p, "fwd");
  SeqCellRefs bwd = register_seq_cell(tape, p, "bwd");

  std::vector<int> xs(n);
  for (int t = 0; t < n; ++t) xs[t] = embed(tape, emb, token_ids, mask_index, t);

  int zero = tape.input(Tensor::zeros(dh));
  HC state = {zero, zero};
  int h_fwd_mask = -1;
  for (int t = 0; t < n; ++t) {
    state = lstm_cell(tape, fwd, xs[t], state.h, state.c);
    if (t == mask_index) h_fwd_mask = state.h;
  }
  state = {zero, zero};
  int h_bwd_mask = -1;
  for (int t = n - 1; t >= 0; --t) {
    state = lstm_cell(tape, bwd, xs[t], state.h, state.c);
    if (t == mask_index) h_bwd_mask = state.h;
  }
  return classifier(tape, p, tape.concat(h_fwd_mask, h_bwd_mask));
}

int constituency_prob(Tape& tape, const ParamBundle& p,
                      const EmbeddingTable& emb,
                      const std::vector<int>& token_ids, const ConstTree& tree,
                      int mask_index) {
  validate_tree(tree, static_cast<int>(token_ids.size()));
  BinaryCellRefs r = register_binary_cell(tape, p);
  int dh = tape.value(r.b[0]).rows;
  int zero_h = tape.input(Tensor::zeros(dh));
  int zero_x = tape.input(Tensor::zeros(emb.dim()));
  HC zero = {zero_h, zero_h};
  std::function<HC(int)> rec = [&](int id) -> HC {
    const ConstTree::Node& n = tree.nodes[id];
    if (n.leaf >= 0) {
      int x = embed(tape, emb, token_ids, mask_index, n.leaf);
      return binary_tree_cell(tape, r, x, zero, zero);
    }
    HC left = rec(n.left);
    HC right = rec(n.right);
    return binary_tree_cell(tape, r, zero_x, left, right);
  };
  HC root = rec(tree.root);
  return classifier(tape, p, root.h);
}

int dependency_prob(Tape& tape, const ParamBundle& p,
                    const EmbeddingTable& emb,
                    const std::vector<int>& token_ids,
                    const std::vector<int>& heads, int mask_index) {
  int n = static_cast<int>(token_ids.size());
  validate_heads(heads);
  int root = -1;
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i) {
    if (heads[i] == 0) {
      root = i;
    } else {
      children[heads[i] - 1].push_back(i);
    }
  }
  if (root != mask_index) {
    throw std::invalid_argument(
        "dependency: root must equal mask_index (masked verb)");
  }
  ChildSumCellRefs r = register_childsum_cell(tape, p);
  // children already ascend by token index (canonical summation order)
  std::function<HC(int)> rec = [&](int tok) -> HC {
    std::vector<HC> kids;
    kids.reserve(children[tok].size());
    for (int c : children[tok]) kids.push_back(rec(c));
    int x = embed(tape, emb, token_ids, mask_index, tok);
    return childsum_cell(tape, r, x, kids);
  };
  HC top = rec(root);
  return classifier(tape, p, top.h);
}

int headlex_prob(Tape& tape, const ParamBundle& p, const EmbeddingTable& emb,
                 const std::vector<int>& token_ids, const HeadLexTree& hl,
                 int mask_index, bool zero_internal_inputs) {
  validate_tree(hl.tree, static_cast<int>(token_ids.size()));
  BinaryCellRefs r = register_binary_cell(tape, p);
  int dh = tape.value(r.b[0]).rows;
  int zero_h = tape.input(Tensor::zeros(dh));
  int zero_x = tape.input(Tensor::zeros(emb.dim()));
  HC zero = {zero_h, zero_h};
  std::function<HC(int)> rec = [&](int id) -> HC {
    const ConstTree::Node& n = hl.tree.nodes[id];
    if (n.leaf >= 0) {
      int x = embed(tape, emb, token_ids, mask_index, n.leaf);
      return binary_tree_cell(tape, r, x, zero, zero);
    }
    HC left = rec(n.left);
    HC right = rec(n.right);
    // the node's input is its head token's embedding (*MASK* when the head
    // is the masked verb, at every such node)
    int x = zero_internal_inputs
                ? zero_x
                : embed(tape, emb, token_ids, mask_index, hl.head[id]);
    return binary_tree_cell(tape, r, x, left, right);
  };
  HC root = rec(hl.tree.root);
  return classifier(tape, p, root.h);
}

std::vector<int> token_ids_for(const Vocab& vocab,
                               const std::vector<std::string>& tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(vocab.id(t));
  return ids;
}

int build_prob(Tape& tape, const Checkpoint& ckpt, const Example& e) {
  std::vector<int> ids = token_ids_for(ckpt.vocab, e.tokens);
  switch (ckpt.spec.arch) {
    case Arch::BiLstm:
      return bilstm_prob(tape, ckpt.params, ckpt.embeddings, ids,
                         e.mask_index);
    case Arch::Constituency:
      return constituency_prob(tape, ckpt.params, ckpt.embeddings, ids,
                               e.const_tree, e.mask_index);
    case Arch::Dependency:
      return dependency_prob(tape, ckpt.params, ckpt.embeddings, ids,
                             e.dep_heads, e.mask_index);
    case Arch::HeadLex: {
      HeadLexTree hl = head_lexicalize(e.const_tree, e.dep_heads);
      return headlex_prob(tape, ckpt.params, ckpt.embeddings, ids, hl,
                          e.mask_index);
    }
  }
  throw std::logic_error("build_prob: unknown architecture");
}

double model_prob(const Checkpoint& ckpt, const Example& e) {
  Tape tape;
  int prob = build_prob(tape, ckpt, e);
  return tape.value(prob).v[0];
}

}  // namespace synlab
