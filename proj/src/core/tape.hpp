#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "core/tensor.hpp"

namespace synlab {

// Define-by-run reverse-mode autodiff over column vectors and parameter
// matrices. Values are computed eagerly at node construction; node ids are
// therefore already in topological order for the backward sweep.
class Tape {
 public:
  enum class Op {
    Input,     // constant leaf, no gradient
    Param,     // named parameter leaf (points at an external Tensor)
    EmbRow,    // one row of an embedding table
    Affine,    // W*x + b
    Sigmoid,
    Tanh,
    Hadamard,
    Add,
    Sum,       // n-ary vector sum, fixed canonical order
    Concat,    // [a; b]
    Bce,       // scalar binary cross entropy against a fixed 0/1 target
  };

  // Leaves.
  int input(Tensor value);
  int param(const std::string& name, const Tensor& value);
  int emb_row(const EmbeddingTable& table, int row);

  // Ops. All shape mismatches throw std::invalid_argument naming both shapes.
  int affine(int w, int x, int b);
  int sigmoid(int x);
  int tanh_op(int x);
  int hadamard(int a, int b);
  int add(int a, int b);
  int sum(const std::vector<int>& xs);
  int concat(int a, int b);
  int bce(int p, double target);

  const Tensor& value(int id) const {
    const Node& n = nodes_[id];
    return n.ext ? *n.ext : n.val;
  }
  const Tensor& adjoint(int id) const { return nodes_[id].adj; }

  // Reverse sweep from a scalar root. Throws std::invalid_argument if the
  // root is not scalar-valued.
  void backward(int root);

  // Collect parameter adjoints after backward(). Embedding rows accumulate
  // into a single "embedding" entry (only when the table is trainable).
  Gradient grads() const;

  size_t size() const { return nodes_.size(); }
  void reset();

 private:
  struct Node {
    Op op;
    int a = -1, b = -1, c = -1;
    std::vector<int> ins;      // Sum only
    Tensor val;
    Tensor adj;
    const Tensor* ext = nullptr;  // Param / EmbRow source
    std::string pname;            // gradient key for Param
    int row = -1;                 // EmbRow
    bool track = true;            // EmbRow with a frozen table: false
    double target = 0.0;          // Bce
  };

  int push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  const Tensor& val_of(int id) const { return value(id); }

  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> param_cache_;
};

}  // namespace synlab
