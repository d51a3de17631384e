#include "core/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace synlab {

namespace {

constexpr double kBceClampLo = 1e-12;
constexpr double kBceClampHi = 1.0 - 1e-12;

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": incompatible shapes " +
                              a.shape_str() + " and " + b.shape_str());
}

void require_vector(const char* op, const Tensor& t) {
  if (t.cols != 1) {
    throw std::invalid_argument(std::string(op) + ": expected a vector, got " +
                                t.shape_str());
  }
}

}  // namespace

int Tape::input(Tensor value) {
  Node n;
  n.op = Op::Input;
  n.val = std::move(value);
  return push(std::move(n));
}

int Tape::param(const std::string& name, const Tensor& value) {
  auto it = param_cache_.find(name);
  if (it != param_cache_.end()) return it->second;
  Node n;
  n.op = Op::Param;
  n.ext = &value;
  n.pname = name;
  int id = push(std::move(n));
  param_cache_.emplace(name, id);
  return id;
}

int Tape::emb_row(const EmbeddingTable& table, int row) {
  if (row < 0 || row >= table.vocab_size()) {
    throw std::invalid_argument("emb_row: row " + std::to_string(row) +
                                " out of range for " +
                                table.weights.shape_str());
  }
  Node n;
  n.op = Op::EmbRow;
  n.row = row;
  n.track = table.trainable;
  n.ext = nullptr;
  n.val = Tensor(table.dim(), 1);
  for (int j = 0; j < table.dim(); ++j) n.val.v[j] = table.weights.at(row, j);
  if (table.trainable) {
    // remember the table shape for gradient assembly
    n.a = table.vocab_size();
    n.b = table.dim();
  }
  return push(std::move(n));
}

int Tape::affine(int w, int x, int b) {
  const Tensor& W = val_of(w);
  const Tensor& X = val_of(x);
  const Tensor& B = val_of(b);
  require_vector("affine", X);
  require_vector("affine", B);
  if (W.cols != X.rows) shape_error("affine W*x", W, X);
  if (B.rows != W.rows) shape_error("affine +b", W, B);
  Node n;
  n.op = Op::Affine;
  n.a = w;
  n.b = x;
  n.c = b;
  n.val = Tensor(W.rows, 1);
  for (int i = 0; i < W.rows; ++i) {
    double acc = B.v[i];
    const double* wr = &W.v[static_cast<size_t>(i) * W.cols];
    for (int j = 0; j < W.cols; ++j) acc += wr[j] * X.v[j];
    n.val.v[i] = acc;
  }
  return push(std::move(n));
}

int Tape::sigmoid(int x) {
  const Tensor& X = val_of(x);
  Node n;
  n.op = Op::Sigmoid;
  n.a = x;
  n.val = Tensor(X.rows, X.cols);
  for (int i = 0; i < X.size(); ++i) n.val.v[i] = 1.0 / (1.0 + std::exp(-X.v[i]));
  return push(std::move(n));
}

int Tape::tanh_op(int x) {
  const Tensor& X = val_of(x);
  Node n;
  n.op = Op::Tanh;
  n.a = x;
  n.val = Tensor(X.rows, X.cols);
  for (int i = 0; i < X.size(); ++i) n.val.v[i] = std::tanh(X.v[i]);
  return push(std::move(n));
}

int Tape::hadamard(int a, int b) {
  const Tensor& A = val_of(a);
  const Tensor& B = val_of(b);
  if (!A.same_shape(B)) shape_error("hadamard", A, B);
  Node n;
  n.op = Op::Hadamard;
  n.a = a;
  n.b = b;
  n.val = Tensor(A.rows, A.cols);
  for (int i = 0; i < A.size(); ++i) n.val.v[i] = A.v[i] * B.v[i];
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  const Tensor& A = val_of(a);
  const Tensor& B = val_of(b);
  if (!A.same_shape(B)) shape_error("add", A, B);
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.val = Tensor(A.rows, A.cols);
  for (int i = 0; i < A.size(); ++i) n.val.v[i] = A.v[i] + B.v[i];
  return push(std::move(n));
}

int Tape::sum(const std::vector<int>& xs) {
  if (xs.empty()) throw std::invalid_argument("sum: empty operand list");
  const Tensor& first = val_of(xs[0]);
  Node n;
  n.op = Op::Sum;
  n.ins = xs;
  n.val = Tensor(first.rows, first.cols);
  // summands accumulated in the given order, always
  for (int id : xs) {
    const Tensor& X = val_of(id);
    if (!X.same_shape(first)) shape_error("sum", first, X);
    for (int i = 0; i < X.size(); ++i) n.val.v[i] += X.v[i];
  }
  return push(std::move(n));
}

int Tape::concat(int a, int b) {
  const Tensor& A = val_of(a);
  const Tensor& B = val_of(b);
  require_vector("concat", A);
  require_vector("concat", B);
  Node n;
  n.op = Op::Concat;
  n.a = a;
  n.b = b;
  n.val = Tensor(A.rows + B.rows, 1);
  std::copy(A.v.begin(), A.v.end(), n.val.v.begin());
  std::copy(B.v.begin(), B.v.end(), n.val.v.begin() + A.rows);
  return push(std::move(n));
}

int Tape::bce(int p, double target) {
  const Tensor& P = val_of(p);
  if (P.size() != 1) {
    throw std::invalid_argument("bce: probability must be scalar, got " +
                                P.shape_str());
  }
  double pc = std::min(kBceClampHi, std::max(kBceClampLo, P.v[0]));
  Node n;
  n.op = Op::Bce;
  n.a = p;
  n.target = target;
  n.val = Tensor(1, 1);
  n.val.v[0] = -(target * std::log(pc) + (1.0 - target) * std::log(1.0 - pc));
  return push(std::move(n));
}

void Tape::backward(int root) {
  if (value(root).size() != 1) {
    throw std::invalid_argument("backward: root must be scalar, got " +
                                value(root).shape_str());
  }
  for (Node& n : nodes_) {
    const Tensor& v = n.ext ? *n.ext : n.val;
    n.adj = Tensor(v.rows, v.cols);
  }
  nodes_[root].adj.v[0] = 1.0;

  for (int id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    const Tensor& g = n.adj;
    switch (n.op) {
      case Op::Input:
      case Op::Param:
      case Op::EmbRow:
        break;
      case Op::Affine: {
        const Tensor& W = value(n.a);
        const Tensor& X = value(n.b);
        Tensor& dW = nodes_[n.a].adj;
        Tensor& dX = nodes_[n.b].adj;
        Tensor& dB = nodes_[n.c].adj;
        for (int i = 0; i < W.rows; ++i) {
          double gi = g.v[i];
          dB.v[i] += gi;
          double* dwr = &dW.v[static_cast<size_t>(i) * W.cols];
          const double* wr = &W.v[static_cast<size_t>(i) * W.cols];
          for (int j = 0; j < W.cols; ++j) {
            dwr[j] += gi * X.v[j];
            dX.v[j] += gi * wr[j];
          }
        }
        break;
      }
      case Op::Sigmoid: {
        Tensor& dX = nodes_[n.a].adj;
        for (int i = 0; i < n.val.size(); ++i) {
          double s = n.val.v[i];
          dX.v[i] += g.v[i] * s * (1.0 - s);
        }
        break;
      }
      case Op::Tanh: {
        Tensor& dX = nodes_[n.a].adj;
        for (int i = 0; i < n.val.size(); ++i) {
          double t = n.val.v[i];
          dX.v[i] += g.v[i] * (1.0 - t * t);
        }
        break;
      }
      case Op::Hadamard: {
        const Tensor& A = value(n.a);
        const Tensor& B = value(n.b);
        Tensor& dA = nodes_[n.a].adj;
        Tensor& dB = nodes_[n.b].adj;
        for (int i = 0; i < A.size(); ++i) {
          dA.v[i] += g.v[i] * B.v[i];
          dB.v[i] += g.v[i] * A.v[i];
        }
        break;
      }
      case Op::Add: {
        Tensor& dA = nodes_[n.a].adj;
        Tensor& dB = nodes_[n.b].adj;
        for (int i = 0; i < g.size(); ++i) {
          dA.v[i] += g.v[i];
          dB.v[i] += g.v[i];
        }
        break;
      }
      case Op::Sum: {
        for (int in : n.ins) {
          Tensor& dX = nodes_[in].adj;
          for (int i = 0; i < g.size(); ++i) dX.v[i] += g.v[i];
        }
        break;
      }
      case Op::Concat: {
        Tensor& dA = nodes_[n.a].adj;
        Tensor& dB = nodes_[n.b].adj;
        for (int i = 0; i < dA.rows; ++i) dA.v[i] += g.v[i];
        for (int i = 0; i < dB.rows; ++i) dB.v[i] += g.v[dA.rows + i];
        break;
      }
      case Op::Bce: {
        double p = value(n.a).v[0];
        if (p > kBceClampLo && p < kBceClampHi) {
          double y = n.target;
          nodes_[n.a].adj.v[0] += g.v[0] * (-y / p + (1.0 - y) / (1.0 - p));
        }
        break;
      }
    }
  }
}

Gradient Tape::grads() const {
  Gradient out;
  for (const Node& n : nodes_) {
    if (n.op == Op::Param) {
      out[n.pname] = n.adj;
    } else if (n.op == Op::EmbRow && n.track) {
      Tensor& e = out["embedding"];
      if (e.size() == 0) e = Tensor(n.a, n.b);
      for (int j = 0; j < n.b; ++j) e.at(n.row, j) += n.adj.v[j];
    }
  }
  return out;
}

void Tape::reset() {
  nodes_.clear();
  param_cache_.clear();
}

}  // namespace synlab
