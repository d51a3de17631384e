#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace synlab {

// Dense 64-bit float matrix; vectors are cols == 1.
struct Tensor {
  int rows = 0;
  int cols = 1;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c = 1) { return Tensor(r, c); }

  int size() const { return rows * cols; }
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }

  bool operator==(const Tensor& o) const = default;

  bool same_shape(const Tensor& o) const {
    return rows == o.rows && cols == o.cols;
  }
  std::string shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }
};

// Named trainable parameters of one model.
using ParamBundle = std::map<std::string, Tensor>;

// Gradient of a scalar loss with respect to a ParamBundle (same keys/shapes).
using Gradient = std::map<std::string, Tensor>;

// Word embedding table, one row per vocab id. Frozen by default.
struct EmbeddingTable {
  Tensor weights;  // |vocab| x dim
  bool trainable = false;

  int dim() const { return weights.cols; }
  int vocab_size() const { return weights.rows; }
};

}  // namespace synlab
