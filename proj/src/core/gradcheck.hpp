#pragma once

#include <functional>

#include "core/tensor.hpp"

namespace synlab {

// Scalar loss over a ParamBundle. When `grad` is non-null the callee must
// also fill in the analytic gradient (backward pass).
using LossFn = std::function<double(const ParamBundle&, Gradient*)>;

// Central finite differences against the analytic gradient, over every
// scalar parameter. Returns the maximum relative error, where
// relerr(a, b) = |a - b| / max(|a|, |b|, 1e-8).
// Throws std::runtime_error naming the parameter if the loss is non-finite.
double grad_check(const LossFn& loss, ParamBundle params, double step);

}  // namespace synlab
