#include "core/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace synlab {

namespace {
// Relative error with an absolute floor: gradient entries below 1e-6 are
// compared on an absolute scale, where central-difference cancellation
// noise (~1e-12 for losses of order 1) stays far under the tolerance.
double rel_err(double a, double b) {
  double denom = std::max(std::max(std::fabs(a), std::fabs(b)), 1e-6);
  return std::fabs(a - b) / denom;
}
}  // namespace

double grad_check(const LossFn& loss, ParamBundle params, double step) {
  if (step <= 0.0 || step > 1e-2) {
    throw std::invalid_argument("grad_check: step must be in (0, 1e-2]");
  }
  Gradient analytic;
  double base = loss(params, &analytic);
  if (!std::isfinite(base)) {
    throw std::runtime_error("grad_check: non-finite loss at base point");
  }

  double max_err = 0.0;
  for (auto& [name, tensor] : params) {
    auto git = analytic.find(name);
    for (int i = 0; i < tensor.size(); ++i) {
      double saved = tensor.v[i];
      tensor.v[i] = saved + step;
      double up = loss(params, nullptr);
      tensor.v[i] = saved - step;
      double down = loss(params, nullptr);
      tensor.v[i] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw std::runtime_error("grad_check: non-finite loss perturbing " +
                                 name + "[" + std::to_string(i) + "]");
      }
      double numeric = (up - down) / (2.0 * step);
      double exact = git == analytic.end() ? 0.0 : git->second.v[i];
      max_err = std::max(max_err, rel_err(exact, numeric));
    }
  }
  return max_err;
}

}  // namespace synlab
