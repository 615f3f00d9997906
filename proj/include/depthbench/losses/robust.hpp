#pragma once

#include <cmath>

#include "depthbench/common.hpp"
#include "depthbench/tensor.hpp"

namespace depthbench::losses {

// General robust loss with shape alpha and scale c. alpha=2 recovers a
// scaled L2, alpha=1 a smooth L1, alpha=0 a Cauchy-like log, and negative
// alpha gives redescending tails.
//
// `as_printed` drops the "+1" inside the power term, matching a circulated
// variant of the kernel that is -1 at zero residual and negative nearby;
// it exists for auditing comparisons only. The default keeps the "+1" so
// the loss is zero at zero.
struct RobustParams {
  double alpha = 1.0;
  double c = 2.0;
  bool as_printed = false;

  void check() const {
    if (!(c > 0.0)) throw ConfigError("robust scale c must be positive");
  }
};

// Kernel value at a single residual.
inline double robust_value(double x, const RobustParams& params) {
  params.check();
  const double u = (x / params.c) * (x / params.c);
  const double a = params.alpha;
  if (params.as_printed) {
    if (a == 0.0 || a == 2.0)
      throw DomainError("printed robust form is undefined at alpha = 0 or 2");
    const double b = std::abs(a - 2.0);
    return (b / a) * (std::pow(u / b, a / 2.0) - 1.0);
  }
  if (a == 2.0) return 0.5 * u;
  if (a == 0.0) return std::log1p(0.5 * u);
  const double b = std::abs(a - 2.0);
  return (b / a) * (std::pow(u / b + 1.0, a / 2.0) - 1.0);
}

// Mean kernel value over all elements of a residual tensor.
template <class Scalar>
double robust_loss(const TensorT<Scalar>& residual, const RobustParams& params) {
  params.check();
  if (residual.size() == 0) throw EmptyMaskError("empty residual tensor");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i)
    sum += robust_value(static_cast<double>(residual[i]), params);
  return sum / static_cast<double>(residual.size());
}

}  // namespace depthbench::losses
