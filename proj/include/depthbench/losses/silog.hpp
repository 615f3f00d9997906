#pragma once

#include <cmath>

#include "depthbench/depth_map.hpp"
#include "depthbench/metrics.hpp"

namespace depthbench::losses {

// Scale-invariant log loss parameters. alpha scales the loss, lambda in
// [0, 1] weights the squared-mean term: lambda=0 is a plain RMS of log
// errors, lambda=1 is fully scale-invariant. Defaults follow the loss's
// customary usage; both are always explicit.
struct SilogParams {
  double alpha = 10.0;
  double lambda = 0.85;

  void check() const {
    if (!(alpha > 0.0)) throw ConfigError("silog alpha must be positive");
    if (lambda < 0.0 || lambda > 1.0)
      throw ConfigError("silog lambda must lie in [0, 1]");
  }
};

// alpha * sqrt( (1/N) sum e_i^2 - (lambda/N^2) (sum e_i)^2 ),
// e_i = ln(pred_i) - ln(gt_i) over the shared validity mask.
template <class Scalar>
double silog_loss(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt,
                  const SilogParams& params) {
  params.check();
  const auto vi = validity_intersection(pred, gt);
  metrics::detail::require_positive_on(pred.values, vi.mask, "pred");
  metrics::detail::require_positive_on(gt.values, vi.mask, "gt");
  const GridArray<double> err = pred.values.template cast<double>().log() -
                                gt.values.template cast<double>().log();
  const double n = static_cast<double>(vi.count);
  const double sum = vi.mask.select(err, 0.0).sum();
  const double sum_sq = vi.mask.select(err.square(), 0.0).sum();
  const double radicand = sum_sq / n - params.lambda * (sum / n) * (sum / n);
  return params.alpha * std::sqrt(std::max(0.0, radicand));
}

}  // namespace depthbench::losses
