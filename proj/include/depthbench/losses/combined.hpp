#pragma once

#include "depthbench/losses/gradient.hpp"
#include "depthbench/losses/robust.hpp"
#include "depthbench/losses/silog.hpp"
#include "depthbench/losses/vnl.hpp"

namespace depthbench::losses {

// Weights of the combined depth objective and of the distillation stage.
struct DepthLossWeights {
  double w_silog = 1.0;
  double w_gradient = 0.25;
  double w_vnl = 2.5;
  double w_robust = 0.6;
  double w_distill = 10.0;

  void check() const {
    if (w_silog < 0 || w_gradient < 0 || w_vnl < 0 || w_robust < 0 || w_distill < 0)
      throw ConfigError("loss weights must be non-negative");
  }
};

struct DepthLossParams {
  SilogParams silog;
  RobustParams robust;
  VnlParams vnl;
};

struct DepthLossTerms {
  double silog = 0.0;
  double gradient = 0.0;
  double vnl = 0.0;
  double robust = 0.0;
  double total = 0.0;
};

// Collects masked log-depth residuals ln(pred) - ln(gt) as a flat tensor;
// this is the argument of the robust term, keeping it in the same domain as
// the scale-invariant term.
template <class Scalar>
TensorT<double> log_residuals(const DepthMapT<Scalar>& pred,
                              const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  metrics::detail::require_positive_on(pred.values, vi.mask, "pred");
  metrics::detail::require_positive_on(gt.values, vi.mask, "gt");
  TensorT<double> residuals({vi.count});
  Index next = 0;
  for (Index y = 0; y < pred.height(); ++y)
    for (Index x = 0; x < pred.width(); ++x)
      if (vi.mask(y, x))
        residuals[next++] = std::log(static_cast<double>(pred.values(y, x))) -
                            std::log(static_cast<double>(gt.values(y, x)));
  return residuals;
}

// Combined depth objective:
//   w1 * silog + w2 * gradient + w3 * vnl + w4 * robust(log residuals).
template <class Scalar>
DepthLossTerms depth_loss_terms(const DepthMapT<Scalar>& pred,
                                const DepthMapT<Scalar>& gt,
                                const CameraIntrinsicsT<Scalar>& k,
                                const DepthLossWeights& weights,
                                const DepthLossParams& params) {
  weights.check();
  DepthLossTerms terms;
  terms.silog = silog_loss(pred, gt, params.silog);
  terms.gradient = gradient_loss(pred, gt);
  terms.vnl = vnl_loss(pred, gt, k, params.vnl);
  terms.robust = robust_loss(log_residuals(pred, gt), params.robust);
  terms.total = weights.w_silog * terms.silog + weights.w_gradient * terms.gradient +
                weights.w_vnl * terms.vnl + weights.w_robust * terms.robust;
  return terms;
}

template <class Scalar>
double depth_loss(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt,
                  const CameraIntrinsicsT<Scalar>& k,
                  const DepthLossWeights& weights = {},
                  const DepthLossParams& params = {}) {
  return depth_loss_terms(pred, gt, k, weights, params).total;
}

// Second-stage objective: depth term plus weighted distillation term.
inline double stage2_loss(double depth_term, double distill_term,
                          double w_distill = 10.0) {
  if (w_distill < 0) throw ConfigError("distillation weight must be non-negative");
  return depth_term + w_distill * distill_term;
}

}  // namespace depthbench::losses
