#pragma once

#include <cmath>

#include "depthbench/depth_map.hpp"

namespace depthbench::losses {

// Mean L1 gap between forward-difference gradients of the two maps:
//   (1/T) sum ( |dx(pred) - dx(gt)| + |dy(pred) - dy(gt)| ).
// A difference enters only where both pixels of its stencil are valid in
// both maps; T counts the differences actually evaluated.
template <class Scalar>
double gradient_loss(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  double sum = 0.0;
  Index terms = 0;
  for (Index y = 0; y < pred.height(); ++y) {
    for (Index x = 0; x < pred.width(); ++x) {
      if (!vi.mask(y, x)) continue;
      if (x + 1 < pred.width() && vi.mask(y, x + 1)) {
        const double dp = static_cast<double>(pred.values(y, x + 1)) -
                          static_cast<double>(pred.values(y, x));
        const double dg = static_cast<double>(gt.values(y, x + 1)) -
                          static_cast<double>(gt.values(y, x));
        sum += std::abs(dp - dg);
        ++terms;
      }
      if (y + 1 < pred.height() && vi.mask(y + 1, x)) {
        const double dp = static_cast<double>(pred.values(y + 1, x)) -
                          static_cast<double>(pred.values(y, x));
        const double dg = static_cast<double>(gt.values(y + 1, x)) -
                          static_cast<double>(gt.values(y, x));
        sum += std::abs(dp - dg);
        ++terms;
      }
    }
  }
  if (terms == 0)
    throw EmptyMaskError("no valid forward-difference positions");
  return sum / static_cast<double>(terms);
}

}  // namespace depthbench::losses
