#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <vector>

#include "depthbench/depth_map.hpp"
#include "depthbench/rng.hpp"

namespace depthbench::losses {

// Virtual-normal loss policy. Triplets of pixel locations are drawn from the
// shared validity mask and evaluated in both reconstructed point clouds; a
// triplet is rejected when any two of its pixels are closer than
// min_pixel_separation or when either cloud's triangle has an internal angle
// below min_angle_deg.
//
// Sampling is a pinned deterministic procedure so independent
// implementations replay it exactly:
//   - valid pixels are enumerated in row-major order;
//   - one SplitMix64 stream seeded with `seed` serves the whole call;
//   - each attempt draws exactly three indices via next_below(n_valid);
//   - attempts stop after n_triplets acceptances or 50 * n_triplets draws.
struct VnlParams {
  std::uint64_t seed = 0;
  Index n_triplets = 0;  // 0 selects the default for the mask size
  double min_pixel_separation = 3.0;
  double min_angle_deg = 5.0;
};

// Default triplet budget: ten per valid pixel, capped at 100k.
inline Index default_vnl_triplets(Index n_valid) {
  return std::min<Index>(100000, 10 * n_valid);
}

namespace detail {

// Unit triangle normal with canonical sign: positive z, ties broken by
// positive y, then positive x.
inline Eigen::Vector3d canonical_normal(const Eigen::Vector3d& a,
                                        const Eigen::Vector3d& b,
                                        const Eigen::Vector3d& c) {
  Eigen::Vector3d n = (b - a).cross(c - a);
  const double norm = n.norm();
  if (norm <= 0.0) return Eigen::Vector3d::Zero();
  n /= norm;
  if (n.z() < 0.0 || (n.z() == 0.0 && (n.y() < 0.0 || (n.y() == 0.0 && n.x() < 0.0))))
    n = -n;
  return n;
}

// Smallest internal angle of triangle (a, b, c), in degrees.
inline double min_triangle_angle_deg(const Eigen::Vector3d& a,
                                     const Eigen::Vector3d& b,
                                     const Eigen::Vector3d& c) {
  const auto angle = [](const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu <= 0.0 || nv <= 0.0) return 0.0;
    const double cosv = std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
    return std::acos(cosv) * 180.0 / M_PI;
  };
  const double aa = angle(b - a, c - a);
  const double ab = angle(a - b, c - b);
  return std::min({aa, ab, 180.0 - aa - ab});
}

}  // namespace detail

// Mean L1 gap between unit normals of randomly sampled point triplets,
// unprojected from the predicted and ground-truth maps at identical pixels.
template <class Scalar>
double vnl_loss(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt,
                const CameraIntrinsicsT<Scalar>& k, const VnlParams& params) {
  const auto vi = validity_intersection(pred, gt);
  if (vi.count < 3)
    throw InsufficientGeometryError("need at least 3 shared valid pixels");

  std::vector<std::pair<Index, Index>> pixels;
  pixels.reserve(static_cast<std::size_t>(vi.count));
  for (Index y = 0; y < pred.height(); ++y)
    for (Index x = 0; x < pred.width(); ++x)
      if (vi.mask(y, x)) pixels.emplace_back(y, x);

  const TensorT<Scalar> cloud_pred = unproject(pred, k);
  const TensorT<Scalar> cloud_gt = unproject(gt, k);
  const auto point = [](const TensorT<Scalar>& cloud, Index y, Index x) {
    return Eigen::Vector3d(static_cast<double>(cloud.at(y, x, 0)),
                           static_cast<double>(cloud.at(y, x, 1)),
                           static_cast<double>(cloud.at(y, x, 2)));
  };

  const Index n_triplets =
      params.n_triplets > 0 ? params.n_triplets : default_vnl_triplets(vi.count);
  if (n_triplets < 1) throw ConfigError("n_triplets must be at least 1");

  SplitMix64 rng(params.seed);
  const std::uint64_t n = static_cast<std::uint64_t>(pixels.size());
  const Index max_attempts = 50 * n_triplets;
  const double min_sep_sq = params.min_pixel_separation * params.min_pixel_separation;

  double sum = 0.0;
  Index accepted = 0;
  for (Index attempt = 0; attempt < max_attempts && accepted < n_triplets; ++attempt) {
    const auto ia = rng.next_below(n);
    const auto ib = rng.next_below(n);
    const auto ic = rng.next_below(n);
    if (ia == ib || ib == ic || ia == ic) continue;

    const auto [ya, xa] = pixels[ia];
    const auto [yb, xb] = pixels[ib];
    const auto [yc, xc] = pixels[ic];
    const auto pix_dist_sq = [](Index y0, Index x0, Index y1, Index x1) {
      const double dy = static_cast<double>(y0 - y1);
      const double dx = static_cast<double>(x0 - x1);
      return dy * dy + dx * dx;
    };
    if (pix_dist_sq(ya, xa, yb, xb) < min_sep_sq ||
        pix_dist_sq(yb, xb, yc, xc) < min_sep_sq ||
        pix_dist_sq(ya, xa, yc, xc) < min_sep_sq)
      continue;

    const Eigen::Vector3d pa = point(cloud_pred, ya, xa);
    const Eigen::Vector3d pb = point(cloud_pred, yb, xb);
    const Eigen::Vector3d pc = point(cloud_pred, yc, xc);
    const Eigen::Vector3d ga = point(cloud_gt, ya, xa);
    const Eigen::Vector3d gb = point(cloud_gt, yb, xb);
    const Eigen::Vector3d gc = point(cloud_gt, yc, xc);
    if (detail::min_triangle_angle_deg(pa, pb, pc) < params.min_angle_deg ||
        detail::min_triangle_angle_deg(ga, gb, gc) < params.min_angle_deg)
      continue;

    const Eigen::Vector3d np = detail::canonical_normal(pa, pb, pc);
    const Eigen::Vector3d ng = detail::canonical_normal(ga, gb, gc);
    if (np.isZero() || ng.isZero()) continue;

    sum += (np - ng).cwiseAbs().sum();
    ++accepted;
  }

  if (accepted == 0)
    throw InsufficientGeometryError("no triplet passed the sampling filters");
  return sum / static_cast<double>(accepted);
}

}  // namespace depthbench::losses
