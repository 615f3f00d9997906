#pragma once

#include <Eigen/Core>

#include <span>
#include <utility>

#include "depthbench/tensor.hpp"

namespace depthbench::losses {

// Cosine affinity between every pair of spatial positions of an HxWxC
// feature map: a_ij = f_i . f_j / (|f_i| |f_j|). Rows with vanishing norm
// are floored at 1e-12. The result is (h*w) x (h*w), exactly symmetric.
template <class Scalar>
Eigen::MatrixXd pairwise_affinity(const TensorT<Scalar>& features) {
  if (features.rank() != 3) throw ShapeError("feature map must be rank-3 HxWxC");
  const Eigen::Index positions = features.extent(0) * features.extent(1);
  const Eigen::Index channels = features.extent(2);

  Eigen::MatrixXd rows(positions, channels);
  for (Eigen::Index i = 0; i < positions; ++i)
    for (Eigen::Index c = 0; c < channels; ++c)
      rows(i, c) = static_cast<double>(features[i * channels + c]);

  for (Eigen::Index i = 0; i < positions; ++i) {
    const double norm = std::max(rows.row(i).norm(), 1e-12);
    rows.row(i) /= norm;
  }

  Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(positions, positions);
  affinity.selfadjointView<Eigen::Lower>().rankUpdate(rows);
  affinity = affinity.selfadjointView<Eigen::Lower>();
  return affinity;
}

// Structure-distillation gap between student and teacher feature maps with
// identical spatial extents (channel counts may differ):
//   (1/(w*h)) * sum_ij (a^s_ij - a^t_ij)^2
// summed over the full (h*w)^2 affinity grids.
template <class Scalar>
double pairwise_distill_loss(const TensorT<Scalar>& student,
                             const TensorT<Scalar>& teacher) {
  if (student.rank() != 3 || teacher.rank() != 3)
    throw ShapeError("feature maps must be rank-3 HxWxC");
  if (student.extent(0) != teacher.extent(0) ||
      student.extent(1) != teacher.extent(1))
    throw ShapeError("student and teacher spatial extents differ");
  const Eigen::MatrixXd diff =
      pairwise_affinity(student) - pairwise_affinity(teacher);
  const double positions = static_cast<double>(diff.rows());
  return diff.squaredNorm() / positions;
}

// Weighted sum of pairwise distillation losses over several layer pairs.
// Layer selection and weighting are the caller's policy.
template <class Scalar>
double multi_level_distill_loss(
    std::span<const std::pair<TensorT<Scalar>, TensorT<Scalar>>> layer_pairs,
    std::span<const double> weights) {
  if (layer_pairs.size() != weights.size())
    throw ConfigError("one weight per layer pair required");
  double sum = 0.0;
  for (std::size_t i = 0; i < layer_pairs.size(); ++i)
    sum += weights[i] *
           pairwise_distill_loss(layer_pairs[i].first, layer_pairs[i].second);
  return sum;
}

}  // namespace depthbench::losses
