#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "depthbench/depth_map.hpp"

namespace depthbench::metrics {

// Parameters of the challenge score 2^(-k * si_rmse) / (C * runtime_ms).
// The exponent coefficient k is fixed at 20 by the scoring rules; C is the
// organizers' normalization constant, recoverable from any published row.
struct ScoreParams {
  double exponent_coeff = 20.0;
  double normalization_c = 0.0;
};

struct EvalResult {
  double rmse = 0.0;
  double si_rmse = 0.0;
  double log10 = 0.0;
  double rel = 0.0;
  Index n_valid = 0;
  Index n_clamped = 0;  // predictions floored before log-domain metrics
};

enum class Aggregation { pixel_pooled, per_image_mean };

struct EvalReport {
  EvalResult aggregate;
  Aggregation aggregation = Aggregation::pixel_pooled;
  std::vector<std::pair<std::string, EvalResult>> per_image;
};

namespace detail {

template <class Scalar>
void require_positive_on(const GridArray<Scalar>& values, const MaskArray& mask,
                         const char* which) {
  if ((mask && (values <= Scalar(0))).any())
    throw NonPositiveDepthError(std::string(which) +
                                ": non-positive depth under the validity mask");
}

}  // namespace detail

// Root mean squared error over the shared validity mask, in meters.
template <class Scalar>
double rmse(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  const GridArray<double> diff =
      (pred.values - gt.values).template cast<double>();
  const double ss = vi.mask.select(diff.square(), 0.0).sum();
  return std::sqrt(ss / static_cast<double>(vi.count));
}

// Scale-invariant RMSE: the standard deviation of per-pixel log-depth
// errors. A global rescale of either map shifts every log error by the same
// constant and leaves the value unchanged.
template <class Scalar>
double si_rmse(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  detail::require_positive_on(pred.values, vi.mask, "pred");
  detail::require_positive_on(gt.values, vi.mask, "gt");
  const GridArray<double> err = pred.values.template cast<double>().log() -
                                gt.values.template cast<double>().log();
  const double n = static_cast<double>(vi.count);
  const double sum = vi.mask.select(err, 0.0).sum();
  const double sum_sq = vi.mask.select(err.square(), 0.0).sum();
  const double radicand = sum_sq / n - (sum / n) * (sum / n);
  return std::sqrt(std::max(0.0, radicand));
}

// Mean absolute log10 error over the shared mask.
template <class Scalar>
double log10_err(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  detail::require_positive_on(pred.values, vi.mask, "pred");
  detail::require_positive_on(gt.values, vi.mask, "gt");
  const GridArray<double> err = (pred.values.template cast<double>().log() -
                                 gt.values.template cast<double>().log())
                                    .abs() /
                                std::log(10.0);
  return vi.mask.select(err, 0.0).sum() / static_cast<double>(vi.count);
}

// Mean relative absolute error |pred - gt| / gt over the shared mask.
template <class Scalar>
double rel_err(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
  const auto vi = validity_intersection(pred, gt);
  detail::require_positive_on(gt.values, vi.mask, "gt");
  const GridArray<double> err =
      ((pred.values - gt.values).abs() / gt.values).template cast<double>();
  return vi.mask.select(err, 0.0).sum() / static_cast<double>(vi.count);
}

// Challenge score. Strictly decreasing in both arguments.
inline double final_score(double si_rmse_value, double runtime_ms,
                          const ScoreParams& params) {
  if (!(runtime_ms > 0.0)) throw DomainError("runtime must be positive");
  if (!(params.normalization_c > 0.0))
    throw DomainError("normalization constant must be positive");
  return std::exp2(-params.exponent_coeff * si_rmse_value) /
         (params.normalization_c * runtime_ms);
}

// Inverts final_score for C given one published (si_rmse, runtime, score) row.
inline double calibrate_c(double si_rmse_value, double runtime_ms,
                          double reported_score, double exponent_coeff = 20.0) {
  if (!(si_rmse_value > 0.0) || !(runtime_ms > 0.0) || !(reported_score > 0.0))
    throw DomainError("calibration inputs must be positive");
  return std::exp2(-exponent_coeff * si_rmse_value) /
         (runtime_ms * reported_score);
}

// C calibrated from the MAI 2022 winning row (si-RMSE 0.2773, 46 ms, 298).
inline double default_normalization_c() { return calibrate_c(0.2773, 46.0, 298.0); }

inline ScoreParams default_score_params() {
  return ScoreParams{20.0, default_normalization_c()};
}

// Streaming pixel-pooled accumulator. Predictions that are non-positive
// under a valid ground-truth pixel enter the log-domain sums floored at
// kLogDepthFloorMeters and are counted in n_clamped; RMSE and REL use the
// raw prediction.
class MetricSums {
 public:
  template <class Scalar>
  void add(const DepthMapT<Scalar>& pred, const DepthMapT<Scalar>& gt) {
    const auto vi = validity_intersection(pred, gt);
    detail::require_positive_on(gt.values, vi.mask, "gt");
    for (Index y = 0; y < pred.height(); ++y) {
      for (Index x = 0; x < pred.width(); ++x) {
        if (!vi.mask(y, x)) continue;
        const double g = static_cast<double>(gt.values(y, x));
        const double p = static_cast<double>(pred.values(y, x));
        double p_log = p;
        if (p <= 0.0) {
          p_log = kLogDepthFloorMeters;
          ++n_clamped_;
        }
        const double e = std::log(p_log) - std::log(g);
        sum_sq_ += (p - g) * (p - g);
        sum_e_ += e;
        sum_e2_ += e * e;
        sum_l10_ += std::abs(e) / std::log(10.0);
        sum_rel_ += std::abs(p - g) / g;
        ++n_;
      }
    }
  }

  void merge(const MetricSums& other) {
    n_ += other.n_;
    n_clamped_ += other.n_clamped_;
    sum_sq_ += other.sum_sq_;
    sum_e_ += other.sum_e_;
    sum_e2_ += other.sum_e2_;
    sum_l10_ += other.sum_l10_;
    sum_rel_ += other.sum_rel_;
  }

  Index count() const { return n_; }

  EvalResult finalize() const {
    if (n_ == 0) throw EmptyMaskError("no pixels accumulated");
    const double n = static_cast<double>(n_);
    EvalResult r;
    r.rmse = std::sqrt(sum_sq_ / n);
    r.si_rmse = std::sqrt(std::max(0.0, sum_e2_ / n - (sum_e_ / n) * (sum_e_ / n)));
    r.log10 = sum_l10_ / n;
    r.rel = sum_rel_ / n;
    r.n_valid = n_;
    r.n_clamped = n_clamped_;
    return r;
  }

 private:
  Index n_ = 0;
  Index n_clamped_ = 0;
  double sum_sq_ = 0.0;
  double sum_e_ = 0.0;
  double sum_e2_ = 0.0;
  double sum_l10_ = 0.0;
  double sum_rel_ = 0.0;
};

// Evaluates a batch of prediction/ground-truth pairs. Per-image results are
// always reported; the aggregate either pools all valid pixels (default) or
// averages the per-image metric values.
class BatchEvaluator {
 public:
  explicit BatchEvaluator(Aggregation aggregation = Aggregation::pixel_pooled)
      : aggregation_(aggregation) {}

  template <class Scalar>
  void add(const std::string& image_id, const DepthMapT<Scalar>& pred,
           const DepthMapT<Scalar>& gt) {
    MetricSums sums;
    sums.add(pred, gt);
    per_image_.emplace_back(image_id, sums.finalize());
    pooled_.merge(sums);
  }

  EvalReport report() const {
    EvalReport rep;
    rep.aggregation = aggregation_;
    rep.per_image = per_image_;
    if (aggregation_ == Aggregation::pixel_pooled) {
      rep.aggregate = pooled_.finalize();
    } else {
      if (per_image_.empty()) throw EmptyMaskError("no images accumulated");
      EvalResult mean;
      for (const auto& [id, r] : per_image_) {
        mean.rmse += r.rmse;
        mean.si_rmse += r.si_rmse;
        mean.log10 += r.log10;
        mean.rel += r.rel;
        mean.n_valid += r.n_valid;
        mean.n_clamped += r.n_clamped;
      }
      const double k = static_cast<double>(per_image_.size());
      mean.rmse /= k;
      mean.si_rmse /= k;
      mean.log10 /= k;
      mean.rel /= k;
      rep.aggregate = mean;
    }
    return rep;
  }

 private:
  Aggregation aggregation_;
  MetricSums pooled_;
  std::vector<std::pair<std::string, EvalResult>> per_image_;
};

// One leaderboard entry: published fidelity/runtime plus the recomputed score.
struct LeaderboardRow {
  std::string name;
  double si_rmse = 0.0;
  double runtime_ms = 0.0;
  double score = 0.0;
  int rank = 0;
};

// Scores every row and sorts by descending score. Ties keep input order.
void rank_leaderboard(std::vector<LeaderboardRow>& rows, const ScoreParams& params);

// Report serialization. Column order: image_id, rmse, si_rmse, log10, rel,
// n_valid; the pooled/averaged aggregate appears as the final row "ALL".
std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace depthbench::metrics
