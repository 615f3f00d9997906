#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "depthbench/common.hpp"
#include "depthbench/tensor.hpp"

namespace depthbench {

using Index = Eigen::Index;

template <class Scalar>
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MaskArray = GridArray<bool>;

// Metric depth grid with a per-pixel validity mask. Values are meters.
// Pixels with valid=false carry whatever value their source produced; every
// consumer must go through the mask.
template <class Scalar>
struct DepthMapT {
  using Array = GridArray<Scalar>;

  Array values;
  MaskArray valid;

  DepthMapT() = default;

  DepthMapT(Index height, Index width)
      : values(Array::Zero(height, width)),
        valid(MaskArray::Constant(height, width, false)) {}

  DepthMapT(Array v, MaskArray m) : values(std::move(v)), valid(std::move(m)) {
    if (values.rows() != valid.rows() || values.cols() != valid.cols())
      throw ShapeError("depth values and validity mask differ in size");
  }

  // All pixels valid.
  static DepthMapT dense(Array v) {
    MaskArray m = MaskArray::Constant(v.rows(), v.cols(), true);
    return DepthMapT(std::move(v), std::move(m));
  }

  Index height() const { return values.rows(); }
  Index width() const { return values.cols(); }
  Index valid_count() const { return valid.count(); }

  // Checks the type invariant: every masked-in value lies in (0, max_depth].
  void validate(Scalar max_depth = Scalar(kMaxDepthMeters)) const {
    if ((valid && (values <= Scalar(0) || values > max_depth)).any())
      throw NonPositiveDepthError("valid pixel outside (0, max_depth]");
  }
};

using DepthMap = DepthMapT<double>;

// Interleaved RGB raster with intensities normalized to [0, 1].
template <class Scalar>
struct RgbImageT {
  Index height = 0;
  Index width = 0;
  std::vector<Scalar> values;  // h*w*3 row-major

  RgbImageT() = default;
  RgbImageT(Index h, Index w)
      : height(h), width(w), values(static_cast<std::size_t>(h * w * 3), Scalar(0)) {}

  Scalar& at(Index y, Index x, Index c) {
    return values[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }
  Scalar at(Index y, Index x, Index c) const {
    return values[static_cast<std::size_t>((y * width + x) * 3 + c)];
  }

  TensorT<Scalar> to_tensor() const {
    TensorT<Scalar> t({height, width, 3});
    std::copy(values.begin(), values.end(), t.data());
    return t;
  }
};

using RgbImage = RgbImageT<float>;

// Pinhole camera parameters, in pixels.
template <class Scalar>
struct CameraIntrinsicsT {
  Scalar fx, fy, cx, cy;

  void check() const {
    if (!(fx > Scalar(0)) || !(fy > Scalar(0)))
      throw ConfigError("focal lengths must be positive");
  }
};

using CameraIntrinsics = CameraIntrinsicsT<double>;

// Default VGA pinhole used when no calibration is supplied. The capture
// rig's intrinsics are not published; this is the conventional 640x480
// RGB-D calibration and is overridable everywhere it is consumed.
inline CameraIntrinsics default_vga_intrinsics() {
  return CameraIntrinsics{525.0, 525.0, 319.5, 239.5};
}

struct ValidityIntersection {
  MaskArray mask;
  Index count;
};

// Pixels valid in both maps. Throws on grid mismatch and on an empty result.
template <class Scalar>
ValidityIntersection validity_intersection(const DepthMapT<Scalar>& a,
                                           const DepthMapT<Scalar>& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw ShapeError("depth maps differ in size");
  MaskArray mask = a.valid && b.valid;
  const Index count = mask.count();
  if (count == 0) throw EmptyMaskError("no pixel is valid in both maps");
  return {std::move(mask), count};
}

// Back-projects every valid pixel through the pinhole model. Output is an
// HxWx3 tensor of camera-frame points; invalid pixels hold (0,0,0) and must
// be skipped via the depth map's mask.
template <class Scalar>
TensorT<Scalar> unproject(const DepthMapT<Scalar>& depth,
                          const CameraIntrinsicsT<Scalar>& k) {
  k.check();
  if (depth.valid_count() == 0) throw EmptyMaskError("unproject: no valid pixels");
  TensorT<Scalar> cloud({depth.height(), depth.width(), 3});
  for (Index v = 0; v < depth.height(); ++v) {
    for (Index u = 0; u < depth.width(); ++u) {
      if (!depth.valid(v, u)) continue;
      const Scalar d = depth.values(v, u);
      cloud.at(v, u, 0) = (Scalar(u) - k.cx) * d / k.fx;
      cloud.at(v, u, 1) = (Scalar(v) - k.cy) * d / k.fy;
      cloud.at(v, u, 2) = d;
    }
  }
  return cloud;
}

}  // namespace depthbench
