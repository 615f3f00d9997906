#pragma once

#include "depthbench/depth_map.hpp"
#include "depthbench/rng.hpp"

namespace depthbench::io {

// Axis-aligned crop window, always fully inside its source image.
struct CropSpec {
  Index top = 0, left = 0, height = 0, width = 0;
};

struct CropConfig {
  Index min_size = 64;
  Index max_size = 0;  // inclusive; must be >= min_size
};

// Random-location random-size patch sampler. Draw order is pinned for
// reproducibility: height, width (uniform integers in [min_size, max_size]),
// then top and left (uniform over in-bounds offsets) — four stream draws
// per crop. The same CropSpec must be applied to both members of an
// RGB/depth pair to keep them aligned.
inline CropSpec r2_crop(SplitMix64& rng, Index src_height, Index src_width,
                        const CropConfig& config) {
  if (config.min_size < 1 || config.max_size < config.min_size)
    throw ConfigError("crop sizes must satisfy 1 <= min <= max");
  if (config.max_size > src_height || config.max_size > src_width)
    throw ConfigError("max crop size exceeds source dimensions");
  CropSpec crop;
  crop.height = rng.next_int(config.min_size, config.max_size);
  crop.width = rng.next_int(config.min_size, config.max_size);
  crop.top = rng.next_int(0, src_height - crop.height);
  crop.left = rng.next_int(0, src_width - crop.width);
  return crop;
}

template <class Scalar>
DepthMapT<Scalar> apply_crop(const DepthMapT<Scalar>& map, const CropSpec& crop) {
  if (crop.top < 0 || crop.left < 0 || crop.height < 1 || crop.width < 1 ||
      crop.top + crop.height > map.height() || crop.left + crop.width > map.width())
    throw ConfigError("crop exceeds image bounds");
  return DepthMapT<Scalar>(
      map.values.block(crop.top, crop.left, crop.height, crop.width),
      map.valid.block(crop.top, crop.left, crop.height, crop.width));
}

template <class Scalar>
RgbImageT<Scalar> apply_crop(const RgbImageT<Scalar>& image, const CropSpec& crop) {
  if (crop.top < 0 || crop.left < 0 || crop.height < 1 || crop.width < 1 ||
      crop.top + crop.height > image.height || crop.left + crop.width > image.width)
    throw ConfigError("crop exceeds image bounds");
  RgbImageT<Scalar> out(crop.height, crop.width);
  for (Index y = 0; y < crop.height; ++y)
    for (Index x = 0; x < crop.width; ++x)
      for (Index c = 0; c < 3; ++c)
        out.at(y, x, c) = image.at(crop.top + y, crop.left + x, c);
  return out;
}

}  // namespace depthbench::io
