#pragma once

#include <filesystem>

#include "depthbench/depth_map.hpp"

namespace depthbench::io {

// Decodes an 8-bit-per-channel RGB PNG, normalizing intensities to v/255.
// Any other color layout or bit depth is a FormatError.
RgbImage load_rgb(const std::filesystem::path& path);

// Encodes an RGB image back to 8-bit PNG (values clamped to [0,1]).
void save_rgb(const RgbImage& image, const std::filesystem::path& path);

// Decodes a single-channel 16-bit PNG into metric depth:
//   meters = raw * unit_scale,  valid = raw > 0 and meters <= max_depth.
// Invalid pixels keep their decoded value; consumers go through the mask.
DepthMap load_depth16(const std::filesystem::path& path,
                      double unit_scale = kDefaultUnitScale,
                      double max_depth = kMaxDepthMeters);

// Inverse of load_depth16. Valid pixels store round(value / unit_scale)
// clamped to 65535; invalid pixels store 0.
void save_depth16(const DepthMap& depth, const std::filesystem::path& path,
                  double unit_scale = kDefaultUnitScale);

}  // namespace depthbench::io
