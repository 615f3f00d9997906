#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "depthbench/depth_map.hpp"

namespace depthbench::io {

struct DatasetEntry {
  std::string image_id;
  std::filesystem::path rgb_path;
  std::filesystem::path depth_path;
};

// Index of paired RGB/depth files plus a train/val assignment (entry
// indices). Ids are unique and every referenced file exists at load time.
struct DatasetIndex {
  std::vector<DatasetEntry> entries;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

// Loads a CSV manifest with header "image_id,rgb_path,depth_path".
// Relative paths are resolved against the manifest's directory. All entries
// start in the train split.
DatasetIndex load_manifest(const std::filesystem::path& csv_path);

// Convenience fallback: pairs <root>/rgb/<stem>.png with
// <root>/depth/<stem>.png by filename stem.
DatasetIndex discover_dataset(const std::filesystem::path& root);

// Deterministic shuffle-then-slice split. |val| = round(val_fraction * n);
// the two splits are disjoint and exhaustive. Same seed, same split.
DatasetIndex split_dataset(DatasetIndex index, double val_fraction,
                           std::uint64_t seed);

struct LoadedPair {
  RgbImage rgb;
  DepthMap depth;
};

// Decodes one entry's RGB and depth rasters and enforces that the pair
// shares dimensions.
LoadedPair load_entry(const DatasetEntry& entry,
                      double unit_scale = kDefaultUnitScale,
                      double max_depth = kMaxDepthMeters);

// Default data root, from DEPTHBENCH_DATA_DIR when set.
std::filesystem::path default_data_dir();

}  // namespace depthbench::io
