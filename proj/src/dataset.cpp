#include "depthbench/io/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "depthbench/io/png_io.hpp"
#include "depthbench/rng.hpp"

namespace depthbench::io {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

void check_entry(const DatasetEntry& entry) {
  if (!fs::exists(entry.rgb_path))
    throw FormatError("missing RGB file: " + entry.rgb_path.string());
  if (!fs::exists(entry.depth_path))
    throw FormatError("missing depth file: " + entry.depth_path.string());
}

}  // namespace

DatasetIndex load_manifest(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw FormatError("cannot open manifest: " + csv_path.string());
  const fs::path base = csv_path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty manifest");
  // Optional schema comment line before the header.
  if (!line.empty() && line[0] == '#') {
    if (!std::getline(in, line)) throw FormatError("manifest missing header");
  }
  if (split_csv_line(line) != std::vector<std::string>{"image_id", "rgb_path", "depth_path"})
    throw FormatError("manifest header must be image_id,rgb_path,depth_path");

  DatasetIndex index;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw FormatError("manifest row needs 3 fields: " + line);
    DatasetEntry entry;
    entry.image_id = fields[0];
    if (!seen.insert(entry.image_id).second)
      throw FormatError("duplicate image_id: " + entry.image_id);
    entry.rgb_path = fs::path(fields[1]).is_absolute() ? fs::path(fields[1])
                                                       : base / fields[1];
    entry.depth_path = fs::path(fields[2]).is_absolute() ? fs::path(fields[2])
                                                         : base / fields[2];
    check_entry(entry);
    index.entries.push_back(std::move(entry));
  }
  index.train.resize(index.entries.size());
  for (std::size_t i = 0; i < index.train.size(); ++i) index.train[i] = i;
  return index;
}

DatasetIndex discover_dataset(const fs::path& root) {
  const fs::path rgb_dir = root / "rgb";
  const fs::path depth_dir = root / "depth";
  if (!fs::is_directory(rgb_dir) || !fs::is_directory(depth_dir))
    throw FormatError("dataset root needs rgb/ and depth/ directories: " +
                      root.string());

  std::map<std::string, fs::path> rgb_by_stem;
  for (const auto& de : fs::directory_iterator(rgb_dir))
    if (de.path().extension() == ".png")
      rgb_by_stem[de.path().stem().string()] = de.path();

  DatasetIndex index;
  for (const auto& de : fs::directory_iterator(depth_dir)) {
    if (de.path().extension() != ".png") continue;
    const auto it = rgb_by_stem.find(de.path().stem().string());
    if (it == rgb_by_stem.end()) continue;
    index.entries.push_back({it->first, it->second, de.path()});
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [](const DatasetEntry& a, const DatasetEntry& b) {
              return a.image_id < b.image_id;
            });
  index.train.resize(index.entries.size());
  for (std::size_t i = 0; i < index.train.size(); ++i) index.train[i] = i;
  return index;
}

DatasetIndex split_dataset(DatasetIndex index, double val_fraction,
                           std::uint64_t seed) {
  if (val_fraction < 0.0 || val_fraction > 1.0)
    throw ConfigError("val_fraction must lie in [0, 1]");
  const std::size_t n = index.entries.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  // Fisher-Yates over the pinned stream.
  SplitMix64 rng(seed);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  const auto n_val = static_cast<std::size_t>(
      std::llround(val_fraction * static_cast<double>(n)));
  index.val.assign(order.begin(), order.begin() + n_val);
  index.train.assign(order.begin() + n_val, order.end());
  return index;
}

LoadedPair load_entry(const DatasetEntry& entry, double unit_scale,
                      double max_depth) {
  LoadedPair pair{load_rgb(entry.rgb_path),
                  load_depth16(entry.depth_path, unit_scale, max_depth)};
  if (pair.rgb.height != pair.depth.height() || pair.rgb.width != pair.depth.width())
    throw ShapeError("entry '" + entry.image_id + "': rgb is " +
                     std::to_string(pair.rgb.width) + "x" +
                     std::to_string(pair.rgb.height) + ", depth is " +
                     std::to_string(pair.depth.width()) + "x" +
                     std::to_string(pair.depth.height()));
  return pair;
}

fs::path default_data_dir() {
  if (const char* env = std::getenv("DEPTHBENCH_DATA_DIR")) return fs::path(env);
  return fs::current_path();
}

}  // namespace depthbench::io
