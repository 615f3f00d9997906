// Generates self-contained demo assets: the reference graph, seeded random
// weights, and a synthetic RGB/depth pair to exercise the CLI end to end.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "depthbench/io/png_io.hpp"
#include "depthbench/nn/tcl_tiny.hpp"

namespace fs = std::filesystem;
using namespace depthbench;

namespace {

RgbImage synthetic_rgb(Index height, Index width) {
  RgbImage image(height, width);
  for (Index y = 0; y < height; ++y)
    for (Index x = 0; x < width; ++x) {
      image.at(y, x, 0) = static_cast<float>(x) / static_cast<float>(width - 1);
      image.at(y, x, 1) = static_cast<float>(y) / static_cast<float>(height - 1);
      image.at(y, x, 2) =
          0.5f + 0.5f * std::sin(static_cast<float>(x + y) * 0.05f);
    }
  return image;
}

DepthMap synthetic_depth(Index height, Index width) {
  DepthMap depth(height, width);
  for (Index y = 0; y < height; ++y)
    for (Index x = 0; x < width; ++x) {
      // A sloped floor plane with a band of missing readings.
      const double d =
          2.0 + 30.0 * static_cast<double>(y) / static_cast<double>(height);
      const bool hole = (x / 40) % 7 == 3 && (y / 30) % 5 == 2;
      depth.values(y, x) = d;
      depth.valid(y, x) = !hole;
    }
  return depth;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"write depthbench demo assets"};
  std::string out_dir = "demo";
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "weight initialization seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(fs::path(out_dir) / "sample");

    const nn::GraphSpec graph = nn::build_tcl_tiny();
    nn::save_graph(graph, fs::path(out_dir) / "tcl_tiny.json");
    nn::save_weights(nn::random_weights(graph, seed),
                     fs::path(out_dir) / "tcl_tiny.dbw");

    io::save_rgb(synthetic_rgb(480, 640), fs::path(out_dir) / "sample" / "scene.png");
    io::save_depth16(synthetic_depth(480, 640),
                     fs::path(out_dir) / "sample" / "scene_depth.png");

    std::cout << "wrote " << out_dir << "/tcl_tiny.json, tcl_tiny.dbw, sample/\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
