#pragma once

#include <cstdint>

#include "depthbench/nn/graph.hpp"
#include "depthbench/nn/weights.hpp"

namespace depthbench::nn {

// Reference lightweight depth network: VGA input downscaled to 160x128,
// a three-stage stride-2 encoder (widths 16/24/48) stopped at 1/8 of the
// internal resolution, a decoder of collapsible linear blocks (48->24->16->8)
// with two skip concatenations, a one-channel head, and a final x10 nearest
// upsample from 64x48 back to 640x480.
GraphSpec build_tcl_tiny();

// Deterministic fan-in-scaled normal initialization for every parameter a
// graph binds. Usable with any graph, not just the reference one.
WeightStore random_weights(const GraphSpec& graph, std::uint64_t seed);

// Same parameter inventory, all zeros.
WeightStore zero_weights(const GraphSpec& graph);

}  // namespace depthbench::nn
