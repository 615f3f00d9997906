#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "depthbench/nn/kernels.hpp"

namespace depthbench::nn {

enum class OpKind {
  input,
  conv2d,
  depthwise_conv,
  relu,
  hard_swish,
  hard_sigmoid,
  se_block,
  resize_nearest,
  resize_bilinear,
  concat,
  add,
  clb,
};

const char* op_kind_name(OpKind kind);
OpKind op_kind_from_name(const std::string& name);  // throws ValidationError

struct InputParams {
  Index height = 0, width = 0, channels = 0;
};
struct Conv2dNodeParams {
  Index out_channels = 0;
  Index kernel = 1;
  Index stride = 1;
  Index dilation = 1;
  bool same_pad = true;  // false = valid
  bool bias = true;
};
struct DepthwiseNodeParams {
  Index kernel = 3;
  Index stride = 1;
  bool same_pad = true;
};
struct SeBlockNodeParams {
  Index squeeze_channels = 0;
};
struct ResizeNodeParams {
  Index scale = 0;  // either a positive integer scale...
  Index out_height = 0, out_width = 0;  // ...or an explicit target size
};
struct ClbNodeParams {
  Index expand_channels = 0;
  Index expand_kernel = 1;
  Index out_channels = 0;
  Index project_kernel = 3;
  bool residual = false;
  bool bias = true;
};
struct NoParams {};

using NodeParams = std::variant<NoParams, InputParams, Conv2dNodeParams,
                                DepthwiseNodeParams, SeBlockNodeParams,
                                ResizeNodeParams, ClbNodeParams>;

struct TensorShape {
  Index height = 0, width = 0, channels = 0;
  bool operator==(const TensorShape&) const = default;
  std::string str() const {
    return std::to_string(height) + "x" + std::to_string(width) + "x" +
           std::to_string(channels);
  }
};

struct GraphNode {
  std::string id;
  OpKind kind = OpKind::input;
  NodeParams params;
  std::vector<std::string> inputs;
  std::optional<TensorShape> declared_shape;  // checked by shape inference
};

// Declarative inference network: an ordered node list where every input id
// refers to an earlier node, i.e. the list is already a topological order.
struct GraphSpec {
  std::string name;
  std::vector<GraphNode> nodes;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const GraphNode& node(const std::string& id) const;
  Index node_index(const std::string& id) const;  // throws ValidationError

  // Structural validation + full shape inference. Throws ValidationError
  // naming the offending node. Returns one shape per node, in node order.
  std::vector<TensorShape> validate() const;
};

// JSON serialization ("depthbench-graph/1" schema). Unknown op kinds and
// unknown parameter keys fail validation.
GraphSpec graph_from_json(const std::string& text);
GraphSpec load_graph(const std::filesystem::path& path);
std::string graph_to_json(const GraphSpec& graph);
void save_graph(const GraphSpec& graph, const std::filesystem::path& path);

}  // namespace depthbench::nn
