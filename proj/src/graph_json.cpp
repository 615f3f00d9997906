#include "depthbench/nn/graph.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace depthbench::nn {

namespace {

using nlohmann::json;

constexpr const char* kGraphSchema = "depthbench-graph/1";

const std::map<std::string, OpKind>& op_name_table() {
  static const std::map<std::string, OpKind> table = {
      {"input", OpKind::input},
      {"conv2d", OpKind::conv2d},
      {"depthwise_conv", OpKind::depthwise_conv},
      {"relu", OpKind::relu},
      {"hard_swish", OpKind::hard_swish},
      {"hard_sigmoid", OpKind::hard_sigmoid},
      {"se_block", OpKind::se_block},
      {"resize_nearest", OpKind::resize_nearest},
      {"resize_bilinear", OpKind::resize_bilinear},
      {"concat", OpKind::concat},
      {"add", OpKind::add},
      {"clb", OpKind::clb},
  };
  return table;
}

Index expect_arity(const GraphNode& node, Index lo, Index hi) {
  const Index n = static_cast<Index>(node.inputs.size());
  if (n < lo || (hi >= 0 && n > hi))
    throw ValidationError(node.id, "expects " + std::to_string(lo) +
                                       (hi == lo ? "" : "+") + " input(s), got " +
                                       std::to_string(n));
  return n;
}

TensorShape require_same_spatial(const GraphNode& node,
                                 const std::vector<TensorShape>& in_shapes) {
  for (const auto& s : in_shapes)
    if (s.height != in_shapes[0].height || s.width != in_shapes[0].width)
      throw ValidationError(node.id, "inputs differ in spatial extents");
  return in_shapes[0];
}

TensorShape infer_node_shape(const GraphNode& node,
                             const std::vector<TensorShape>& in_shapes) {
  switch (node.kind) {
    case OpKind::input: {
      expect_arity(node, 0, 0);
      const auto& p = std::get<InputParams>(node.params);
      if (p.height < 1 || p.width < 1 || p.channels < 1)
        throw ValidationError(node.id, "input extents must be positive");
      return {p.height, p.width, p.channels};
    }
    case OpKind::conv2d: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<Conv2dNodeParams>(node.params);
      const auto& in = in_shapes[0];
      if (p.out_channels < 1) throw ValidationError(node.id, "out_channels must be >= 1");
      if (p.stride < 1 || p.dilation < 1)
        throw ValidationError(node.id, "stride and dilation must be >= 1");
      Padding pad;
      if (p.same_pad)
        pad = same_padding(in.height, in.width, p.kernel, p.kernel, p.stride, p.dilation);
      try {
        return {conv_out_extent(in.height, p.kernel, p.stride, p.dilation, pad.top, pad.bottom),
                conv_out_extent(in.width, p.kernel, p.stride, p.dilation, pad.left, pad.right),
                p.out_channels};
      } catch (const ShapeError& e) {
        throw ValidationError(node.id, e.what());
      }
    }
    case OpKind::depthwise_conv: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<DepthwiseNodeParams>(node.params);
      const auto& in = in_shapes[0];
      Padding pad;
      if (p.same_pad)
        pad = same_padding(in.height, in.width, p.kernel, p.kernel, p.stride, 1);
      try {
        return {conv_out_extent(in.height, p.kernel, p.stride, 1, pad.top, pad.bottom),
                conv_out_extent(in.width, p.kernel, p.stride, 1, pad.left, pad.right),
                in.channels};
      } catch (const ShapeError& e) {
        throw ValidationError(node.id, e.what());
      }
    }
    case OpKind::relu:
    case OpKind::hard_swish:
    case OpKind::hard_sigmoid:
      expect_arity(node, 1, 1);
      return in_shapes[0];
    case OpKind::se_block: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<SeBlockNodeParams>(node.params);
      if (p.squeeze_channels < 1)
        throw ValidationError(node.id, "squeeze_channels must be >= 1");
      return in_shapes[0];
    }
    case OpKind::resize_nearest: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<ResizeNodeParams>(node.params);
      const auto& in = in_shapes[0];
      if (p.scale > 0) {
        if (p.out_height > 0 || p.out_width > 0)
          throw ValidationError(node.id, "give either scale or a target size");
        return {in.height * p.scale, in.width * p.scale, in.channels};
      }
      if (p.out_height < 1 || p.out_width < 1)
        throw ValidationError(node.id, "resize target must be positive");
      return {p.out_height, p.out_width, in.channels};
    }
    case OpKind::resize_bilinear: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<ResizeNodeParams>(node.params);
      if (p.out_height < 1 || p.out_width < 1)
        throw ValidationError(node.id, "resize target must be positive");
      return {p.out_height, p.out_width, in_shapes[0].channels};
    }
    case OpKind::concat: {
      expect_arity(node, 1, -1);
      TensorShape out = require_same_spatial(node, in_shapes);
      out.channels = 0;
      for (const auto& s : in_shapes) out.channels += s.channels;
      return out;
    }
    case OpKind::add: {
      expect_arity(node, 2, -1);
      for (const auto& s : in_shapes)
        if (!(s == in_shapes[0]))
          throw ValidationError(node.id, "add inputs must share shape");
      return in_shapes[0];
    }
    case OpKind::clb: {
      expect_arity(node, 1, 1);
      const auto& p = std::get<ClbNodeParams>(node.params);
      const auto& in = in_shapes[0];
      if (p.expand_channels < 1 || p.out_channels < 1)
        throw ValidationError(node.id, "clb channel counts must be >= 1");
      if (p.expand_kernel < 1 || p.project_kernel < 1)
        throw ValidationError(node.id, "clb kernel extents must be >= 1");
      if (p.residual && in.channels != p.out_channels)
        throw ValidationError(node.id, "clb residual requires matching channels");
      return {in.height, in.width, p.out_channels};
    }
  }
  throw ValidationError(node.id, "unhandled op kind");
}

void check_keys(const json& object, const std::set<std::string>& allowed,
                const std::string& node_id) {
  for (const auto& [key, value] : object.items())
    if (!allowed.count(key))
      throw ValidationError(node_id, "unknown key '" + key + "'");
}

Index get_index(const json& params, const char* key, Index fallback) {
  if (!params.contains(key)) return fallback;
  return static_cast<Index>(params.at(key).get<long long>());
}

bool get_bool(const json& params, const char* key, bool fallback) {
  if (!params.contains(key)) return fallback;
  return params.at(key).get<bool>();
}

bool parse_padding(const json& params, const std::string& node_id) {
  if (!params.contains("padding")) return true;
  const std::string mode = params.at("padding").get<std::string>();
  if (mode == "same") return true;
  if (mode == "valid") return false;
  throw ValidationError(node_id, "padding must be 'same' or 'valid'");
}

NodeParams parse_params(OpKind kind, const json& params, const std::string& node_id) {
  switch (kind) {
    case OpKind::input:
      check_keys(params, {"height", "width", "channels"}, node_id);
      return InputParams{get_index(params, "height", 0), get_index(params, "width", 0),
                         get_index(params, "channels", 0)};
    case OpKind::conv2d: {
      check_keys(params, {"out_channels", "kernel", "stride", "dilation", "padding", "bias"},
                 node_id);
      Conv2dNodeParams p;
      p.out_channels = get_index(params, "out_channels", 0);
      p.kernel = get_index(params, "kernel", 1);
      p.stride = get_index(params, "stride", 1);
      p.dilation = get_index(params, "dilation", 1);
      p.same_pad = parse_padding(params, node_id);
      p.bias = get_bool(params, "bias", true);
      return p;
    }
    case OpKind::depthwise_conv: {
      check_keys(params, {"kernel", "stride", "padding"}, node_id);
      DepthwiseNodeParams p;
      p.kernel = get_index(params, "kernel", 3);
      p.stride = get_index(params, "stride", 1);
      p.same_pad = parse_padding(params, node_id);
      return p;
    }
    case OpKind::se_block:
      check_keys(params, {"squeeze_channels"}, node_id);
      return SeBlockNodeParams{get_index(params, "squeeze_channels", 0)};
    case OpKind::resize_nearest: {
      check_keys(params, {"scale", "out_height", "out_width"}, node_id);
      ResizeNodeParams p;
      p.scale = get_index(params, "scale", 0);
      p.out_height = get_index(params, "out_height", 0);
      p.out_width = get_index(params, "out_width", 0);
      return p;
    }
    case OpKind::resize_bilinear: {
      check_keys(params, {"out_height", "out_width"}, node_id);
      ResizeNodeParams p;
      p.out_height = get_index(params, "out_height", 0);
      p.out_width = get_index(params, "out_width", 0);
      return p;
    }
    case OpKind::clb: {
      check_keys(params,
                 {"expand_channels", "expand_kernel", "out_channels", "project_kernel",
                  "residual", "bias"},
                 node_id);
      ClbNodeParams p;
      p.expand_channels = get_index(params, "expand_channels", 0);
      p.expand_kernel = get_index(params, "expand_kernel", 1);
      p.out_channels = get_index(params, "out_channels", 0);
      p.project_kernel = get_index(params, "project_kernel", 3);
      p.residual = get_bool(params, "residual", false);
      p.bias = get_bool(params, "bias", true);
      return p;
    }
    case OpKind::relu:
    case OpKind::hard_swish:
    case OpKind::hard_sigmoid:
    case OpKind::concat:
    case OpKind::add:
      check_keys(params, {}, node_id);
      return NoParams{};
  }
  throw ValidationError(node_id, "unhandled op kind");
}

json params_to_json(const GraphNode& node) {
  json j = json::object();
  switch (node.kind) {
    case OpKind::input: {
      const auto& p = std::get<InputParams>(node.params);
      j = {{"height", p.height}, {"width", p.width}, {"channels", p.channels}};
      break;
    }
    case OpKind::conv2d: {
      const auto& p = std::get<Conv2dNodeParams>(node.params);
      j = {{"out_channels", p.out_channels}, {"kernel", p.kernel},
           {"stride", p.stride},             {"dilation", p.dilation},
           {"padding", p.same_pad ? "same" : "valid"}, {"bias", p.bias}};
      break;
    }
    case OpKind::depthwise_conv: {
      const auto& p = std::get<DepthwiseNodeParams>(node.params);
      j = {{"kernel", p.kernel},
           {"stride", p.stride},
           {"padding", p.same_pad ? "same" : "valid"}};
      break;
    }
    case OpKind::se_block:
      j = {{"squeeze_channels", std::get<SeBlockNodeParams>(node.params).squeeze_channels}};
      break;
    case OpKind::resize_nearest: {
      const auto& p = std::get<ResizeNodeParams>(node.params);
      if (p.scale > 0)
        j = {{"scale", p.scale}};
      else
        j = {{"out_height", p.out_height}, {"out_width", p.out_width}};
      break;
    }
    case OpKind::resize_bilinear: {
      const auto& p = std::get<ResizeNodeParams>(node.params);
      j = {{"out_height", p.out_height}, {"out_width", p.out_width}};
      break;
    }
    case OpKind::clb: {
      const auto& p = std::get<ClbNodeParams>(node.params);
      j = {{"expand_channels", p.expand_channels}, {"expand_kernel", p.expand_kernel},
           {"out_channels", p.out_channels},       {"project_kernel", p.project_kernel},
           {"residual", p.residual},               {"bias", p.bias}};
      break;
    }
    default:
      break;
  }
  return j;
}

}  // namespace

const char* op_kind_name(OpKind kind) {
  for (const auto& [name, k] : op_name_table())
    if (k == kind) return name.c_str();
  return "?";
}

OpKind op_kind_from_name(const std::string& name) {
  const auto& table = op_name_table();
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("unknown op kind '" + name + "'");
  return it->second;
}

const GraphNode& GraphSpec::node(const std::string& id) const {
  return nodes[static_cast<std::size_t>(node_index(id))];
}

Index GraphSpec::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].id == id) return static_cast<Index>(i);
  throw ValidationError(id, "node not found");
}

std::vector<TensorShape> GraphSpec::validate() const {
  if (nodes.empty()) throw ValidationError("graph has no nodes");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.id.empty()) throw ValidationError("node with empty id");
    if (!index.emplace(node.id, i).second)
      throw ValidationError(node.id, "duplicate node id");
  }

  const std::unordered_set<std::string> declared_inputs(inputs.begin(), inputs.end());
  std::vector<TensorShape> shapes(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if ((node.kind == OpKind::input) != declared_inputs.count(node.id))
      throw ValidationError(node.id, "input nodes and graph inputs must coincide");
    std::vector<TensorShape> in_shapes;
    for (const auto& ref : node.inputs) {
      const auto it = index.find(ref);
      if (it == index.end())
        throw ValidationError(node.id, "references unknown node '" + ref + "'");
      if (it->second >= i)
        throw ValidationError(node.id, "input '" + ref + "' is not defined before use");
      in_shapes.push_back(shapes[it->second]);
    }
    shapes[i] = infer_node_shape(node, in_shapes);
    if (node.declared_shape && !(*node.declared_shape == shapes[i]))
      throw ValidationError(node.id, "inferred shape " + shapes[i].str() +
                                         " contradicts declared shape " +
                                         node.declared_shape->str());
  }

  if (outputs.empty()) throw ValidationError("graph declares no outputs");
  for (const auto& id : outputs)
    if (!index.count(id)) throw ValidationError(id, "declared output not found");
  return shapes;
}

GraphSpec graph_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("graph JSON parse error: ") + e.what());
  }
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kGraphSchema)
    throw FormatError("graph schema marker missing or unsupported");

  GraphSpec graph;
  graph.name = j.value("name", "");
  for (const auto& id : j.value("inputs", json::array()))
    graph.inputs.push_back(id.get<std::string>());
  for (const auto& id : j.value("outputs", json::array()))
    graph.outputs.push_back(id.get<std::string>());

  for (const auto& jn : j.value("nodes", json::array())) {
    GraphNode node;
    node.id = jn.value("id", "");
    check_keys(jn, {"id", "op", "params", "inputs", "shape"}, node.id);
    node.kind = op_kind_from_name(jn.value("op", ""));
    node.params = parse_params(node.kind, jn.value("params", json::object()), node.id);
    for (const auto& ref : jn.value("inputs", json::array()))
      node.inputs.push_back(ref.get<std::string>());
    if (jn.contains("shape")) {
      const auto& s = jn.at("shape");
      if (!s.is_array() || s.size() != 3)
        throw ValidationError(node.id, "shape must be [height, width, channels]");
      node.declared_shape = TensorShape{static_cast<Index>(s[0].get<long long>()),
                                        static_cast<Index>(s[1].get<long long>()),
                                        static_cast<Index>(s[2].get<long long>())};
    }
    graph.nodes.push_back(std::move(node));
  }
  graph.validate();
  return graph;
}

GraphSpec load_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open graph file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return graph_from_json(buffer.str());
}

std::string graph_to_json(const GraphSpec& graph) {
  json j;
  j["schema"] = kGraphSchema;
  j["name"] = graph.name;
  j["inputs"] = graph.inputs;
  j["outputs"] = graph.outputs;
  auto& nodes = j["nodes"] = json::array();
  for (const auto& node : graph.nodes) {
    json jn;
    jn["id"] = node.id;
    jn["op"] = op_kind_name(node.kind);
    if (!node.inputs.empty()) jn["inputs"] = node.inputs;
    const json params = params_to_json(node);
    if (!params.empty()) jn["params"] = params;
    if (node.declared_shape)
      jn["shape"] = {node.declared_shape->height, node.declared_shape->width,
                     node.declared_shape->channels};
    nodes.push_back(std::move(jn));
  }
  return j.dump(2) + "\n";
}

void save_graph(const GraphSpec& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write graph file: " + path.string());
  out << graph_to_json(graph);
}

}  // namespace depthbench::nn
