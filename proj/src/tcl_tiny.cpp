#include "depthbench/nn/tcl_tiny.hpp"

#include <cmath>

#include "depthbench/rng.hpp"

namespace depthbench::nn {

namespace {

GraphNode make(std::string id, OpKind kind, NodeParams params,
               std::vector<std::string> inputs,
               std::optional<TensorShape> shape = std::nullopt) {
  GraphNode node;
  node.id = std::move(id);
  node.kind = kind;
  node.params = std::move(params);
  node.inputs = std::move(inputs);
  node.declared_shape = shape;
  return node;
}

Conv2dNodeParams conv(Index out_c, Index kernel, Index stride = 1) {
  Conv2dNodeParams p;
  p.out_channels = out_c;
  p.kernel = kernel;
  p.stride = stride;
  return p;
}

DepthwiseNodeParams dw(Index kernel, Index stride) {
  DepthwiseNodeParams p;
  p.kernel = kernel;
  p.stride = stride;
  return p;
}

ClbNodeParams clb(Index expand_c, Index out_c) {
  ClbNodeParams p;
  p.expand_channels = expand_c;
  p.expand_kernel = 1;
  p.out_channels = out_c;
  p.project_kernel = 3;
  return p;
}

ResizeNodeParams resize_to(Index h, Index w) {
  ResizeNodeParams p;
  p.out_height = h;
  p.out_width = w;
  return p;
}

ResizeNodeParams upscale(Index scale) {
  ResizeNodeParams p;
  p.scale = scale;
  return p;
}

}  // namespace

GraphSpec build_tcl_tiny() {
  GraphSpec g;
  g.name = "tcl-tiny";
  g.inputs = {"input"};
  g.outputs = {"depth"};

  auto& n = g.nodes;
  n.push_back(make("input", OpKind::input, InputParams{480, 640, 3}, {}));
  n.push_back(make("down", OpKind::resize_bilinear, resize_to(128, 160), {"input"},
                   TensorShape{128, 160, 3}));

  n.push_back(make("stem", OpKind::conv2d, conv(16, 3), {"down"}));
  n.push_back(make("stem_act", OpKind::hard_swish, NoParams{}, {"stem"}));

  // Encoder: three stride-2 stages, widths 16/24/48.
  n.push_back(make("enc1_dw", OpKind::depthwise_conv, dw(3, 2), {"stem_act"}));
  n.push_back(make("enc1_act", OpKind::relu, NoParams{}, {"enc1_dw"}));
  n.push_back(make("enc1_pw", OpKind::conv2d, conv(16, 1), {"enc1_act"}));
  n.push_back(make("enc1_se", OpKind::se_block, SeBlockNodeParams{4}, {"enc1_pw"},
                   TensorShape{64, 80, 16}));

  n.push_back(make("enc2_dw", OpKind::depthwise_conv, dw(3, 2), {"enc1_se"}));
  n.push_back(make("enc2_act", OpKind::hard_swish, NoParams{}, {"enc2_dw"}));
  n.push_back(make("enc2_pw", OpKind::conv2d, conv(24, 1), {"enc2_act"}));
  n.push_back(make("enc2b_dw", OpKind::depthwise_conv, dw(3, 1), {"enc2_pw"}));
  n.push_back(make("enc2b_act", OpKind::hard_swish, NoParams{}, {"enc2b_dw"}));
  n.push_back(make("enc2b_pw", OpKind::conv2d, conv(24, 1), {"enc2b_act"}));
  n.push_back(make("enc2_res", OpKind::add, NoParams{}, {"enc2_pw", "enc2b_pw"},
                   TensorShape{32, 40, 24}));

  n.push_back(make("enc3_dw", OpKind::depthwise_conv, dw(3, 2), {"enc2_res"}));
  n.push_back(make("enc3_act", OpKind::hard_swish, NoParams{}, {"enc3_dw"}));
  n.push_back(make("enc3_pw", OpKind::conv2d, conv(48, 1), {"enc3_act"}));
  n.push_back(make("enc3_se", OpKind::se_block, SeBlockNodeParams{12}, {"enc3_pw"},
                   TensorShape{16, 20, 48}));

  // Decoder: collapsible blocks 48->24->16->8 with skip concatenations.
  n.push_back(make("dec1", OpKind::clb, clb(96, 24), {"enc3_se"}));
  n.push_back(make("dec1_up", OpKind::resize_nearest, upscale(2), {"dec1"}));
  n.push_back(make("skip2", OpKind::concat, NoParams{}, {"dec1_up", "enc2_res"},
                   TensorShape{32, 40, 48}));
  n.push_back(make("dec2", OpKind::clb, clb(96, 16), {"skip2"}));
  n.push_back(make("dec2_up", OpKind::resize_nearest, upscale(2), {"dec2"}));
  n.push_back(make("skip1", OpKind::concat, NoParams{}, {"dec2_up", "enc1_se"},
                   TensorShape{64, 80, 32}));
  n.push_back(make("dec3", OpKind::clb, clb(64, 8), {"skip1"}));
  n.push_back(make("dec_resize", OpKind::resize_bilinear, resize_to(48, 64), {"dec3"},
                   TensorShape{48, 64, 8}));

  n.push_back(make("head", OpKind::conv2d, conv(1, 1), {"dec_resize"}));
  n.push_back(make("head_relu", OpKind::relu, NoParams{}, {"head"},
                   TensorShape{48, 64, 1}));
  n.push_back(make("depth", OpKind::resize_nearest, upscale(10), {"head_relu"},
                   TensorShape{480, 640, 1}));

  g.validate();
  return g;
}

namespace {

TensorF normal_tensor(SplitMix64& rng, std::vector<Index> shape, double scale) {
  TensorF t(std::move(shape));
  for (Index i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(scale * rng.next_normal());
  return t;
}

// Emits every parameter tensor a node binds, in node order, so the stream
// consumption is reproducible.
void init_node(const GraphNode& node, Index in_channels, SplitMix64& rng,
               double scale, WeightStore& store) {
  const auto name = [&](const char* param) { return node.id + "." + param; };
  switch (node.kind) {
    case OpKind::conv2d: {
      const auto& p = std::get<Conv2dNodeParams>(node.params);
      const double s = scale / std::sqrt(static_cast<double>(p.kernel * p.kernel * in_channels));
      store.add(name("kernel"),
                normal_tensor(rng, {p.kernel, p.kernel, in_channels, p.out_channels}, s));
      if (p.bias) store.add(name("bias"), normal_tensor(rng, {p.out_channels}, 0.05));
      break;
    }
    case OpKind::depthwise_conv: {
      const auto& p = std::get<DepthwiseNodeParams>(node.params);
      const double s = scale / std::sqrt(static_cast<double>(p.kernel * p.kernel));
      store.add(name("kernel"), normal_tensor(rng, {p.kernel, p.kernel, in_channels}, s));
      break;
    }
    case OpKind::se_block: {
      const auto& p = std::get<SeBlockNodeParams>(node.params);
      store.add(name("squeeze_kernel"),
                normal_tensor(rng, {1, 1, in_channels, p.squeeze_channels},
                              scale / std::sqrt(static_cast<double>(in_channels))));
      store.add(name("squeeze_bias"), normal_tensor(rng, {p.squeeze_channels}, 0.05));
      store.add(name("excite_kernel"),
                normal_tensor(rng, {1, 1, p.squeeze_channels, in_channels},
                              scale / std::sqrt(static_cast<double>(p.squeeze_channels))));
      store.add(name("excite_bias"), normal_tensor(rng, {in_channels}, 0.05));
      break;
    }
    case OpKind::clb: {
      const auto& p = std::get<ClbNodeParams>(node.params);
      store.add(name("expand_kernel"),
                normal_tensor(rng,
                              {p.expand_kernel, p.expand_kernel, in_channels,
                               p.expand_channels},
                              scale / std::sqrt(static_cast<double>(
                                          p.expand_kernel * p.expand_kernel * in_channels))));
      store.add(name("project_kernel"),
                normal_tensor(rng,
                              {p.project_kernel, p.project_kernel, p.expand_channels,
                               p.out_channels},
                              scale / std::sqrt(static_cast<double>(
                                          p.project_kernel * p.project_kernel *
                                          p.expand_channels))));
      if (p.bias) store.add(name("project_bias"), normal_tensor(rng, {p.out_channels}, 0.05));
      break;
    }
    default:
      break;
  }
}

WeightStore init_weights(const GraphSpec& graph, std::uint64_t seed, double scale) {
  const std::vector<TensorShape> shapes = graph.validate();
  SplitMix64 rng(seed);
  WeightStore store;
  for (const auto& node : graph.nodes) {
    Index in_channels = 0;
    if (!node.inputs.empty())
      in_channels = shapes[static_cast<std::size_t>(graph.node_index(node.inputs[0]))].channels;
    init_node(node, in_channels, rng, scale, store);
  }
  return store;
}

}  // namespace

WeightStore random_weights(const GraphSpec& graph, std::uint64_t seed) {
  return init_weights(graph, seed, 1.0);
}

WeightStore zero_weights(const GraphSpec& graph) {
  WeightStore store = init_weights(graph, 0, 1.0);
  for (auto& [name, tensor] : store.tensors()) tensor.array() = 0.0f;
  return store;
}

}  // namespace depthbench::nn
