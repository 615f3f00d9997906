#pragma once

#include <unordered_map>

#include "depthbench/depth_map.hpp"
#include "depthbench/nn/clb.hpp"
#include "depthbench/nn/graph.hpp"
#include "depthbench/nn/weights.hpp"

namespace depthbench::nn {

struct RunOptions {
  KernelPath path = KernelPath::optimized;
  bool collapse_clbs = true;
  double max_depth = kMaxDepthMeters;
};

namespace detail {

template <class Scalar>
TensorT<Scalar> fetch(const WeightStore& weights, const std::string& node_id,
                      const char* param, std::vector<Index> expected_shape) {
  const TensorF& raw = weights.get(node_id + "." + param);
  if (raw.shape() != expected_shape)
    throw ValidationError(node_id, std::string("weight '") + param + "' has shape " +
                                       raw.shape_string() + ", expected " +
                                       TensorT<float>(expected_shape).shape_string());
  if constexpr (std::is_same_v<Scalar, float>) return raw;
  else return raw.template cast<Scalar>();
}

template <class Scalar>
ClbBlockT<Scalar> bind_clb(const GraphNode& node, const ClbNodeParams& p,
                           Index in_channels, const WeightStore& weights) {
  ClbBlockT<Scalar> block;
  block.expand_kernel = fetch<Scalar>(
      weights, node.id, "expand_kernel",
      {p.expand_kernel, p.expand_kernel, in_channels, p.expand_channels});
  block.project_kernel = fetch<Scalar>(
      weights, node.id, "project_kernel",
      {p.project_kernel, p.project_kernel, p.expand_channels, p.out_channels});
  if (p.bias)
    block.project_bias = fetch<Scalar>(weights, node.id, "project_bias", {p.out_channels});
  block.residual = p.residual;
  return block;
}

}  // namespace detail

// Executes the graph on a single HxWxC input tensor. The node list is
// already topologically ordered (validate() enforces it), so execution is a
// single in-order sweep.
template <class Scalar>
TensorT<Scalar> run_graph_tensor(const GraphSpec& graph, const WeightStore& weights,
                                 const TensorT<Scalar>& input,
                                 const RunOptions& options = {}) {
  const std::vector<TensorShape> shapes = graph.validate();
  if (graph.inputs.size() != 1)
    throw ValidationError("exactly one graph input supported");
  if (graph.outputs.size() != 1)
    throw ValidationError("exactly one graph output supported");

  std::unordered_map<std::string, TensorT<Scalar>> computed;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    std::vector<const TensorT<Scalar>*> in;
    for (const auto& ref : node.inputs) in.push_back(&computed.at(ref));

    TensorT<Scalar> out;
    switch (node.kind) {
      case OpKind::input: {
        const auto& p = std::get<InputParams>(node.params);
        if (input.rank() != 3 || input.extent(0) != p.height ||
            input.extent(1) != p.width || input.extent(2) != p.channels)
          throw ValidationError(node.id, "input tensor is " + input.shape_string() +
                                             ", graph expects " +
                                             TensorShape{p.height, p.width, p.channels}.str());
        out = input;
        break;
      }
      case OpKind::conv2d: {
        const auto& p = std::get<Conv2dNodeParams>(node.params);
        const Index in_c = in[0]->extent(2);
        const TensorT<Scalar> kernel = detail::fetch<Scalar>(
            weights, node.id, "kernel", {p.kernel, p.kernel, in_c, p.out_channels});
        TensorT<Scalar> bias;
        if (p.bias)
          bias = detail::fetch<Scalar>(weights, node.id, "bias", {p.out_channels});
        ConvGeometry geom;
        geom.stride = p.stride;
        geom.dilation = p.dilation;
        if (p.same_pad)
          geom.pad = same_padding(in[0]->extent(0), in[0]->extent(1), p.kernel,
                                  p.kernel, p.stride, p.dilation);
        out = conv2d(*in[0], kernel, p.bias ? &bias : nullptr, geom, options.path);
        break;
      }
      case OpKind::depthwise_conv: {
        const auto& p = std::get<DepthwiseNodeParams>(node.params);
        const Index in_c = in[0]->extent(2);
        const TensorT<Scalar> kernel =
            detail::fetch<Scalar>(weights, node.id, "kernel", {p.kernel, p.kernel, in_c});
        Padding pad;
        if (p.same_pad)
          pad = same_padding(in[0]->extent(0), in[0]->extent(1), p.kernel, p.kernel,
                             p.stride, 1);
        out = depthwise_conv(*in[0], kernel, p.stride, pad, options.path);
        break;
      }
      case OpKind::relu:
        out = relu(*in[0]);
        break;
      case OpKind::hard_swish:
        out = hard_swish(*in[0]);
        break;
      case OpKind::hard_sigmoid:
        out = hard_sigmoid(*in[0]);
        break;
      case OpKind::se_block: {
        const auto& p = std::get<SeBlockNodeParams>(node.params);
        const Index ch = in[0]->extent(2);
        const auto squeeze_kernel = detail::fetch<Scalar>(
            weights, node.id, "squeeze_kernel", {1, 1, ch, p.squeeze_channels});
        const auto squeeze_bias =
            detail::fetch<Scalar>(weights, node.id, "squeeze_bias", {p.squeeze_channels});
        const auto excite_kernel = detail::fetch<Scalar>(
            weights, node.id, "excite_kernel", {1, 1, p.squeeze_channels, ch});
        const auto excite_bias =
            detail::fetch<Scalar>(weights, node.id, "excite_bias", {ch});
        out = se_block(*in[0], squeeze_kernel, squeeze_bias, excite_kernel,
                       excite_bias, options.path);
        break;
      }
      case OpKind::resize_nearest: {
        const auto& p = std::get<ResizeNodeParams>(node.params);
        if (p.scale > 0)
          out = resize_nearest_scale(*in[0], p.scale);
        else
          out = resize_nearest(*in[0], p.out_height, p.out_width);
        break;
      }
      case OpKind::resize_bilinear: {
        const auto& p = std::get<ResizeNodeParams>(node.params);
        out = resize_bilinear(*in[0], p.out_height, p.out_width);
        break;
      }
      case OpKind::concat:
        out = concat_channels(in);
        break;
      case OpKind::add:
        out = add(in);
        break;
      case OpKind::clb: {
        const auto& p = std::get<ClbNodeParams>(node.params);
        const auto block =
            detail::bind_clb<Scalar>(node, p, in[0]->extent(2), weights);
        out = options.collapse_clbs ? run_clb_collapsed(block, *in[0], options.path)
                                    : run_clb_expanded(block, *in[0], options.path);
        break;
      }
    }

    const TensorShape& expected = shapes[i];
    if (out.extent(0) != expected.height || out.extent(1) != expected.width ||
        out.extent(2) != expected.channels)
      throw ValidationError(node.id, "executed shape " + out.shape_string() +
                                         " contradicts inferred " + expected.str());
    computed.insert_or_assign(node.id, std::move(out));
  }
  return computed.at(graph.outputs.front());
}

// Full inference: RGB in, metric depth out. The output raster is the
// graph's HxWx1 result; pixels are valid where the value lies in
// (0, max_depth].
inline DepthMap run_graph(const GraphSpec& graph, const WeightStore& weights,
                          const RgbImage& image, const RunOptions& options = {}) {
  const TensorF result = run_graph_tensor(graph, weights, image.to_tensor(), options);
  if (result.rank() != 3 || result.extent(2) != 1)
    throw ValidationError(graph.outputs.empty() ? "" : graph.outputs.front(),
                          "graph output must be HxWx1, got " + result.shape_string());
  const Index h = result.extent(0), w = result.extent(1);
  DepthMap depth(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const double v = static_cast<double>(result.at(y, x, 0));
      depth.values(y, x) = v;
      depth.valid(y, x) = v > 0.0 && v <= options.max_depth;
    }
  return depth;
}

}  // namespace depthbench::nn
