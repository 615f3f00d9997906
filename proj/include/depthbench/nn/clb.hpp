#pragma once

#include "depthbench/nn/kernels.hpp"

namespace depthbench::nn {

// Collapsible linear block: an expand convolution followed by a project
// convolution with no nonlinearity in between, so the pair folds into a
// single kernel at inference time.
//
// Execution semantics (pinned so the folded and two-pass forms agree
// exactly): stride 1; the input is zero-padded once for the composed kernel
// extent k1+k2-1, then both convolutions run unpadded. The expand stage
// carries no bias; the optional residual adds the block input and requires
// matching channel counts.
template <class Scalar>
struct ClbBlockT {
  TensorT<Scalar> expand_kernel;   // k1 x k1 x Cin x E
  TensorT<Scalar> project_kernel;  // k2 x k2 x E x Cout
  TensorT<Scalar> project_bias;    // Cout, may be empty
  bool residual = false;
  bool interior_activation = false;  // blocks collapse when set

  Index in_channels() const { return expand_kernel.extent(2); }
  Index expand_channels() const { return expand_kernel.extent(3); }
  Index out_channels() const { return project_kernel.extent(3); }
  Index composed_kernel() const {
    return expand_kernel.extent(0) + project_kernel.extent(0) - 1;
  }

  void check() const {
    if (expand_kernel.rank() != 4 || project_kernel.rank() != 4)
      throw ShapeError("clb kernels must be rank-4");
    if (expand_kernel.extent(0) != expand_kernel.extent(1) ||
        project_kernel.extent(0) != project_kernel.extent(1))
      throw ShapeError("clb kernels must be square");
    if (expand_kernel.extent(3) != project_kernel.extent(2))
      throw ShapeError("clb expand/project channel mismatch");
    if (project_bias.size() != 0 && project_bias.size() != out_channels())
      throw ShapeError("clb bias length mismatch");
    if (residual && in_channels() != out_channels())
      throw ShapeError("clb residual requires matching channels");
  }
};

using ClbBlock = ClbBlockT<float>;

struct CollapsedClbShape {
  Index kernel_extent;
};

template <class Scalar>
struct CollapsedClbT {
  TensorT<Scalar> kernel;  // kc x kc x Cin x Cout
  TensorT<Scalar> bias;    // Cout, may be empty
};

// Folds the two kernels into one by correlation composition:
//   K[k] = sum_{a+b=k} sum_e We[a][.][e] * Wp[b][e][.]
// Exact for the block's padded-once execution.
template <class Scalar>
CollapsedClbT<Scalar> collapse_clb(const ClbBlockT<Scalar>& block) {
  block.check();
  if (block.interior_activation)
    throw NotCollapsibleError("block has an interior nonlinearity");
  const Index k1 = block.expand_kernel.extent(0);
  const Index k2 = block.project_kernel.extent(0);
  const Index kc = k1 + k2 - 1;
  const Index cin = block.in_channels();
  const Index mid = block.expand_channels();
  const Index cout = block.out_channels();

  CollapsedClbT<Scalar> folded;
  folded.kernel = TensorT<Scalar>({kc, kc, cin, cout});
  for (Index ay = 0; ay < k1; ++ay)
    for (Index ax = 0; ax < k1; ++ax)
      for (Index by = 0; by < k2; ++by)
        for (Index bx = 0; bx < k2; ++bx)
          for (Index i = 0; i < cin; ++i)
            for (Index o = 0; o < cout; ++o) {
              double acc = 0.0;
              for (Index e = 0; e < mid; ++e)
                acc += static_cast<double>(block.expand_kernel.at(ay, ax, i, e)) *
                       static_cast<double>(block.project_kernel.at(by, bx, e, o));
              folded.kernel.at(ay + by, ax + bx, i, o) += static_cast<Scalar>(acc);
            }
  folded.bias = block.project_bias;
  return folded;
}

namespace detail {

template <class Scalar>
Padding clb_padding(const ClbBlockT<Scalar>& block) {
  const Index kc = block.composed_kernel();
  const Index lo = (kc - 1) / 2;
  return Padding{lo, lo, kc - 1 - lo, kc - 1 - lo};
}

}  // namespace detail

// Runs the block in its expanded two-pass form.
template <class Scalar>
TensorT<Scalar> run_clb_expanded(const ClbBlockT<Scalar>& block,
                                 const TensorT<Scalar>& input,
                                 KernelPath path = KernelPath::optimized) {
  block.check();
  const Padding pad = detail::clb_padding(block);
  ConvGeometry outer;
  outer.pad = pad;
  TensorT<Scalar> mid = conv2d(input, block.expand_kernel,
                               static_cast<const TensorT<Scalar>*>(nullptr), outer, path);
  const TensorT<Scalar>* bias =
      block.project_bias.size() ? &block.project_bias : nullptr;
  TensorT<Scalar> out = conv2d(mid, block.project_kernel, bias, {}, path);
  if (block.residual) out = add<Scalar>({&out, &input});
  return out;
}

// Runs the block through its folded kernel.
template <class Scalar>
TensorT<Scalar> run_clb_collapsed(const ClbBlockT<Scalar>& block,
                                  const TensorT<Scalar>& input,
                                  KernelPath path = KernelPath::optimized) {
  const CollapsedClbT<Scalar> folded = collapse_clb(block);
  ConvGeometry geom;
  geom.pad = detail::clb_padding(block);
  const TensorT<Scalar>* bias = folded.bias.size() ? &folded.bias : nullptr;
  TensorT<Scalar> out = conv2d(input, folded.kernel, bias, geom, path);
  if (block.residual) out = add<Scalar>({&out, &input});
  return out;
}

// Multiply counts per inference at spatial extent h x w.
template <class Scalar>
long long clb_expanded_madds(const ClbBlockT<Scalar>& block, Index h, Index w) {
  const long long k1 = block.expand_kernel.extent(0);
  const long long k2 = block.project_kernel.extent(0);
  return static_cast<long long>(h) * w *
         (k1 * k1 * block.in_channels() * block.expand_channels() +
          k2 * k2 * block.expand_channels() * block.out_channels());
}

template <class Scalar>
long long clb_collapsed_madds(const ClbBlockT<Scalar>& block, Index h, Index w) {
  const long long kc = block.composed_kernel();
  return static_cast<long long>(h) * w * kc * kc * block.in_channels() *
         block.out_channels();
}

}  // namespace depthbench::nn
