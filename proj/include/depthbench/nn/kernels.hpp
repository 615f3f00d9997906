#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <type_traits>
#include <cmath>
#include <vector>

#include "depthbench/tensor.hpp"

namespace depthbench::nn {

using Index = Eigen::Index;

// Every spatial kernel exists twice: a plain nested-loop reference and an
// optimized path (patch gather + matrix product, or channel-vectorized
// arithmetic). The two must agree within 1e-5 max-abs; the reference
// accumulates in double to stay the sharper of the pair.
enum class KernelPath { naive, optimized };

struct Padding {
  Index top = 0, left = 0, bottom = 0, right = 0;
};

// TensorFlow-style SAME padding: output extent ceil(in/stride), surplus
// padding goes to the bottom/right edge.
inline Padding same_padding(Index in_h, Index in_w, Index kh, Index kw,
                            Index stride, Index dilation) {
  const Index dkh = (kh - 1) * dilation + 1;
  const Index dkw = (kw - 1) * dilation + 1;
  const Index out_h = (in_h + stride - 1) / stride;
  const Index out_w = (in_w + stride - 1) / stride;
  const Index pad_h = std::max<Index>(0, (out_h - 1) * stride + dkh - in_h);
  const Index pad_w = std::max<Index>(0, (out_w - 1) * stride + dkw - in_w);
  return Padding{pad_h / 2, pad_w / 2, pad_h - pad_h / 2, pad_w - pad_w / 2};
}

inline Index conv_out_extent(Index in, Index k, Index stride, Index dilation,
                             Index pad_lo, Index pad_hi) {
  const Index dk = (k - 1) * dilation + 1;
  const Index span = in + pad_lo + pad_hi - dk;
  if (span < 0) throw ShapeError("kernel exceeds padded input extent");
  return span / stride + 1;
}

struct ConvGeometry {
  Index stride = 1;
  Index dilation = 1;
  Padding pad;
};

// Cross-correlation of an HxWxC input with a KhxKwxCinxCout kernel under
// explicit zero padding. `bias` may be null.
template <class Scalar>
TensorT<Scalar> conv2d(const TensorT<Scalar>& input, const TensorT<Scalar>& kernel,
                       const std::type_identity_t<TensorT<Scalar>>* bias,
                       const ConvGeometry& geom,
                       KernelPath path = KernelPath::optimized) {
  if (input.rank() != 3) throw ShapeError("conv2d input must be HxWxC");
  if (kernel.rank() != 4) throw ShapeError("conv2d kernel must be KhxKwxCinxCout");
  if (geom.stride < 1 || geom.dilation < 1)
    throw ShapeError("stride and dilation must be >= 1");
  const Index in_h = input.extent(0), in_w = input.extent(1), in_c = input.extent(2);
  const Index kh = kernel.extent(0), kw = kernel.extent(1);
  const Index kc_in = kernel.extent(2), out_c = kernel.extent(3);
  if (kc_in != in_c) throw ShapeError("conv2d kernel input channels mismatch");
  if (bias && bias->size() != out_c) throw ShapeError("conv2d bias length mismatch");

  const Index out_h = conv_out_extent(in_h, kh, geom.stride, geom.dilation,
                                      geom.pad.top, geom.pad.bottom);
  const Index out_w = conv_out_extent(in_w, kw, geom.stride, geom.dilation,
                                      geom.pad.left, geom.pad.right);
  TensorT<Scalar> out({out_h, out_w, out_c});

  if (path == KernelPath::naive) {
    for (Index oy = 0; oy < out_h; ++oy)
      for (Index ox = 0; ox < out_w; ++ox)
        for (Index oc = 0; oc < out_c; ++oc) {
          double acc = bias ? static_cast<double>((*bias)[oc]) : 0.0;
          for (Index ky = 0; ky < kh; ++ky)
            for (Index kx = 0; kx < kw; ++kx) {
              const Index iy = oy * geom.stride - geom.pad.top + ky * geom.dilation;
              const Index ix = ox * geom.stride - geom.pad.left + kx * geom.dilation;
              if (iy < 0 || iy >= in_h || ix < 0 || ix >= in_w) continue;
              for (Index ic = 0; ic < in_c; ++ic)
                acc += static_cast<double>(input.at(iy, ix, ic)) *
                       static_cast<double>(kernel.at(ky, kx, ic, oc));
            }
          out.at(oy, ox, oc) = static_cast<Scalar>(acc);
        }
    return out;
  }

  // Patch gather: one row per output position, columns in (ky, kx, ic)
  // order matching the kernel's flat layout, then a single matrix product.
  using RowMatrix =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMatrix patches = RowMatrix::Zero(out_h * out_w, kh * kw * in_c);
  for (Index oy = 0; oy < out_h; ++oy)
    for (Index ox = 0; ox < out_w; ++ox) {
      const Index row = oy * out_w + ox;
      for (Index ky = 0; ky < kh; ++ky) {
        const Index iy = oy * geom.stride - geom.pad.top + ky * geom.dilation;
        if (iy < 0 || iy >= in_h) continue;
        for (Index kx = 0; kx < kw; ++kx) {
          const Index ix = ox * geom.stride - geom.pad.left + kx * geom.dilation;
          if (ix < 0 || ix >= in_w) continue;
          for (Index ic = 0; ic < in_c; ++ic)
            patches(row, (ky * kw + kx) * in_c + ic) = input.at(iy, ix, ic);
        }
      }
    }
  // Accumulate the product in double so the two kernel paths differ only by
  // layout bugs, not summation order.
  using DoubleMatrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  DoubleMatrix acc(out_h * out_w, out_c);
  acc.noalias() = patches.template cast<double>() *
                  kernel.as_matrix(kh * kw * in_c, out_c).template cast<double>();
  if (bias)
    acc.rowwise() += bias->as_vector().template cast<double>().transpose();
  out.as_matrix(out_h * out_w, out_c) = acc.cast<Scalar>();
  return out;
}

// Per-channel spatial convolution with a KhxKwxC kernel (multiplier 1).
template <class Scalar>
TensorT<Scalar> depthwise_conv(const TensorT<Scalar>& input,
                               const TensorT<Scalar>& kernel, Index stride,
                               const Padding& pad,
                               KernelPath path = KernelPath::optimized) {
  if (input.rank() != 3) throw ShapeError("depthwise input must be HxWxC");
  if (kernel.rank() != 3) throw ShapeError("depthwise kernel must be KhxKwxC");
  if (stride < 1) throw ShapeError("stride must be >= 1");
  const Index in_h = input.extent(0), in_w = input.extent(1), ch = input.extent(2);
  const Index kh = kernel.extent(0), kw = kernel.extent(1);
  if (kernel.extent(2) != ch) throw ShapeError("depthwise kernel channels mismatch");

  const Index out_h = conv_out_extent(in_h, kh, stride, 1, pad.top, pad.bottom);
  const Index out_w = conv_out_extent(in_w, kw, stride, 1, pad.left, pad.right);
  TensorT<Scalar> out({out_h, out_w, ch});

  if (path == KernelPath::naive) {
    for (Index oy = 0; oy < out_h; ++oy)
      for (Index ox = 0; ox < out_w; ++ox)
        for (Index c = 0; c < ch; ++c) {
          double acc = 0.0;
          for (Index ky = 0; ky < kh; ++ky)
            for (Index kx = 0; kx < kw; ++kx) {
              const Index iy = oy * stride - pad.top + ky;
              const Index ix = ox * stride - pad.left + kx;
              if (iy < 0 || iy >= in_h || ix < 0 || ix >= in_w) continue;
              acc += static_cast<double>(input.at(iy, ix, c)) *
                     static_cast<double>(kernel.at(ky, kx, c));
            }
          out.at(oy, ox, c) = static_cast<Scalar>(acc);
        }
    return out;
  }

  // Channel-vectorized path: the channel axis is contiguous, so each tap is
  // one fused multiply-add over a mapped channel vector.
  using ArrMap = Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
  using ConstArrMap = Eigen::Map<const Eigen::Array<Scalar, Eigen::Dynamic, 1>>;
  for (Index oy = 0; oy < out_h; ++oy)
    for (Index ox = 0; ox < out_w; ++ox) {
      ArrMap acc(out.data() + (oy * out_w + ox) * ch, ch);
      for (Index ky = 0; ky < kh; ++ky) {
        const Index iy = oy * stride - pad.top + ky;
        if (iy < 0 || iy >= in_h) continue;
        for (Index kx = 0; kx < kw; ++kx) {
          const Index ix = ox * stride - pad.left + kx;
          if (ix < 0 || ix >= in_w) continue;
          ConstArrMap in_vec(input.data() + (iy * in_w + ix) * ch, ch);
          ConstArrMap k_vec(kernel.data() + (ky * kw + kx) * ch, ch);
          acc += in_vec * k_vec;
        }
      }
    }
  return out;
}

template <class Scalar>
TensorT<Scalar> relu(TensorT<Scalar> x) {
  x.array() = x.array().max(Scalar(0));
  return x;
}

// x * clamp(x + 3, 0, 6) / 6
template <class Scalar>
TensorT<Scalar> hard_swish(TensorT<Scalar> x) {
  x.array() = x.array() * (x.array() + Scalar(3)).max(Scalar(0)).min(Scalar(6)) / Scalar(6);
  return x;
}

// clamp(x + 3, 0, 6) / 6
template <class Scalar>
TensorT<Scalar> hard_sigmoid(TensorT<Scalar> x) {
  x.array() = (x.array() + Scalar(3)).max(Scalar(0)).min(Scalar(6)) / Scalar(6);
  return x;
}

// Squeeze-and-excite: global average pool, two 1x1 convolutions (relu then
// hard_sigmoid), channelwise rescale of the input.
template <class Scalar>
TensorT<Scalar> se_block(const TensorT<Scalar>& input,
                         const TensorT<Scalar>& squeeze_kernel,
                         const TensorT<Scalar>& squeeze_bias,
                         const TensorT<Scalar>& excite_kernel,
                         const TensorT<Scalar>& excite_bias,
                         KernelPath path = KernelPath::optimized) {
  if (input.rank() != 3) throw ShapeError("se_block input must be HxWxC");
  const Index h = input.extent(0), w = input.extent(1), ch = input.extent(2);
  TensorT<Scalar> pooled({Index(1), Index(1), ch});
  for (Index c = 0; c < ch; ++c) {
    double acc = 0.0;
    for (Index y = 0; y < h; ++y)
      for (Index x = 0; x < w; ++x) acc += static_cast<double>(input.at(y, x, c));
    pooled.at(0, 0, c) = static_cast<Scalar>(acc / static_cast<double>(h * w));
  }
  TensorT<Scalar> gate = hard_sigmoid(
      conv2d(relu(conv2d(pooled, squeeze_kernel, &squeeze_bias, {}, path)),
             excite_kernel, &excite_bias, {}, path));
  TensorT<Scalar> out = input;
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x)
      for (Index c = 0; c < ch; ++c) out.at(y, x, c) *= gate.at(0, 0, c);
  return out;
}

// Nearest-neighbor resize by floor index mapping: source index
// floor(out_index * in_extent / out_extent). Integer upscales replicate
// each source pixel into an s x s block.
template <class Scalar>
TensorT<Scalar> resize_nearest(const TensorT<Scalar>& input, Index out_h, Index out_w) {
  if (input.rank() != 3) throw ShapeError("resize input must be HxWxC");
  if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be positive");
  const Index in_h = input.extent(0), in_w = input.extent(1), ch = input.extent(2);
  TensorT<Scalar> out({out_h, out_w, ch});
  for (Index y = 0; y < out_h; ++y) {
    const Index sy = y * in_h / out_h;
    for (Index x = 0; x < out_w; ++x) {
      const Index sx = x * in_w / out_w;
      for (Index c = 0; c < ch; ++c) out.at(y, x, c) = input.at(sy, sx, c);
    }
  }
  return out;
}

template <class Scalar>
TensorT<Scalar> resize_nearest_scale(const TensorT<Scalar>& input, Index scale) {
  if (scale < 1) throw ShapeError("scale must be >= 1");
  return resize_nearest(input, input.extent(0) * scale, input.extent(1) * scale);
}

// Bilinear resize with half-pixel centers (align_corners=false).
template <class Scalar>
TensorT<Scalar> resize_bilinear(const TensorT<Scalar>& input, Index out_h, Index out_w) {
  if (input.rank() != 3) throw ShapeError("resize input must be HxWxC");
  if (out_h < 1 || out_w < 1) throw ShapeError("resize target must be positive");
  const Index in_h = input.extent(0), in_w = input.extent(1), ch = input.extent(2);
  TensorT<Scalar> out({out_h, out_w, ch});
  const double sy = static_cast<double>(in_h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(in_w) / static_cast<double>(out_w);
  for (Index y = 0; y < out_h; ++y) {
    const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
    const Index y0 = static_cast<Index>(std::floor(fy));
    const double wy = fy - static_cast<double>(y0);
    const Index y0c = std::clamp<Index>(y0, 0, in_h - 1);
    const Index y1c = std::clamp<Index>(y0 + 1, 0, in_h - 1);
    for (Index x = 0; x < out_w; ++x) {
      const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
      const Index x0 = static_cast<Index>(std::floor(fx));
      const double wx = fx - static_cast<double>(x0);
      const Index x0c = std::clamp<Index>(x0, 0, in_w - 1);
      const Index x1c = std::clamp<Index>(x0 + 1, 0, in_w - 1);
      for (Index c = 0; c < ch; ++c) {
        const double top = (1.0 - wx) * input.at(y0c, x0c, c) + wx * input.at(y0c, x1c, c);
        const double bot = (1.0 - wx) * input.at(y1c, x0c, c) + wx * input.at(y1c, x1c, c);
        out.at(y, x, c) = static_cast<Scalar>((1.0 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

// Concatenation along the channel axis.
template <class Scalar>
TensorT<Scalar> concat_channels(const std::vector<const TensorT<Scalar>*>& parts) {
  if (parts.empty()) throw ShapeError("concat of zero tensors");
  const Index h = parts[0]->extent(0), w = parts[0]->extent(1);
  Index total_c = 0;
  for (const auto* p : parts) {
    if (p->rank() != 3 || p->extent(0) != h || p->extent(1) != w)
      throw ShapeError("concat inputs must share spatial extents");
    total_c += p->extent(2);
  }
  TensorT<Scalar> out({h, w, total_c});
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      Index offset = 0;
      for (const auto* p : parts) {
        const Index pc = p->extent(2);
        for (Index c = 0; c < pc; ++c) out.at(y, x, offset + c) = p->at(y, x, c);
        offset += pc;
      }
    }
  return out;
}

// Elementwise sum of two or more equally shaped tensors.
template <class Scalar>
TensorT<Scalar> add(const std::vector<const TensorT<Scalar>*>& parts) {
  if (parts.empty()) throw ShapeError("add of zero tensors");
  TensorT<Scalar> out = *parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (!out.same_shape(*parts[i])) throw ShapeError("add inputs must share shape");
    out.array() += parts[i]->array();
  }
  return out;
}

}  // namespace depthbench::nn
