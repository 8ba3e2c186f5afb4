// Copyright 2026 The Retract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <Eigen/QR>
#include <cmath>
#include <cstdint>
#include <vector>

#include "retract/errors.hpp"
#include "retract/rng.hpp"

namespace retract::rl {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Flat parameter and gradient storage. Layers hold offsets into it, which
// keeps optimizer steps, norm clipping, finite-difference probing, and
// serialization trivial.
template <typename S>
class ParamStore {
 public:
  size_t allocate(size_t n) {
    const size_t off = values.size();
    values.resize(off + n, S(0));
    grads.resize(values.size(), S(0));
    return off;
  }
  void zeroGrads() { std::fill(grads.begin(), grads.end(), S(0)); }
  size_t size() const { return values.size(); }

  std::vector<S> values;
  std::vector<S> grads;
};

// Fills an [rows x cols] block with an orthogonal matrix scaled by `gain`
// (orthonormal columns when rows >= cols). Computed in double for all scalar
// types so float and double nets share initial weights bit-for-bit after
// rounding.
template <typename S>
void orthogonalInit(S* data, int rows, int cols, double gain, Rng& rng) {
  Eigen::MatrixXd a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = rng.normal();
  const bool tall = rows >= cols;
  if (!tall) a.transposeInPlace();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd r_mat = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (int c = 0; c < q.cols(); ++c) {
    if (r_mat(c, c) < 0) q.col(c) = -q.col(c);
  }
  if (!tall) q.transposeInPlace();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) data[static_cast<size_t>(r) * cols + c] = static_cast<S>(gain * q(r, c));
}

struct ConvSpec {
  int in_c, out_c, kernel, stride;
};

// Valid 2D convolution over square inputs. Activations are stored row-major
// per sample as (pixel, channel): index (y * width + x) * channels + c. The
// im2col buffer is rebuilt in backward instead of being cached.
template <typename S>
class Conv2d {
 public:
  Conv2d(ParamStore<S>& store, const ConvSpec& spec, int in_hw)
      : spec_(spec),
        in_hw_(in_hw),
        out_hw_((in_hw - spec.kernel) / spec.stride + 1),
        patch_(spec.kernel * spec.kernel * spec.in_c) {
    if (out_hw_ < 1) throw ContractError("conv output collapsed to zero size");
    w_off_ = store.allocate(static_cast<size_t>(patch_) * spec_.out_c);
    b_off_ = store.allocate(spec_.out_c);
  }

  int inHw() const { return in_hw_; }
  int outHw() const { return out_hw_; }
  int outDim() const { return out_hw_ * out_hw_ * spec_.out_c; }
  int inDim() const { return in_hw_ * in_hw_ * spec_.in_c; }

  void init(ParamStore<S>& store, double gain, Rng& rng) {
    orthogonalInit(store.values.data() + w_off_, patch_, spec_.out_c, gain, rng);
    std::fill_n(store.values.data() + b_off_, spec_.out_c, S(0));
  }

  // X: [N, inDim] -> Y: [N, outDim]; ReLU optional.
  void forward(const ParamStore<S>& store, const MatX<S>& x, MatX<S>& col,
               MatX<S>& y, bool relu) const {
    const int n = static_cast<int>(x.rows());
    const int p = out_hw_ * out_hw_;
    im2col(x, col);
    Eigen::Map<const MatX<S>> w(store.values.data() + w_off_, patch_, spec_.out_c);
    Eigen::Map<const VecX<S>> b(store.values.data() + b_off_, spec_.out_c);
    y.resize(n, outDim());
    Eigen::Map<MatX<S>> y_flat(y.data(), static_cast<Eigen::Index>(n) * p, spec_.out_c);
    y_flat.noalias() = col * w;
    y_flat.rowwise() += b.transpose();
    if (relu) y_flat = y_flat.cwiseMax(S(0));
  }

  // dY: [N, outDim]; if relu, y must be the post-ReLU activations. Adds
  // parameter gradients into the store and writes dX. `col` and `dcol` are
  // caller-owned scratch so a shared layer object stays thread-safe.
  void backward(ParamStore<S>& store, const MatX<S>& x, const MatX<S>& y,
                MatX<S>& col, MatX<S>& dcol, MatX<S>& dy, MatX<S>& dx,
                bool relu) const {
    const int n = static_cast<int>(x.rows());
    const int p = out_hw_ * out_hw_;
    if (relu) {
      dy = (y.array() > S(0)).template cast<S>() * dy.array();
    }
    im2col(x, col);
    Eigen::Map<MatX<S>> dy_flat(dy.data(), static_cast<Eigen::Index>(n) * p, spec_.out_c);
    Eigen::Map<MatX<S>> dw(store.grads.data() + w_off_, patch_, spec_.out_c);
    Eigen::Map<VecX<S>> db(store.grads.data() + b_off_, spec_.out_c);
    dw.noalias() += col.transpose() * dy_flat;
    db.noalias() += dy_flat.colwise().sum().transpose();
    dcol.noalias() = dy_flat * Eigen::Map<const MatX<S>>(
                                   store.values.data() + w_off_, patch_, spec_.out_c)
                                   .transpose();
    dx.setZero(n, inDim());
    col2im(dcol, dx);
  }

 private:
  void im2col(const MatX<S>& x, MatX<S>& col) const {
    const int n = static_cast<int>(x.rows());
    const int p = out_hw_ * out_hw_;
    col.resize(static_cast<Eigen::Index>(n) * p, patch_);
    const int k = spec_.kernel;
    const int c_in = spec_.in_c;
    for (int sample = 0; sample < n; ++sample) {
      const S* xs = x.data() + static_cast<size_t>(sample) * inDim();
      S* base = col.data() + static_cast<size_t>(sample) * p * patch_;
      for (int oy = 0; oy < out_hw_; ++oy) {
        for (int ox = 0; ox < out_hw_; ++ox) {
          S* dst = base + (static_cast<size_t>(oy) * out_hw_ + ox) * patch_;
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * spec_.stride + ky;
            const S* src = xs + (static_cast<size_t>(iy) * in_hw_ + ox * spec_.stride) * c_in;
            std::copy(src, src + static_cast<size_t>(k) * c_in, dst);
            dst += k * c_in;
          }
        }
      }
    }
  }

  void col2im(const MatX<S>& dcol, MatX<S>& dx) const {
    const int n = static_cast<int>(dx.rows());
    const int p = out_hw_ * out_hw_;
    const int k = spec_.kernel;
    const int c_in = spec_.in_c;
    for (int sample = 0; sample < n; ++sample) {
      S* xs = dx.data() + static_cast<size_t>(sample) * inDim();
      const S* base = dcol.data() + static_cast<size_t>(sample) * p * patch_;
      for (int oy = 0; oy < out_hw_; ++oy) {
        for (int ox = 0; ox < out_hw_; ++ox) {
          const S* src = base + (static_cast<size_t>(oy) * out_hw_ + ox) * patch_;
          for (int ky = 0; ky < k; ++ky) {
            const int iy = oy * spec_.stride + ky;
            S* dst = xs + (static_cast<size_t>(iy) * in_hw_ + ox * spec_.stride) * c_in;
            for (int j = 0; j < k * c_in; ++j) dst[j] += src[j];
          }
        }
      }
    }
  }

  ConvSpec spec_;
  int in_hw_;
  int out_hw_;
  int patch_;
  size_t w_off_ = 0;
  size_t b_off_ = 0;
};

template <typename S>
class Dense {
 public:
  Dense(ParamStore<S>& store, int in_dim, int out_dim)
      : in_(in_dim), out_(out_dim) {
    w_off_ = store.allocate(static_cast<size_t>(in_dim) * out_dim);
    b_off_ = store.allocate(out_dim);
  }

  int inDim() const { return in_; }
  int outDim() const { return out_; }

  void init(ParamStore<S>& store, double gain, Rng& rng) {
    orthogonalInit(store.values.data() + w_off_, in_, out_, gain, rng);
    std::fill_n(store.values.data() + b_off_, out_, S(0));
  }

  void forward(const ParamStore<S>& store, const MatX<S>& x, MatX<S>& y, bool relu) const {
    Eigen::Map<const MatX<S>> w(store.values.data() + w_off_, in_, out_);
    Eigen::Map<const VecX<S>> b(store.values.data() + b_off_, out_);
    y.resize(x.rows(), out_);
    y.noalias() = x * w;
    y.rowwise() += b.transpose();
    if (relu) y = y.cwiseMax(S(0));
  }

  void backward(ParamStore<S>& store, const MatX<S>& x, const MatX<S>& y,
                MatX<S>& dy, MatX<S>& dx, bool relu) const {
    if (relu) {
      dy = (y.array() > S(0)).template cast<S>() * dy.array();
    }
    Eigen::Map<MatX<S>> dw(store.grads.data() + w_off_, in_, out_);
    Eigen::Map<VecX<S>> db(store.grads.data() + b_off_, out_);
    dw.noalias() += x.transpose() * dy;
    db.noalias() += dy.colwise().sum().transpose();
    Eigen::Map<const MatX<S>> w(store.values.data() + w_off_, in_, out_);
    dx.resize(x.rows(), in_);
    dx.noalias() = dy * w.transpose();
  }

 private:
  int in_;
  int out_;
  size_t w_off_ = 0;
  size_t b_off_ = 0;
};

// Shared trunk shape: three convolutions (kernels 8/4/3, strides 4/2/1,
// channels 32/64/64) and a 512-wide fully connected layer, ReLU throughout.
struct TrunkShape {
  int obs_hw = 84;
  int in_channels = 12;
  int conv_channels[3] = {32, 64, 64};
  int fc_width = 512;
};

// Per-batch activation cache; reused across forward/backward calls.
template <typename S>
struct TrunkCache {
  MatX<S> x0;          // input [N, hw*hw*12]
  MatX<S> a1, a2, a3;  // post-ReLU conv activations
  MatX<S> features;    // post-ReLU fc output [N, 512]
  MatX<S> col, dcol;   // scratch im2col buffers
  MatX<S> d1, d2, d3, dfeat, dx;
};

template <typename S>
class ConvTrunk {
 public:
  ConvTrunk(ParamStore<S>& store, const TrunkShape& shape)
      : shape_(shape),
        c1_(store, ConvSpec{shape.in_channels, shape.conv_channels[0], 8, 4}, shape.obs_hw),
        c2_(store, ConvSpec{shape.conv_channels[0], shape.conv_channels[1], 4, 2}, c1_.outHw()),
        c3_(store, ConvSpec{shape.conv_channels[1], shape.conv_channels[2], 3, 1}, c2_.outHw()),
        fc_(store, c3_.outDim(), shape.fc_width) {}

  int inputDim() const { return c1_.inDim(); }
  int featureDim() const { return fc_.outDim(); }
  const TrunkShape& shape() const { return shape_; }

  void init(ParamStore<S>& store, Rng& rng) {
    const double gain = std::sqrt(2.0);  // ReLU layers
    c1_.init(store, gain, rng);
    c2_.init(store, gain, rng);
    c3_.init(store, gain, rng);
    fc_.init(store, gain, rng);
  }

  void forward(const ParamStore<S>& store, TrunkCache<S>& cache) const {
    c1_.forward(store, cache.x0, cache.col, cache.a1, true);
    c2_.forward(store, cache.a1, cache.col, cache.a2, true);
    c3_.forward(store, cache.a2, cache.col, cache.a3, true);
    fc_.forward(store, cache.a3, cache.features, true);
  }

  // dfeat in cache.dfeat; input gradient lands in cache.dx.
  void backward(ParamStore<S>& store, TrunkCache<S>& cache) const {
    fc_.backward(store, cache.a3, cache.features, cache.dfeat, cache.d3, true);
    c3_.backward(store, cache.a2, cache.a3, cache.col, cache.dcol, cache.d3, cache.d2, true);
    c2_.backward(store, cache.a1, cache.a2, cache.col, cache.dcol, cache.d2, cache.d1, true);
    c1_.backward(store, cache.x0, cache.a1, cache.col, cache.dcol, cache.d1, cache.dx, true);
  }

 private:
  TrunkShape shape_;
  Conv2d<S> c1_, c2_, c3_;
  Dense<S> fc_;
};

// Gaussian policy: trunk, linear 3-unit mean head, and an input-independent
// log standard deviation vector.
template <typename S>
class PolicyNet {
 public:
  static constexpr int kActionDim = 3;

  PolicyNet(ParamStore<S>& store, const TrunkShape& shape)
      : trunk_(store, shape), head_(store, trunk_.featureDim(), kActionDim) {
    log_std_off_ = store.allocate(kActionDim);
  }

  void init(ParamStore<S>& store, Rng& rng, double initial_log_std) {
    trunk_.init(store, rng);
    head_.init(store, 0.01, rng);  // small head gain: conservative initial motion
    for (int i = 0; i < kActionDim; ++i) {
      store.values[log_std_off_ + i] = static_cast<S>(initial_log_std);
    }
  }

  const ConvTrunk<S>& trunk() const { return trunk_; }

  // means: [N, 3].
  void forward(const ParamStore<S>& store, TrunkCache<S>& cache, MatX<S>& means) const {
    if (cache.x0.cols() != trunk_.inputDim()) {
      throw ContractError("policy forward: observation shape mismatch");
    }
    trunk_.forward(store, cache);
    head_.forward(store, cache.features, means, false);
  }

  void backward(ParamStore<S>& store, TrunkCache<S>& cache, MatX<S>& dmeans,
                const VecX<S>& dlog_std) const {
    head_.backward(store, cache.features, cache.features /*unused*/, dmeans,
                   cache.dfeat, false);
    trunk_.backward(store, cache);
    for (int i = 0; i < kActionDim; ++i) {
      store.grads[log_std_off_ + i] += dlog_std[i];
    }
  }

  VecX<S> logStd(const ParamStore<S>& store) const {
    VecX<S> v(kActionDim);
    for (int i = 0; i < kActionDim; ++i) v[i] = store.values[log_std_off_ + i];
    return v;
  }

 private:
  ConvTrunk<S> trunk_;
  Dense<S> head_;
  size_t log_std_off_ = 0;
};

template <typename S>
class ValueNet {
 public:
  ValueNet(ParamStore<S>& store, const TrunkShape& shape)
      : trunk_(store, shape), head_(store, trunk_.featureDim(), 1) {}

  void init(ParamStore<S>& store, Rng& rng) {
    trunk_.init(store, rng);
    head_.init(store, 1.0, rng);
  }

  const ConvTrunk<S>& trunk() const { return trunk_; }

  void forward(const ParamStore<S>& store, TrunkCache<S>& cache, MatX<S>& values) const {
    if (cache.x0.cols() != trunk_.inputDim()) {
      throw ContractError("value forward: observation shape mismatch");
    }
    trunk_.forward(store, cache);
    head_.forward(store, cache.features, values, false);
  }

  void backward(ParamStore<S>& store, TrunkCache<S>& cache, MatX<S>& dvalues) const {
    head_.backward(store, cache.features, cache.features /*unused*/, dvalues,
                   cache.dfeat, false);
    trunk_.backward(store, cache);
  }

 private:
  ConvTrunk<S> trunk_;
  Dense<S> head_;
};

// Diagonal Gaussian log density and entropy.
template <typename S>
S gaussianLogProb(const S* action, const S* mean, const S* log_std, int dim) {
  constexpr double kLog2Pi = 1.8378770664093453;
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double ls = static_cast<double>(log_std[i]);
    const double z = (static_cast<double>(action[i]) - static_cast<double>(mean[i])) /
                     std::exp(ls);
    acc += -0.5 * z * z - ls - 0.5 * kLog2Pi;
  }
  return static_cast<S>(acc);
}

template <typename S>
S gaussianEntropy(const S* log_std, int dim) {
  constexpr double kHalfLog2PiE = 1.4189385332046727;  // 0.5*(1+log(2*pi))
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += static_cast<double>(log_std[i]) + kHalfLog2PiE;
  return static_cast<S>(acc);
}

}  // namespace retract::rl
