// Copyright (c) 2026 The xyzcycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xyzcycle/nn/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "xyzcycle/error.hpp"

namespace xyzcycle::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  return h;
}

void require_rank3(const std::vector<int>& dims, const char* layer) {
  if (dims.size() != 3) {
    throw ShapeError(std::string(layer) + " expects a [channels x height x width] input, got " +
                     shape_string(dims));
  }
}

[[noreturn]] void missing_forward(const std::string& layer) {
  throw StateError(layer + ": backward called without a saved forward activation");
}

template <typename T>
void he_fill(Tensor<T>& t, int fan_in, Rng& rng) {
  const double stddev = std::sqrt(2.0 / fan_in);
  for (auto& v : t.values()) v = static_cast<T>(stddev * rng.normal());
}

}  // namespace

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv3x3:
      return "conv3x3";
    case LayerKind::kLeakyRelu:
      return "lrelu";
    case LayerKind::kTanh:
      return "tanh";
    case LayerKind::kMaxPool2:
      return "maxpool2";
    case LayerKind::kFullyConnected:
      return "fc";
    case LayerKind::kDropout:
      return "dropout";
    case LayerKind::kUniformSubsample:
      return "subsample";
  }
  return "?";
}

template <typename T>
std::size_t Layer<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

// ---- Conv3x3 ---------------------------------------------------------------

template <typename T>
Conv3x3<T>::Conv3x3(int in_channels, int out_channels, int stride, int pad)
    : in_(in_channels),
      out_(out_channels),
      stride_(stride),
      pad_(pad),
      weight_({out_channels, in_channels, 3, 3}),
      bias_({out_channels}) {
  if (in_channels < 1 || out_channels < 1 || stride < 1 || pad < 0) {
    throw InvalidInputError("conv3x3: invalid configuration");
  }
}

template <typename T>
std::string Conv3x3<T>::describe() const {
  return "conv3x3(" + std::to_string(in_) + "->" + std::to_string(out_) + ", stride " +
         std::to_string(stride_) + ", pad " + std::to_string(pad_) + ")";
}

template <typename T>
void Conv3x3<T>::initialize(Rng& rng) {
  he_fill(weight_, in_ * 9, rng);
  std::fill(bias_.values().begin(), bias_.values().end(), T{0});
}

template <typename T>
void Conv3x3<T>::clear_saved() {
  columns_.clear();
  columns_.shrink_to_fit();
  input_dims_.clear();
}

template <typename T>
void Conv3x3<T>::convolve_rows(const Tensor<T>& input, Tensor<T>& output, int row_begin,
                               int row_end, std::vector<T>& columns) const {
  const int h = input.dim(1), w = input.dim(2);
  const int out_h = output.dim(1), out_w = output.dim(2);
  const std::size_t n = static_cast<std::size_t>(row_end - row_begin) * out_w;
  columns.resize(static_cast<std::size_t>(in_) * 9 * n);
  const T* src = input.data();
  for (int c = 0; c < in_; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        T* row = columns.data() + ((static_cast<std::size_t>(c) * 3 + ky) * 3 + kx) * n;
        // Output columns [lo, hi) read inside the image; the rest is padding.
        const int lo = std::min(out_w, std::max(0, (pad_ - kx + stride_ - 1) / stride_));
        const int hi = std::max(lo, std::min(out_w, (w - 1 + pad_ - kx) / stride_ + 1));
        for (int oy = row_begin; oy < row_end; ++oy) {
          T* dst = row + static_cast<std::size_t>(oy - row_begin) * out_w;
          const int iy = oy * stride_ - pad_ + ky;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + out_w, T{0});
            continue;
          }
          const T* src_row = src + (static_cast<std::size_t>(c) * h + iy) * w;
          std::fill(dst, dst + lo, T{0});
          std::fill(dst + hi, dst + out_w, T{0});
          if (stride_ == 1) {
            std::copy(src_row + lo - pad_ + kx, src_row + hi - pad_ + kx, dst + lo);
          } else {
            for (int ox = lo; ox < hi; ++ox) dst[ox] = src_row[ox * stride_ - pad_ + kx];
          }
        }
      }
    }
  }
  Eigen::Map<const RowMat<T>> weight(weight_.data(), out_, in_ * 9);
  Eigen::Map<const RowMat<T>> cols(columns.data(), in_ * 9, static_cast<Eigen::Index>(n));
  Eigen::Map<const Vec<T>> bias(bias_.data(), out_);
  // A band of output rows is a strided block of the [out, out_h, out_w] buffer.
  const auto plane = static_cast<Eigen::Index>(out_h) * out_w;
  Eigen::Map<RowMat<T>, 0, Eigen::OuterStride<>> out(
      output.data() + static_cast<std::size_t>(row_begin) * out_w, out_,
      static_cast<Eigen::Index>(n), Eigen::OuterStride<>(plane));
  out.noalias() = weight * cols;
  out.colwise() += bias;
}

namespace {

template <typename T>
std::vector<int> conv_output_dims(const Tensor<T>& input, int in, int out, int stride, int pad,
                                  const std::string& name, const std::string& weight_shape) {
  require_rank3(input.dims(), "conv3x3");
  if (input.dim(0) != in) {
    throw ShapeError(name + ": input " + input.shape_string() + " vs weight " + weight_shape);
  }
  const int out_h = (input.dim(1) + 2 * pad - 3) / stride + 1;
  const int out_w = (input.dim(2) + 2 * pad - 3) / stride + 1;
  if (out_h < 1 || out_w < 1) throw ShapeError(name + ": input " + input.shape_string() + " too small");
  return {out, out_h, out_w};
}

}  // namespace

template <typename T>
Tensor<T> Conv3x3<T>::forward(const Tensor<T>& input, bool /*training*/) {
  Tensor<T> output(conv_output_dims(input, in_, out_, stride_, pad_, describe(),
                                    weight_.shape_string()));
  out_h_ = output.dim(1);
  out_w_ = output.dim(2);
  convolve_rows(input, output, 0, out_h_, columns_);
  input_dims_ = input.dims();
  return output;
}

template <typename T>
Tensor<T> Conv3x3<T>::infer(const Tensor<T>& input) const {
  Tensor<T> output(conv_output_dims(input, in_, out_, stride_, pad_, describe(),
                                    weight_.shape_string()));
  const int out_h = output.dim(1);
  // Bands of about 64k output pixels bound the im2col scratch on large images.
  const int band = std::max(1, 65536 / output.dim(2));
  std::vector<T> columns;
  for (int r = 0; r < out_h; r += band) {
    convolve_rows(input, output, r, std::min(out_h, r + band), columns);
  }
  return output;
}

template <typename T>
Tensor<T> Conv3x3<T>::backward(const Tensor<T>& grad_out) {
  if (input_dims_.empty()) missing_forward(describe());
  const std::vector<int> expected{out_, out_h_, out_w_};
  if (grad_out.dims() != expected) {
    throw ShapeError(describe() + ": gradient " + grad_out.shape_string() + " vs output " +
                     shape_string(expected));
  }
  const std::size_t n = static_cast<std::size_t>(out_h_) * out_w_;
  weight_.ensure_grad();
  bias_.ensure_grad();
  Eigen::Map<const RowMat<T>> dy(grad_out.data(), out_, static_cast<Eigen::Index>(n));
  Eigen::Map<const RowMat<T>> cols(columns_.data(), in_ * 9, static_cast<Eigen::Index>(n));
  Eigen::Map<const RowMat<T>> weight(weight_.data(), out_, in_ * 9);
  Eigen::Map<RowMat<T>> dw(weight_.grad().data(), out_, in_ * 9);
  Eigen::Map<Vec<T>> db(bias_.grad().data(), out_);
  dw.noalias() += dy * cols.transpose();
  // Fixed summation order: Eigen's vectorized reduction depends on the
  // buffer's alignment, which would make training runs differ in the last bit.
  for (int o = 0; o < out_; ++o) {
    const T* row = grad_out.data() + static_cast<std::size_t>(o) * n;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += row[i];
    db[o] += static_cast<T>(acc);
  }

  RowMat<T> dcols(in_ * 9, static_cast<Eigen::Index>(n));
  dcols.noalias() = weight.transpose() * dy;

  const int h = input_dims_[1], w = input_dims_[2];
  Tensor<T> grad_in(input_dims_);
  T* dst = grad_in.data();
  for (int c = 0; c < in_; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const T* row = dcols.data() + ((static_cast<std::size_t>(c) * 3 + ky) * 3 + kx) * n;
        const int lo = std::min(out_w_, std::max(0, (pad_ - kx + stride_ - 1) / stride_));
        const int hi = std::max(lo, std::min(out_w_, (w - 1 + pad_ - kx) / stride_ + 1));
        for (int oy = 0; oy < out_h_; ++oy) {
          const int iy = oy * stride_ - pad_ + ky;
          if (iy < 0 || iy >= h) continue;
          T* dst_row = dst + (static_cast<std::size_t>(c) * h + iy) * w;
          const T* src = row + static_cast<std::size_t>(oy) * out_w_;
          for (int ox = lo; ox < hi; ++ox) dst_row[ox * stride_ - pad_ + kx] += src[ox];
        }
      }
    }
  }
  return grad_in;
}

// ---- LeakyRelu -------------------------------------------------------------

template <typename T>
std::string LeakyRelu<T>::describe() const {
  return "lrelu(" + std::to_string(static_cast<double>(slope_)) + ")";
}

template <typename T>
Tensor<T> LeakyRelu<T>::forward(const Tensor<T>& input, bool /*training*/) {
  saved_ = input;
  return infer(input);
}

template <typename T>
Tensor<T> LeakyRelu<T>::infer(const Tensor<T>& input) const {
  Tensor<T> out = input;
  const T slope = slope_;
  T* v = out.data();
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) v[i] = std::max(v[i], T{0}) + slope * std::min(v[i], T{0});
  return out;
}

template <typename T>
Tensor<T> LeakyRelu<T>::backward(const Tensor<T>& grad_out) {
  if (!saved_) missing_forward(describe());
  if (!grad_out.same_shape(*saved_)) {
    throw ShapeError("lrelu: gradient " + grad_out.shape_string() + " vs input " +
                     saved_->shape_string());
  }
  Tensor<T> grad_in = grad_out;
  const T* x = saved_->data();
  T* g = grad_in.data();
  const T slope = slope_;
  const std::size_t n = grad_in.size();
  for (std::size_t i = 0; i < n; ++i) g[i] *= x[i] > T{0} ? T{1} : slope;
  return grad_in;
}

template <typename T>
std::uint64_t LeakyRelu<T>::branch_signature() const {
  if (!saved_) return 0;
  std::uint64_t h = 0x51ED27;
  std::uint64_t word = 0;
  int bits = 0;
  for (T v : saved_->values()) {
    word = (word << 1) | (v > T{0} ? 1u : 0u);
    if (++bits == 64) {
      h = mix(h, word);
      word = 0;
      bits = 0;
    }
  }
  return mix(h, word);
}

// ---- Tanh ------------------------------------------------------------------

template <typename T>
Tensor<T> Tanh<T>::forward(const Tensor<T>& input, bool /*training*/) {
  saved_ = infer(input);
  return *saved_;
}

template <typename T>
Tensor<T> Tanh<T>::infer(const Tensor<T>& input) const {
  Tensor<T> out = input;
  for (auto& v : out.values()) v = std::tanh(v);
  return out;
}

template <typename T>
Tensor<T> Tanh<T>::backward(const Tensor<T>& grad_out) {
  if (!saved_) missing_forward("tanh");
  if (!grad_out.same_shape(*saved_)) {
    throw ShapeError("tanh: gradient " + grad_out.shape_string() + " vs output " +
                     saved_->shape_string());
  }
  Tensor<T> grad_in = grad_out;
  const auto y = saved_->values();
  auto g = grad_in.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= T{1} - y[i] * y[i];
  return grad_in;
}

// ---- MaxPool2 --------------------------------------------------------------

template <typename T>
void MaxPool2<T>::clear_saved() {
  argmax_.clear();
  input_dims_.clear();
  output_dims_.clear();
}

namespace {

template <typename T>
Tensor<T> max_pool(const Tensor<T>& input, std::vector<std::size_t>& argmax) {
  require_rank3(input.dims(), "maxpool2");
  const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
  const int oh = h / 2, ow = w / 2;
  if (oh < 1 || ow < 1) {
    throw ShapeError("maxpool2: input " + input.shape_string() + " smaller than 2x2");
  }
  Tensor<T> out({c, oh, ow});
  argmax.assign(out.size(), 0);
  const T* src = input.data();
  std::size_t o = 0;
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x, ++o) {
        std::size_t best = (static_cast<std::size_t>(ch) * h + 2 * y) * w + 2 * x;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (static_cast<std::size_t>(ch) * h + 2 * y + dy) * w + 2 * x + dx;
            if (src[idx] > src[best]) best = idx;
          }
        }
        argmax[o] = best;
        out[o] = src[best];
      }
    }
  }
  return out;
}

}  // namespace

template <typename T>
Tensor<T> MaxPool2<T>::forward(const Tensor<T>& input, bool /*training*/) {
  Tensor<T> out = max_pool(input, argmax_);
  input_dims_ = input.dims();
  output_dims_ = out.dims();
  return out;
}

template <typename T>
Tensor<T> MaxPool2<T>::infer(const Tensor<T>& input) const {
  std::vector<std::size_t> argmax;
  return max_pool(input, argmax);
}

template <typename T>
Tensor<T> MaxPool2<T>::backward(const Tensor<T>& grad_out) {
  if (input_dims_.empty()) missing_forward("maxpool2");
  if (grad_out.dims() != output_dims_) {
    throw ShapeError("maxpool2: gradient " + grad_out.shape_string() + " vs output " +
                     shape_string(output_dims_));
  }
  Tensor<T> grad_in(input_dims_);
  for (std::size_t o = 0; o < argmax_.size(); ++o) grad_in[argmax_[o]] += grad_out[o];
  return grad_in;
}

template <typename T>
std::uint64_t MaxPool2<T>::branch_signature() const {
  std::uint64_t h = 0x9001;
  for (std::size_t a : argmax_) h = mix(h, a);
  return h;
}

// ---- FullyConnected --------------------------------------------------------

template <typename T>
FullyConnected<T>::FullyConnected(int in, int out)
    : in_(in), out_(out), weight_({out, in}), bias_({out}) {
  if (in < 1 || out < 1) throw InvalidInputError("fc: invalid configuration");
}

template <typename T>
std::string FullyConnected<T>::describe() const {
  return "fc(" + std::to_string(in_) + "->" + std::to_string(out_) + ")";
}

template <typename T>
void FullyConnected<T>::initialize(Rng& rng) {
  he_fill(weight_, in_, rng);
  std::fill(bias_.values().begin(), bias_.values().end(), T{0});
}

template <typename T>
Tensor<T> FullyConnected<T>::forward(const Tensor<T>& input, bool /*training*/) {
  Tensor<T> output = infer(input);
  saved_ = input;
  return output;
}

template <typename T>
Tensor<T> FullyConnected<T>::infer(const Tensor<T>& input) const {
  if (input.size() != static_cast<std::size_t>(in_)) {
    throw ShapeError(describe() + ": input " + input.shape_string() + " vs weight " +
                     weight_.shape_string());
  }
  Tensor<T> output({out_});
  Eigen::Map<const RowMat<T>> weight(weight_.data(), out_, in_);
  Eigen::Map<const Vec<T>> x(input.data(), in_);
  Eigen::Map<const Vec<T>> bias(bias_.data(), out_);
  Eigen::Map<Vec<T>> y(output.data(), out_);
  y.noalias() = weight * x;
  y += bias;
  return output;
}

template <typename T>
Tensor<T> FullyConnected<T>::backward(const Tensor<T>& grad_out) {
  if (!saved_) missing_forward(describe());
  if (grad_out.size() != static_cast<std::size_t>(out_)) {
    throw ShapeError(describe() + ": gradient " + grad_out.shape_string() + " vs output [" +
                     std::to_string(out_) + "]");
  }
  weight_.ensure_grad();
  bias_.ensure_grad();
  Eigen::Map<const Vec<T>> dy(grad_out.data(), out_);
  Eigen::Map<const Vec<T>> x(saved_->data(), in_);
  Eigen::Map<const RowMat<T>> weight(weight_.data(), out_, in_);
  Eigen::Map<RowMat<T>> dw(weight_.grad().data(), out_, in_);
  Eigen::Map<Vec<T>> db(bias_.grad().data(), out_);
  dw.noalias() += dy * x.transpose();
  db += dy;
  Tensor<T> grad_in(saved_->dims());
  Eigen::Map<Vec<T>> dx(grad_in.data(), in_);
  dx.noalias() = weight.transpose() * dy;
  return grad_in;
}

// ---- Dropout ---------------------------------------------------------------

template <typename T>
Dropout<T>::Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInputError("dropout rate must be in [0, 1)");
}

template <typename T>
std::string Dropout<T>::describe() const {
  return "dropout(" + std::to_string(rate_) + ")";
}

template <typename T>
void Dropout<T>::initialize(Rng& rng) {
  rng_ = Rng(rng.next());
}

template <typename T>
void Dropout<T>::clear_saved() {
  has_saved_ = false;
  mask_.clear();
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& input, bool training) {
  has_saved_ = true;
  saved_training_ = training;
  if (!training) {
    mask_.clear();
    return input;
  }
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_.resize(input.size());
  Tensor<T> out = input;
  for (std::size_t i = 0; i < out.size(); ++i) {
    mask_[i] = rng_.bernoulli(rate_) ? T{0} : keep_scale;
    out[i] *= mask_[i];
  }
  return out;
}

template <typename T>
Tensor<T> Dropout<T>::infer(const Tensor<T>& input) const {
  return input;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& grad_out) {
  if (!has_saved_) missing_forward(describe());
  if (!saved_training_) return grad_out;
  if (grad_out.size() != mask_.size()) {
    throw ShapeError("dropout: gradient " + grad_out.shape_string() + " vs saved mask of " +
                     std::to_string(mask_.size()));
  }
  Tensor<T> grad_in = grad_out;
  for (std::size_t i = 0; i < mask_.size(); ++i) grad_in[i] *= mask_[i];
  return grad_in;
}

// ---- UniformSubsample ------------------------------------------------------

template <typename T>
UniformSubsample<T>::UniformSubsample(int target_h, int target_w)
    : target_h_(target_h), target_w_(target_w) {
  if (target_h < 1 || target_w < 1) throw InvalidInputError("subsample: invalid target size");
}

template <typename T>
std::string UniformSubsample<T>::describe() const {
  return "subsample(" + std::to_string(target_h_) + "x" + std::to_string(target_w_) + ")";
}

template <typename T>
std::vector<int> UniformSubsample<T>::grid(int source, int target) {
  std::vector<int> idx(static_cast<std::size_t>(target));
  if (target == 1) {
    idx[0] = (source - 1) / 2;
    return idx;
  }
  for (int i = 0; i < target; ++i) {
    // Integer rounding of i * (source - 1) / (target - 1), halves rounded up.
    const long long num = static_cast<long long>(i) * (source - 1);
    idx[static_cast<std::size_t>(i)] =
        static_cast<int>((2 * num + (target - 1)) / (2LL * (target - 1)));
  }
  return idx;
}

template <typename T>
void UniformSubsample<T>::clear_saved() {
  input_dims_.clear();
}

template <typename T>
Tensor<T> UniformSubsample<T>::forward(const Tensor<T>& input, bool /*training*/) {
  Tensor<T> out = infer(input);
  rows_ = grid(input.dim(1), target_h_);
  cols_ = grid(input.dim(2), target_w_);
  input_dims_ = input.dims();
  return out;
}

template <typename T>
Tensor<T> UniformSubsample<T>::infer(const Tensor<T>& input) const {
  require_rank3(input.dims(), "subsample");
  const int c = input.dim(0), h = input.dim(1), w = input.dim(2);
  if (h < 1 || w < 1) throw ShapeError("subsample: empty input " + input.shape_string());
  const auto rows = grid(h, target_h_);
  const auto cols = grid(w, target_w_);
  Tensor<T> out({c, target_h_, target_w_});
  std::size_t o = 0;
  for (int ch = 0; ch < c; ++ch)
    for (int y : rows)
      for (int x : cols) out[o++] = input[(static_cast<std::size_t>(ch) * h + y) * w + x];
  return out;
}

template <typename T>
Tensor<T> UniformSubsample<T>::backward(const Tensor<T>& grad_out) {
  if (input_dims_.empty()) missing_forward(describe());
  const int c = input_dims_[0], h = input_dims_[1], w = input_dims_[2];
  if (grad_out.dims() != std::vector<int>{c, target_h_, target_w_}) {
    throw ShapeError(describe() + ": gradient " + grad_out.shape_string() + " does not match");
  }
  Tensor<T> grad_in(input_dims_);
  std::size_t o = 0;
  for (int ch = 0; ch < c; ++ch)
    for (int y : rows_)
      for (int x : cols_) grad_in[(static_cast<std::size_t>(ch) * h + y) * w + x] += grad_out[o++];
  return grad_in;
}

#define XYZCYCLE_INSTANTIATE(T)        \
  template class Layer<T>;             \
  template class Conv3x3<T>;           \
  template class LeakyRelu<T>;         \
  template class Tanh<T>;              \
  template class MaxPool2<T>;          \
  template class FullyConnected<T>;    \
  template class Dropout<T>;           \
  template class UniformSubsample<T>;

XYZCYCLE_INSTANTIATE(float)
XYZCYCLE_INSTANTIATE(double)

#undef XYZCYCLE_INSTANTIATE

}  // namespace xyzcycle::nn
