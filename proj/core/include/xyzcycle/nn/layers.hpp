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

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xyzcycle/nn/tensor.hpp"
#include "xyzcycle/random.hpp"

namespace xyzcycle::nn {

enum class LayerKind {
  kConv3x3,
  kLeakyRelu,
  kTanh,
  kMaxPool2,
  kFullyConnected,
  kDropout,
  kUniformSubsample,
};

const char* to_string(LayerKind kind);

// A layer owns its parameters and whatever activations its backward pass
// needs. forward() records them; backward() consumes them, accumulates
// parameter gradients into the parameters' grad buffers and returns the
// gradient with respect to the layer input. Calling backward() without a
// preceding forward() throws StateError.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  virtual std::string describe() const = 0;

  virtual Tensor<T> forward(const Tensor<T>& input, bool training) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  // Inference-mode forward that records nothing; safe to call concurrently.
  virtual Tensor<T> infer(const Tensor<T>& input) const = 0;

  // Parameters in a fixed order, with matching short names ("weight", "bias").
  virtual std::vector<Tensor<T>*> parameters() { return {}; }
  virtual std::vector<const Tensor<T>*> parameters() const { return {}; }
  virtual std::vector<std::string> parameter_names() const { return {}; }

  // He (fan-in) initialization for weights, zero biases.
  virtual void initialize(Rng& /*rng*/) {}
  virtual void clear_saved() = 0;

  // Hash of the discrete branch decisions taken in the last forward pass
  // (activation signs, pooling winners). Gradient checking uses it to detect
  // finite-difference steps that cross a kink.
  virtual std::uint64_t branch_signature() const { return 0; }

  std::size_t parameter_count() const;
};

// 3x3 convolution over a channels x height x width input.
template <typename T>
class Conv3x3 final : public Layer<T> {
 public:
  Conv3x3(int in_channels, int out_channels, int stride = 1, int pad = 1);

  LayerKind kind() const override { return LayerKind::kConv3x3; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Tensor<T>*> parameters() override { return {&weight_, &bias_}; }
  std::vector<const Tensor<T>*> parameters() const override { return {&weight_, &bias_}; }
  std::vector<std::string> parameter_names() const override { return {"weight", "bias"}; }
  void initialize(Rng& rng) override;
  void clear_saved() override;

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }
  int in_channels() const { return in_; }
  int out_channels() const { return out_; }

 private:
  // Convolves output rows [row_begin, row_end) into `output` using `columns`
  // as im2col scratch space.
  void convolve_rows(const Tensor<T>& input, Tensor<T>& output, int row_begin, int row_end,
                     std::vector<T>& columns) const;

  int in_, out_, stride_, pad_;
  Tensor<T> weight_;  // out x in x 3 x 3
  Tensor<T> bias_;    // out
  std::vector<T> columns_;  // im2col of the last input, (in*9) x (out_h*out_w)
  std::vector<int> input_dims_;
  int out_h_ = 0, out_w_ = 0;
};

template <typename T>
class LeakyRelu final : public Layer<T> {
 public:
  explicit LeakyRelu(T slope = T(0.01)) : slope_(slope) {}

  LayerKind kind() const override { return LayerKind::kLeakyRelu; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void clear_saved() override { saved_.reset(); }
  std::uint64_t branch_signature() const override;
  T slope() const { return slope_; }

 private:
  T slope_;
  std::optional<Tensor<T>> saved_;  // input
};

template <typename T>
class Tanh final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::kTanh; }
  std::string describe() const override { return "tanh"; }
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void clear_saved() override { saved_.reset(); }

 private:
  std::optional<Tensor<T>> saved_;  // output
};

// 2x2 max pooling, stride 2, no padding; odd trailing rows/columns are dropped.
template <typename T>
class MaxPool2 final : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::kMaxPool2; }
  std::string describe() const override { return "maxpool2"; }
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void clear_saved() override;
  std::uint64_t branch_signature() const override;

 private:
  std::vector<std::size_t> argmax_;
  std::vector<int> input_dims_;
  std::vector<int> output_dims_;
};

// Dense layer; any input whose element count equals `in` is flattened.
template <typename T>
class FullyConnected final : public Layer<T> {
 public:
  FullyConnected(int in, int out);

  LayerKind kind() const override { return LayerKind::kFullyConnected; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<Tensor<T>*> parameters() override { return {&weight_, &bias_}; }
  std::vector<const Tensor<T>*> parameters() const override { return {&weight_, &bias_}; }
  std::vector<std::string> parameter_names() const override { return {"weight", "bias"}; }
  void initialize(Rng& rng) override;
  void clear_saved() override { saved_.reset(); }

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  int in_, out_;
  Tensor<T> weight_;  // out x in
  Tensor<T> bias_;    // out
  std::optional<Tensor<T>> saved_;  // input
};

// Inverted dropout: in training mode kept units are scaled by 1/(1 - rate),
// so inference mode is exactly the identity.
template <typename T>
class Dropout final : public Layer<T> {
 public:
  explicit Dropout(double rate, std::uint64_t seed = 0);

  LayerKind kind() const override { return LayerKind::kDropout; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void initialize(Rng& rng) override;
  void clear_saved() override;
  double rate() const { return rate_; }

 private:
  double rate_;
  Rng rng_;
  bool saved_training_ = false;
  bool has_saved_ = false;
  std::vector<T> mask_;
};

// Nearest-neighbour sampling of a channels x H x W input on an inclusive
// uniform grid of target_h x target_w positions: row i reads source row
// round(i * (H - 1) / (target_h - 1)). Gradients flow back only to sampled
// source pixels, accumulating where a source pixel is read more than once.
template <typename T>
class UniformSubsample final : public Layer<T> {
 public:
  UniformSubsample(int target_h, int target_w);

  LayerKind kind() const override { return LayerKind::kUniformSubsample; }
  std::string describe() const override;
  Tensor<T> forward(const Tensor<T>& input, bool training) override;
  Tensor<T> infer(const Tensor<T>& input) const override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void clear_saved() override;

  static std::vector<int> grid(int source, int target);

 private:
  int target_h_, target_w_;
  std::vector<int> input_dims_;
  std::vector<int> rows_, cols_;
};

}  // namespace xyzcycle::nn
