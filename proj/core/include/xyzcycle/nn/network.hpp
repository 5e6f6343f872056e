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
#include <string>
#include <utility>
#include <vector>

#include "xyzcycle/nn/layers.hpp"

namespace xyzcycle::nn {

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T>* tensor;
};

// Ordered chain of layers. Forward records activations in each layer; a
// single backward must follow before the next forward if gradients are wanted.
template <typename T>
class Sequential {
 public:
  Sequential() = default;
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor<T> forward(const Tensor<T>& input);
  Tensor<T> backward(const Tensor<T>& grad_out);
  // Inference-mode pass that records no activations.
  Tensor<T> infer(const Tensor<T>& input) const;

  void set_training(bool training) { training_ = training; }
  bool training() const { return training_; }

  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  std::vector<Tensor<T>*> parameters();
  std::vector<const Tensor<T>*> parameters() const;
  // Names are "<prefix>.<layer index>.<weight|bias>".
  std::vector<NamedParameter<T>> named_parameters(const std::string& prefix);
  std::size_t parameter_count() const;

  void initialize(std::uint64_t seed);
  void zero_grad();
  void clear_saved();

  bool has_active_dropout() const;
  std::uint64_t branch_signature() const;

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  bool training_ = false;
};

extern template class Sequential<float>;
extern template class Sequential<double>;

// Copies parameter values between two networks of identical structure (e.g.
// float <-> double). Throws ShapeError on any structural mismatch.
template <typename Dst, typename Src>
void copy_parameters(Sequential<Dst>& dst, Sequential<Src>& src);

}  // namespace xyzcycle::nn
