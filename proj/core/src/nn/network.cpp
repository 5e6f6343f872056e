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

#include "xyzcycle/nn/network.hpp"

#include "xyzcycle/error.hpp"

namespace xyzcycle::nn {

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& input) {
  if (layers_.empty()) return input;
  Tensor<T> x = layers_.front()->forward(input, training_);
  for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->forward(x, training_);
  return x;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& grad_out) {
  if (layers_.empty()) return grad_out;
  Tensor<T> g = layers_.back()->backward(grad_out);
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->backward(g);
  return g;
}

template <typename T>
Tensor<T> Sequential<T>::infer(const Tensor<T>& input) const {
  if (layers_.empty()) return input;
  Tensor<T> x = layers_.front()->infer(input);
  for (std::size_t i = 1; i < layers_.size(); ++i) x = layers_[i]->infer(x);
  return x;
}

template <typename T>
std::vector<const Tensor<T>*> Sequential<T>::parameters() const {
  std::vector<const Tensor<T>*> out;
  for (const auto& layer : layers_) {
    const Layer<T>& l = *layer;
    for (const auto* p : l.parameters()) out.push_back(p);
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>*> Sequential<T>::parameters() {
  std::vector<Tensor<T>*> out;
  for (auto& layer : layers_)
    for (auto* p : layer->parameters()) out.push_back(p);
  return out;
}

template <typename T>
std::vector<NamedParameter<T>> Sequential<T>::named_parameters(const std::string& prefix) {
  std::vector<NamedParameter<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto params = layers_[i]->parameters();
    auto names = layers_[i]->parameter_names();
    for (std::size_t k = 0; k < params.size(); ++k) {
      out.push_back({prefix + "." + std::to_string(i) + "." + names[k], params[k]});
    }
  }
  return out;
}

template <typename T>
std::size_t Sequential<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer->parameter_count();
  return n;
}

template <typename T>
void Sequential<T>::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : layers_) layer->initialize(rng);
}

template <typename T>
void Sequential<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
void Sequential<T>::clear_saved() {
  for (auto& layer : layers_) layer->clear_saved();
}

template <typename T>
bool Sequential<T>::has_active_dropout() const {
  if (!training_) return false;
  for (const auto& layer : layers_) {
    if (layer->kind() == LayerKind::kDropout) {
      const auto& d = static_cast<const Dropout<T>&>(*layer);
      if (d.rate() > 0.0) return true;
    }
  }
  return false;
}

template <typename T>
std::uint64_t Sequential<T>::branch_signature() const {
  std::uint64_t h = 0;
  for (const auto& layer : layers_) h = h * 1099511628211ULL ^ layer->branch_signature();
  return h;
}

template class Sequential<float>;
template class Sequential<double>;

template <typename Dst, typename Src>
void copy_parameters(Sequential<Dst>& dst, Sequential<Src>& src) {
  auto d = dst.parameters();
  auto s = src.parameters();
  if (d.size() != s.size()) {
    throw ShapeError("copy_parameters: " + std::to_string(d.size()) + " vs " +
                     std::to_string(s.size()) + " parameter tensors");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i]->dims() != s[i]->dims()) {
      throw ShapeError("copy_parameters: tensor " + std::to_string(i) + " shape " +
                       d[i]->shape_string() + " vs " + s[i]->shape_string());
    }
    for (std::size_t k = 0; k < d[i]->size(); ++k) (*d[i])[k] = static_cast<Dst>((*s[i])[k]);
  }
}

template void copy_parameters(Sequential<float>&, Sequential<float>&);
template void copy_parameters(Sequential<float>&, Sequential<double>&);
template void copy_parameters(Sequential<double>&, Sequential<float>&);
template void copy_parameters(Sequential<double>&, Sequential<double>&);

}  // namespace xyzcycle::nn
