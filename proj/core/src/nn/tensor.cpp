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

#include "xyzcycle/nn/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "xyzcycle/error.hpp"

namespace xyzcycle::nn {

std::size_t element_count(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d < 0) throw ShapeError("negative tensor extent in " + shape_string(dims));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const std::vector<int>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s + "]";
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> dims, T fill) : dims_(std::move(dims)) {
  values_.assign(element_count(dims_), fill);
}

template <typename T>
Tensor<T>::Tensor(std::vector<int> dims, std::vector<T> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
  if (element_count(dims_) != values_.size()) {
    throw ShapeError("tensor of shape " + nn::shape_string(dims_) + " cannot hold " +
                     std::to_string(values_.size()) + " values");
  }
}

template <typename T>
void Tensor<T>::ensure_grad() {
  if (grad_.size() != values_.size()) grad_.assign(values_.size(), T{0});
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (grad_.size() != values_.size()) {
    grad_.assign(values_.size(), T{0});
  } else {
    std::fill(grad_.begin(), grad_.end(), T{0});
  }
}

template <typename T>
std::string Tensor<T>::shape_string() const {
  return nn::shape_string(dims_);
}

template <typename T>
Tensor<T> Tensor<T>::reshaped(std::vector<int> dims) const {
  if (element_count(dims) != values_.size()) {
    throw ShapeError("cannot reshape " + shape_string() + " to " + nn::shape_string(dims));
  }
  return Tensor(std::move(dims), values_);
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace xyzcycle::nn
