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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xyzcycle::nn {

// Dense n-dimensional buffer with an optional gradient buffer of the same
// shape. Images use the rank-3 layout channels x height x width.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> dims, T fill = T{0});
  Tensor(std::vector<int> dims, std::vector<T> values);

  const std::vector<int>& dims() const { return dims_; }
  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(static_cast<std::size_t>(i)); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool has_grad() const { return !grad_.empty(); }
  // Allocates a zeroed gradient buffer if none exists yet.
  void ensure_grad();
  void zero_grad();
  void drop_grad() { grad_.clear(); }
  std::span<T> grad() { return grad_; }
  std::span<const T> grad() const { return grad_; }

  bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }
  std::string shape_string() const;

  // Same values, new dimensions; the element count must be preserved.
  Tensor reshaped(std::vector<int> dims) const;

 private:
  std::vector<int> dims_;
  std::vector<T> values_;
  std::vector<T> grad_;
};

std::string shape_string(const std::vector<int>& dims);
std::size_t element_count(const std::vector<int>& dims);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace xyzcycle::nn
