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
#include <vector>

#include "xyzcycle/nn/tensor.hpp"

namespace xyzcycle::nn {

// Bias-corrected Adam. Moment buffers are created lazily on the first step
// and bound to the parameter list's order.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// One update from the parameters' grad buffers. weight_decay adds
// 2 * weight_decay * w to each gradient before the moment update (an L2
// penalty weight_decay * ||w||^2 on the loss). Parameters without a grad
// buffer are treated as having zero loss gradient.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, AdamState& state, double lr,
               double weight_decay = 0.0);

}  // namespace xyzcycle::nn
