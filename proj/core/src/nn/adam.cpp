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

#include "xyzcycle/nn/adam.hpp"

#include <cmath>

#include "xyzcycle/error.hpp"

namespace xyzcycle::nn {

template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, AdamState& state, double lr,
               double weight_decay) {
  if (state.first_moment.empty()) {
    state.first_moment.resize(params.size());
    state.second_moment.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.first_moment[i].assign(params[i]->size(), 0.0);
      state.second_moment[i].assign(params[i]->size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks " +
                     std::to_string(state.first_moment.size()) + " tensors, got " +
                     std::to_string(params.size()));
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(state.beta1, t);
  const double correction2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& p = *params[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != p.size()) {
      throw ShapeError("adam_step: moment buffer " + std::to_string(i) + " has " +
                       std::to_string(m.size()) + " entries, parameter has " +
                       std::to_string(p.size()));
    }
    const bool has_grad = p.has_grad();
    auto values = p.values();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double w = static_cast<double>(values[k]);
      double g = has_grad ? static_cast<double>(p.grad()[k]) : 0.0;
      g += 2.0 * weight_decay * w;
      m[k] = state.beta1 * m[k] + (1.0 - state.beta1) * g;
      v[k] = state.beta2 * v[k] + (1.0 - state.beta2) * g * g;
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      values[k] = static_cast<T>(w - lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
  }
}

template void adam_step(const std::vector<Tensor<float>*>&, AdamState&, double, double);
template void adam_step(const std::vector<Tensor<double>*>&, AdamState&, double, double);

}  // namespace xyzcycle::nn
