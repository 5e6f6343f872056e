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
#include <cstdint>
#include <functional>
#include <string>

#include "xyzcycle/nn/network.hpp"

namespace xyzcycle::nn {

struct GradCheckOptions {
  double eps = 1e-6;
  // Coordinates sampled per parameter tensor / from the input; 0 checks all.
  std::size_t max_samples_per_parameter = 0;
  std::size_t max_input_samples = 0;
  std::uint64_t seed = 0;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-3;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose +/- eps probe flipped an activation or pooling decision.
  std::size_t skipped_at_kinks = 0;
  std::string worst;  // "<parameter name>[<index>]" of the worst coordinate
};

// Compares the analytic gradient of the scalar loss sum_k c_k * y_k (fixed
// pseudo-random c_k in [0.5, 1.5]) against central differences, over the
// network's parameters and its input. Throws DeterminismError if the network
// is in training mode and contains dropout.
GradCheckReport grad_check(Sequential<double>& net, const Tensor<double>& input,
                           const GradCheckOptions& options);

inline double grad_check(Sequential<double>& net, const Tensor<double>& input, double eps) {
  GradCheckOptions options;
  options.eps = eps;
  return grad_check(net, input, options).max_relative_error;
}

// Generic variant for composites that are not a single Sequential. `loss`
// evaluates the scalar objective at the current parameter values; `analytic`
// holds the gradient of that objective for each coordinate of `coordinates`.
struct Coordinate {
  double* value;
  double analytic;
  std::string label;
};
GradCheckReport grad_check_coordinates(std::vector<Coordinate> coordinates,
                                       const std::function<double()>& loss, double eps,
                                       double floor = 1e-3,
                                       const std::function<std::uint64_t()>& signature = {});

}  // namespace xyzcycle::nn
