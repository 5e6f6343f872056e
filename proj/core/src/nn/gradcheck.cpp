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

#include "xyzcycle/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xyzcycle/error.hpp"
#include "xyzcycle/random.hpp"

namespace xyzcycle::nn {

namespace {

std::vector<std::size_t> pick(std::size_t n, std::size_t max_samples, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (max_samples == 0 || max_samples >= n) return idx;
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < max_samples; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  idx.resize(max_samples);
  return idx;
}

}  // namespace

GradCheckReport grad_check_coordinates(std::vector<Coordinate> coordinates,
                                       const std::function<double()>& loss, double eps,
                                       double floor,
                                       const std::function<std::uint64_t()>& signature) {
  GradCheckReport report;
  std::uint64_t base_sig = 0;
  if (signature) {
    loss();
    base_sig = signature();
  }
  for (auto& c : coordinates) {
    const double original = *c.value;
    *c.value = original + eps;
    const double plus = loss();
    const bool kink_plus = signature && signature() != base_sig;
    *c.value = original - eps;
    const double minus = loss();
    const bool kink_minus = signature && signature() != base_sig;
    *c.value = original;
    if (kink_plus || kink_minus) {
      ++report.skipped_at_kinks;
      continue;
    }
    const double numeric = (plus - minus) / (2.0 * eps);
    const double denom = std::max({std::abs(c.analytic), std::abs(numeric), floor});
    const double rel = std::abs(c.analytic - numeric) / denom;
    ++report.checked;
    if (report.worst.empty() || rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst = c.label;
    }
  }
  return report;
}

GradCheckReport grad_check(Sequential<double>& net, const Tensor<double>& input,
                           const GradCheckOptions& options) {
  if (net.has_active_dropout()) {
    throw DeterminismError(
        "grad_check: network contains dropout in training mode; finite differences are "
        "meaningless for a stochastic layer");
  }
  Rng rng(options.seed);

  Tensor<double> x = input;
  Tensor<double> y = net.forward(x);
  std::vector<double> weights(y.size());
  for (auto& w : weights) w = 0.5 + rng.uniform();

  const auto loss = [&]() {
    const Tensor<double> out = net.forward(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) acc += weights[k] * out[k];
    return acc;
  };

  net.zero_grad();
  y = net.forward(x);
  Tensor<double> seed_grad(y.dims(), std::vector<double>(weights));
  const Tensor<double> grad_in = net.backward(seed_grad);

  std::vector<Coordinate> coords;
  for (auto& np : net.named_parameters("net")) {
    for (std::size_t k : pick(np.tensor->size(), options.max_samples_per_parameter, rng)) {
      coords.push_back({&(*np.tensor)[k], np.tensor->grad()[k],
                        np.name + "[" + std::to_string(k) + "]"});
    }
  }
  for (std::size_t k : pick(x.size(), options.max_input_samples, rng)) {
    coords.push_back({&x[k], grad_in[k], "input[" + std::to_string(k) + "]"});
  }
  return grad_check_coordinates(std::move(coords), loss, options.eps, options.floor,
                                [&net]() { return net.branch_signature(); });
}

}  // namespace xyzcycle::nn
