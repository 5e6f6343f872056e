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

#include "xyzcycle/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xyzcycle/error.hpp"

namespace xyzcycle {

PlanarImage::PlanarImage(int height, int width, double fill)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    throw InvalidInputError("image dimensions must be positive, got " + std::to_string(height) +
                            "x" + std::to_string(width));
  }
  samples_.assign(pixel_count() * kChannels, fill);
}

PlanarImage::PlanarImage(int height, int width, std::vector<double> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  if (height < 1 || width < 1) {
    throw InvalidInputError("image dimensions must be positive, got " + std::to_string(height) +
                            "x" + std::to_string(width));
  }
  if (samples_.size() != pixel_count() * kChannels) {
    throw ShapeError("sample buffer of length " + std::to_string(samples_.size()) +
                     " does not match " + std::to_string(height) + "x" + std::to_string(width) +
                     "x3");
  }
}

void require_finite(const PlanarImage& img, std::string_view what) {
  if (img.empty()) {
    throw InvalidInputError(std::string(what) + ": empty image");
  }
  for (double v : img.samples()) {
    if (!std::isfinite(v)) {
      throw InvalidInputError(std::string(what) + ": non-finite sample");
    }
  }
}

void require_same_shape(const PlanarImage& a, const PlanarImage& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": shape " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + "x3 vs " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()) + "x3");
  }
}

PlanarImage clamp(const PlanarImage& img, double lo, double hi) {
  PlanarImage out = img;
  for (double& v : out.samples()) v = std::clamp(v, lo, hi);
  return out;
}

PlanarImage clamp_min(const PlanarImage& img, double lo) {
  PlanarImage out = img;
  for (double& v : out.samples()) v = std::max(v, lo);
  return out;
}

PlanarImage add(const PlanarImage& a, const PlanarImage& b) {
  require_same_shape(a, b, "add");
  PlanarImage out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

PlanarImage subtract(const PlanarImage& a, const PlanarImage& b) {
  require_same_shape(a, b, "subtract");
  PlanarImage out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

PlanarImage scale(const PlanarImage& img, double factor) {
  PlanarImage out = img;
  for (double& v : out.samples()) v *= factor;
  return out;
}

double mean_value(const PlanarImage& img) {
  if (img.empty()) return 0.0;
  const auto s = img.samples();
  return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

double mean_luma(const PlanarImage& img) {
  if (img.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    acc += 0.2126 * img[3 * p] + 0.7152 * img[3 * p + 1] + 0.0722 * img[3 * p + 2];
  }
  return acc / static_cast<double>(img.pixel_count());
}

}  // namespace xyzcycle
