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
#include <string_view>
#include <vector>

namespace xyzcycle {

// h x w x 3 grid of double samples, stored channel-interleaved in row-major
// pixel order: sample (y, x, c) lives at index (y * width + x) * 3 + c.
//
// The type carries every image state of the cycle (sRGB, XYZ, global layer,
// residual layer). Range constraints depend on the state and are checked by
// the operations that care, not by the container.
class PlanarImage {
 public:
  static constexpr int kChannels = 3;

  PlanarImage() = default;
  PlanarImage(int height, int width, double fill = 0.0);
  PlanarImage(int height, int width, std::vector<double> samples);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(height_) * width_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double& at(int y, int x, int c) { return samples_[index(y, x, c)]; }
  double at(int y, int x, int c) const { return samples_[index(y, x, c)]; }

  double& operator[](std::size_t i) { return samples_[i]; }
  double operator[](std::size_t i) const { return samples_[i]; }

  std::span<double> samples() { return samples_; }
  std::span<const double> samples() const { return samples_; }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * kChannels + c;
  }

  bool same_shape(const PlanarImage& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const PlanarImage&, const PlanarImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> samples_;
};

// Throws InvalidInputError naming `what` if the image is empty or holds NaN/Inf.
void require_finite(const PlanarImage& img, std::string_view what);

// Throws ShapeError naming both shapes when a and b differ in size.
void require_same_shape(const PlanarImage& a, const PlanarImage& b, std::string_view what);

PlanarImage clamp(const PlanarImage& img, double lo, double hi);
PlanarImage clamp_min(const PlanarImage& img, double lo);

// Elementwise a + b and a - b; shapes must match.
PlanarImage add(const PlanarImage& a, const PlanarImage& b);
PlanarImage subtract(const PlanarImage& a, const PlanarImage& b);
PlanarImage scale(const PlanarImage& img, double factor);

double mean_value(const PlanarImage& img);

// Rec. 709 luma weights applied to the three channels; used for brightness
// summaries, not colorimetry.
double mean_luma(const PlanarImage& img);

}  // namespace xyzcycle
