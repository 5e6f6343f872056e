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

#include <vector>

#include "xyzcycle/image.hpp"

namespace xyzcycle {

// Normalized 1-D Gaussian taps, radius ceil(3 sigma). sigma <= 0 yields {1}.
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian blur with mirrored (half-sample symmetric) borders.
PlanarImage gaussian_blur(const PlanarImage& img, double sigma);

// Bilinear resampling of the source window [y0, y0 + src_h) x [x0, x0 + src_w)
// onto an out_h x out_w grid, pixel centers aligned.
PlanarImage resample_window(const PlanarImage& img, double y0, double x0, double src_h,
                            double src_w, int out_h, int out_w);

PlanarImage flip_horizontal(const PlanarImage& img);
PlanarImage flip_vertical(const PlanarImage& img);

}  // namespace xyzcycle
