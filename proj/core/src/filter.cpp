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

#include "xyzcycle/filter.hpp"

#include <algorithm>
#include <cmath>

#include "xyzcycle/error.hpp"

namespace xyzcycle {

namespace {

int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

PlanarImage gaussian_blur(const PlanarImage& img, double sigma) {
  require_finite(img, "gaussian_blur");
  const auto k = gaussian_kernel(sigma);
  if (k.size() == 1) return img;
  const int r = static_cast<int>(k.size() / 2);
  const int h = img.height(), w = img.width();
  PlanarImage tmp(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(y, mirror(x + i, w), c);
        tmp.at(y, x, c) = acc;
      }
  PlanarImage out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(mirror(y + i, h), x, c);
        out.at(y, x, c) = acc;
      }
  return out;
}

PlanarImage resample_window(const PlanarImage& img, double y0, double x0, double src_h,
                            double src_w, int out_h, int out_w) {
  if (out_h < 1 || out_w < 1 || !(src_h > 0.0) || !(src_w > 0.0)) {
    throw InvalidInputError("resample_window: invalid window");
  }
  const int h = img.height(), w = img.width();
  const double sy = src_h / out_h, sx = src_w / out_w;
  PlanarImage out(out_h, out_w);
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp(y0 + (y + 0.5) * sy - 0.5, 0.0, h - 1.0);
    const int iy = std::min(static_cast<int>(fy), h - 1);
    const int iy1 = std::min(iy + 1, h - 1);
    const double ty = fy - iy;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp(x0 + (x + 0.5) * sx - 0.5, 0.0, w - 1.0);
      const int ix = std::min(static_cast<int>(fx), w - 1);
      const int ix1 = std::min(ix + 1, w - 1);
      const double tx = fx - ix;
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - tx) * img.at(iy, ix, c) + tx * img.at(iy, ix1, c);
        const double bot = (1 - tx) * img.at(iy1, ix, c) + tx * img.at(iy1, ix1, c);
        out.at(y, x, c) = (1 - ty) * top + ty * bot;
      }
    }
  }
  return out;
}

PlanarImage flip_horizontal(const PlanarImage& img) {
  PlanarImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, img.width() - 1 - x, c);
  return out;
}

PlanarImage flip_vertical(const PlanarImage& img) {
  PlanarImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(img.height() - 1 - y, x, c);
  return out;
}

}  // namespace xyzcycle
