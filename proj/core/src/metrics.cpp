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

#include "xyzcycle/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "xyzcycle/error.hpp"

namespace xyzcycle::metrics {

double psnr(const PlanarImage& a, const PlanarImage& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw InvalidInputError("psnr: peak must be positive");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {

constexpr int kWindow = 11;

std::array<double, kWindow> ssim_taps() {
  std::array<double, kWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    k[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable 'valid' filtering of one channel.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::array<double, kWindow>& k) {
  const int oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace

double ssim(const PlanarImage& a, const PlanarImage& b, double peak) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kWindow || a.width() < kWindow) {
    throw InvalidInputError("ssim: images must be at least 11x11");
  }
  if (!(peak > 0.0)) throw InvalidInputError("ssim: peak must be positive");
  const double c1 = (0.01 * peak) * (0.01 * peak), c2 = (0.03 * peak) * (0.03 * peak);
  const auto k = ssim_taps();
  const int h = a.height(), w = a.width();
  const std::size_t n = a.pixel_count();
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = a[3 * p + c];
      y[p] = b[3 * p + c];
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = filter_valid(x, h, w, k), my = filter_valid(y, h, w, k);
    const auto sxx = filter_valid(xx, h, w, k), syy = filter_valid(yy, h, w, k),
               sxy = filter_valid(xy, h, w, k);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      sum += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += sum / static_cast<double>(mx.size());
  }
  return total / 3.0;
}

MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw InvalidInputError("summarize: empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return t == 0.0 ? v[lo] : v[lo] + t * (v[hi] - v[lo]);
  };
  MetricSummary s;
  s.n = v.size();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.avg = sum / static_cast<double>(v.size());
  s.q1 = quantile(0.25);
  s.q2 = quantile(0.5);
  s.q3 = quantile(0.75);
  return s;
}

double angular_error(const color::Vec3& l1, const color::Vec3& l2) {
  const double n1 = l1.norm(), n2 = l2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw InvalidInputError("angular_error: zero vector");
  const double cosine = std::clamp(l1.dot(l2) / (n1 * n2), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

namespace {

std::vector<std::pair<std::string, std::vector<double>>> group(const std::vector<ReportRow>& rows) {
  std::vector<std::pair<std::string, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == r.metric; });
    if (it == groups.end()) {
      groups.push_back({r.metric, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(r.value);
  }
  return groups;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out.precision(10);
  return out;
}

}  // namespace

void write_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "image_id,metric,value\n";
  for (const auto& r : rows) out << r.image_id << ',' << r.metric << ',' << r.value << '\n';
  for (const auto& [metric, values] : group(rows)) {
    const auto s = summarize(values);
    out << "Avg," << metric << ',' << s.avg << '\n';
    out << "Q1," << metric << ',' << s.q1 << '\n';
    out << "Q2," << metric << ',' << s.q2 << '\n';
    out << "Q3," << metric << ',' << s.q3 << '\n';
  }
}

void write_summary(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "metric,Avg,Q1,Q2,Q3,n\n";
  for (const auto& [metric, values] : group(rows)) {
    const auto s = summarize(values);
    out << metric << ',' << s.avg << ',' << s.q1 << ',' << s.q2 << ',' << s.q3 << ',' << s.n << '\n';
  }
}

}  // namespace xyzcycle::metrics
