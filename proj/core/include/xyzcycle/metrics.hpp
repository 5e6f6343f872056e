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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/image.hpp"

namespace xyzcycle::metrics {

// Returned for identical images instead of +inf.
inline constexpr double kPsnrCap = 300.0;

double psnr(const PlanarImage& a, const PlanarImage& b, double peak = 1.0);

// Mean SSIM over all fully covered 11x11 windows (Gaussian weights, sigma
// 1.5), K1 = 0.01, K2 = 0.03, dynamic range `peak`, averaged over channels.
double ssim(const PlanarImage& a, const PlanarImage& b, double peak = 1.0);

struct MetricSummary {
  double avg = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  std::size_t n = 0;
};

// Quartiles by linear interpolation at position q * (n - 1) of the sorted sample.
MetricSummary summarize(std::span<const double> values);

double angular_error(const color::Vec3& l1, const color::Vec3& l2);

struct ReportRow {
  std::string image_id;
  std::string metric;
  double value = 0.0;
};

// "image_id,metric,value" rows followed by Avg, Q1, Q2 and Q3 rows per metric
// (metrics in first-seen order).
void write_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

// One line per metric: "metric,Avg,Q1,Q2,Q3,n".
void write_summary(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

}  // namespace xyzcycle::metrics
