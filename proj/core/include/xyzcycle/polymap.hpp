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

#include <Eigen/Core>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "xyzcycle/image.hpp"

// Quadratic per-pixel color transform: each pixel [R, G, B] is expanded to
// [R, G, B, R^2, G^2, B^2] and mapped through a 3x6 matrix.
namespace xyzcycle::poly {

inline constexpr int kTerms = 6;

using PhiMatrix = Eigen::Matrix<double, kTerms, Eigen::Dynamic>;

class PolyMatrix {
 public:
  using Storage = Eigen::Matrix<double, 3, kTerms>;

  PolyMatrix() : m_(Storage::Zero()) {}
  explicit PolyMatrix(const Storage& m);

  // [I3 | 0]: reproduces the input exactly.
  static PolyMatrix identity();
  static PolyMatrix zero() { return PolyMatrix(); }
  // 18 values in row-major order, the layout produced by the global sub-networks.
  static PolyMatrix from_row_major(std::span<const double> values);

  const Storage& entries() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }
  std::array<double, 18> row_major() const;

  // Three lines of six values, shortest round-trip decimal form, '.' decimal
  // separator regardless of locale.
  std::string to_text() const;
  static PolyMatrix from_text(const std::string& text);

  friend bool operator==(const PolyMatrix& a, const PolyMatrix& b) { return a.m_ == b.m_; }

 private:
  Storage m_;
};

// Column k is [R, G, B, R^2, G^2, B^2] of pixel k (row-major pixel order).
PhiMatrix expand_phi(const PlanarImage& img);

// psi(M * phi(img)). Not clamped.
PlanarImage apply_poly(const PolyMatrix& m, const PlanarImage& img);

struct FitOptions {
  double ridge = 1e-8;
  // Each image is read on a uniform grid of at most this many rows and
  // columns; 0 disables subsampling.
  int max_grid = 128;
};

// argmin_M sum ||psi(M phi(src)) - dst||^2 + ridge ||M||^2 over all pairs.
// Throws RankError when ridge == 0 and the 6x6 normal matrix is singular.
PolyMatrix fit_poly(std::span<const PlanarImage> src, std::span<const PlanarImage> dst,
                    const FitOptions& options = {});

// Name of expansion term i, e.g. "R" or "G^2".
const char* term_name(int i);

}  // namespace xyzcycle::poly
