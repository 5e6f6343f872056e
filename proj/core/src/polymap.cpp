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

#include "xyzcycle/polymap.hpp"

#include <Eigen/Cholesky>
#include <charconv>
#include <cmath>
#include <sstream>

#include "xyzcycle/error.hpp"

namespace xyzcycle::poly {

namespace {

using Gram = Eigen::Matrix<double, kTerms, kTerms>;

std::vector<int> grid_indices(int extent, int max_grid) {
  std::vector<int> idx;
  if (max_grid <= 0 || extent <= max_grid) {
    idx.resize(extent);
    for (int i = 0; i < extent; ++i) idx[i] = i;
    return idx;
  }
  idx.resize(max_grid);
  for (int i = 0; i < max_grid; ++i) {
    idx[i] = static_cast<int>(std::lround(static_cast<double>(i) * (extent - 1) / (max_grid - 1)));
  }
  return idx;
}

// Finds the first expansion term whose pivot vanishes during an unpivoted
// Cholesky-style elimination, i.e. the first term linearly dependent on the
// ones before it. Returns -1 for a positive definite matrix.
int first_deficient_term(const Gram& gram) {
  const double scale = std::max(gram.diagonal().maxCoeff(), 1e-300);
  const double tol = 1e-12 * scale;
  Gram work = gram;
  for (int k = 0; k < kTerms; ++k) {
    const double pivot = work(k, k);
    if (!(pivot > tol)) return k;
    for (int i = k + 1; i < kTerms; ++i) {
      const double f = work(i, k) / pivot;
      for (int j = k; j < kTerms; ++j) work(i, j) -= f * work(k, j);
    }
  }
  return -1;
}

}  // namespace

const char* term_name(int i) {
  static constexpr const char* kNames[kTerms] = {"R", "G", "B", "R^2", "G^2", "B^2"};
  return (i >= 0 && i < kTerms) ? kNames[i] : "?";
}

PolyMatrix::PolyMatrix(const Storage& m) : m_(m) {
  if (!m_.allFinite()) throw InvalidInputError("PolyMatrix entries must be finite");
}

PolyMatrix PolyMatrix::identity() {
  Storage m = Storage::Zero();
  m.leftCols<3>().setIdentity();
  return PolyMatrix(m);
}

PolyMatrix PolyMatrix::from_row_major(std::span<const double> values) {
  if (values.size() != 18) {
    throw ShapeError("PolyMatrix expects 18 values, got " + std::to_string(values.size()));
  }
  Storage m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < kTerms; ++c) m(r, c) = values[r * kTerms + c];
  return PolyMatrix(m);
}

std::array<double, 18> PolyMatrix::row_major() const {
  std::array<double, 18> out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < kTerms; ++c) out[r * kTerms + c] = m_(r, c);
  return out;
}

std::string PolyMatrix::to_text() const {
  std::string text;
  char buf[64];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < kTerms; ++c) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), m_(r, c));
      if (c > 0) text += ' ';
      text.append(buf, end);
    }
    text += '\n';
  }
  return text;
}

PolyMatrix PolyMatrix::from_text(const std::string& text) {
  Storage m;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 18; ++i) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r')) ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) {
      throw FormatError("PolyMatrix text: expected 18 numbers, failed at value " +
                        std::to_string(i));
    }
    m(i / kTerms, i % kTerms) = v;
    p = next;
  }
  while (p < end && (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r')) ++p;
  if (p != end) throw FormatError("PolyMatrix text: trailing content after 18 values");
  return PolyMatrix(m);
}

PhiMatrix expand_phi(const PlanarImage& img) {
  const auto n = static_cast<Eigen::Index>(img.pixel_count());
  PhiMatrix phi(kTerms, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (int c = 0; c < 3; ++c) {
      const double v = img[3 * k + c];
      phi(c, k) = v;
      phi(c + 3, k) = v * v;
    }
  }
  return phi;
}

PlanarImage apply_poly(const PolyMatrix& m, const PlanarImage& img) {
  const auto& a = m.entries();
  PlanarImage out(img.height(), img.width());
  for (std::size_t k = 0; k < img.pixel_count(); ++k) {
    const double r = img[3 * k], g = img[3 * k + 1], b = img[3 * k + 2];
    const double rr = r * r, gg = g * g, bb = b * b;
    for (int c = 0; c < 3; ++c) {
      out[3 * k + c] = a(c, 0) * r + a(c, 1) * g + a(c, 2) * b + a(c, 3) * rr + a(c, 4) * gg +
                       a(c, 5) * bb;
    }
  }
  return out;
}

PolyMatrix fit_poly(std::span<const PlanarImage> src, std::span<const PlanarImage> dst,
                    const FitOptions& options) {
  if (src.size() != dst.size()) {
    throw ShapeError("fit_poly: " + std::to_string(src.size()) + " source images vs " +
                     std::to_string(dst.size()) + " targets");
  }
  if (!(options.ridge >= 0.0)) throw InvalidInputError("fit_poly: ridge must be nonnegative");

  Gram gram = Gram::Zero();
  Eigen::Matrix<double, kTerms, 3> cross = Eigen::Matrix<double, kTerms, 3>::Zero();
  std::size_t samples = 0;
  Eigen::Matrix<double, kTerms, 1> phi;
  for (std::size_t i = 0; i < src.size(); ++i) {
    require_same_shape(src[i], dst[i], "fit_poly");
    require_finite(src[i], "fit_poly source");
    require_finite(dst[i], "fit_poly target");
    const auto rows = grid_indices(src[i].height(), options.max_grid);
    const auto cols = grid_indices(src[i].width(), options.max_grid);
    for (int y : rows) {
      for (int x : cols) {
        for (int c = 0; c < 3; ++c) {
          const double v = src[i].at(y, x, c);
          phi[c] = v;
          phi[c + 3] = v * v;
        }
        gram.noalias() += phi * phi.transpose();
        for (int c = 0; c < 3; ++c) cross.col(c) += phi * dst[i].at(y, x, c);
        ++samples;
      }
    }
  }
  if (samples < static_cast<std::size_t>(kTerms)) {
    throw RankError("fit_poly: " + std::to_string(samples) +
                    " samples cannot determine 6 polynomial terms");
  }
  if (options.ridge == 0.0) {
    const int bad = first_deficient_term(gram);
    if (bad >= 0) {
      throw RankError(std::string("fit_poly: normal matrix is rank-deficient; term ") +
                      term_name(bad) + " (dimension " + std::to_string(bad) +
                      ") is linearly dependent on the preceding terms");
    }
  }
  gram.diagonal().array() += options.ridge;
  const Eigen::LDLT<Gram> solver(gram);
  const Eigen::Matrix<double, kTerms, 3> solution = solver.solve(cross);
  return PolyMatrix(solution.transpose());
}

}  // namespace xyzcycle::poly
