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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "test_util.hpp"
#include "xyzcycle/error.hpp"
#include "xyzcycle/metrics.hpp"
#include "xyzcycle/polymap.hpp"

namespace xyzcycle::poly {
namespace {

using testing::max_abs_diff;
using testing::random_image;

PlanarImage pixel(double r, double g, double b) { return PlanarImage(1, 1, std::vector<double>{r, g, b}); }

PolyMatrix random_matrix(std::uint64_t seed) {
  Rng rng(seed);
  PolyMatrix::Storage m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < kTerms; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
  return PolyMatrix(m);
}

// Per-pixel brute force of psi(M phi(img)).
PlanarImage brute_apply(const PolyMatrix& m, const PlanarImage& img) {
  PlanarImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
      const double phi[6] = {r, g, b, r * r, g * g, b * b};
      for (int row = 0; row < 3; ++row) {
        double acc = 0.0;
        for (int k = 0; k < 6; ++k) acc += m(row, k) * phi[k];
        out.at(y, x, row) = acc;
      }
    }
  return out;
}

TEST(ExpandPhi, Definition) {
  const auto phi = expand_phi(pixel(0.5, 0.2, 0.1));
  const double expect[6] = {0.5, 0.2, 0.1, 0.25, 0.04, 0.01};
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(phi(k, 0), expect[k], 1e-15);
  EXPECT_EQ(expand_phi(pixel(0, 0, 0)).col(0).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(expand_phi(pixel(1, 1, 1)).col(0), (Eigen::Matrix<double, 6, 1>::Ones()));
}

TEST(ExpandPhi, RowMajorPixelOrder) {
  const auto img = random_image(3, 4, 1);
  const auto phi = expand_phi(img);
  ASSERT_EQ(phi.cols(), 12);
  EXPECT_EQ(phi(0, 1 * 4 + 2), img.at(1, 2, 0));
  EXPECT_EQ(phi(5, 2 * 4 + 3), img.at(2, 3, 2) * img.at(2, 3, 2));
}

TEST(ApplyPoly, IdentityZeroAndSquareTerm) {
  const auto img = random_image(5, 7, 2);
  EXPECT_EQ(apply_poly(PolyMatrix::identity(), img), img);
  EXPECT_EQ(apply_poly(PolyMatrix::zero(), img), PlanarImage(5, 7));
  PolyMatrix::Storage m = PolyMatrix::Storage::Zero();
  m(0, 3) = 1.0;
  EXPECT_NEAR(apply_poly(PolyMatrix(m), pixel(0.5, 0.2, 0.1))[0], 0.25, 1e-15);
}

TEST(ApplyPoly, MatchesBruteForceOracle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = random_matrix(100 + s);
    const auto img = random_image(8, 8, s, -0.5, 1.5);
    EXPECT_LE(max_abs_diff(apply_poly(m, img), brute_apply(m, img)), 1e-12);
  }
}

TEST(FitPoly, ExactRecovery) {
  const auto truth = random_matrix(7);
  std::vector<PlanarImage> src{random_image(16, 16, 3), random_image(9, 11, 4)};
  std::vector<PlanarImage> dst;
  for (const auto& s : src) dst.push_back(apply_poly(truth, s));
  FitOptions o;
  o.ridge = 0.0;
  const auto fit = fit_poly(src, dst, o);
  EXPECT_LT((fit.entries() - truth.entries()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitPoly, SelfFitReproducesInput) {
  const std::vector<PlanarImage> src{random_image(12, 12, 9)};
  FitOptions o;
  o.ridge = 0.0;
  const auto fit = fit_poly(src, src, o);
  EXPECT_LT(max_abs_diff(apply_poly(fit, src[0]), src[0]), 1e-8);
}

TEST(FitPoly, ConstantImageIsRankDeficient) {
  const std::vector<PlanarImage> src{PlanarImage(4, 4, 0.3)};
  FitOptions o;
  o.ridge = 0.0;
  EXPECT_THROW(fit_poly(src, src, o), RankError);
}

TEST(FitPoly, ShapeMismatch) {
  const std::vector<PlanarImage> a{random_image(4, 4, 1)}, b{random_image(4, 5, 1)};
  EXPECT_THROW(fit_poly(a, b), ShapeError);
}

double residual(const PolyMatrix& m, const PlanarImage& src, const PlanarImage& dst) {
  const auto p = apply_poly(m, src);
  double e = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) e += (p[i] - dst[i]) * (p[i] - dst[i]);
  return e;
}

TEST(FitPoly, ResidualMonotoneInRidge) {
  const std::vector<PlanarImage> src{random_image(10, 10, 21)};
  std::vector<PlanarImage> dst{random_image(10, 10, 22)};
  double previous = -1.0;
  for (double ridge : {0.0, 1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
    FitOptions o;
    o.ridge = ridge;
    const double r = residual(fit_poly(src, dst, o), src[0], dst[0]);
    EXPECT_GE(r, previous - 1e-12) << "ridge " << ridge;
    previous = r;
  }
}

// The quadratic model nests the 3x3 linear one.
TEST(FitPoly, NestsLinearModel) {
  const auto src = random_image(16, 16, 31);
  PlanarImage dst(16, 16);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::pow(src[i], 0.45);
  FitOptions o;
  o.ridge = 0.0;
  const auto quad = fit_poly(std::vector{src}, std::vector{dst}, o);

  Eigen::MatrixXd a(src.pixel_count(), 3), b(src.pixel_count(), 3);
  for (std::size_t p = 0; p < src.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c) {
      a(static_cast<Eigen::Index>(p), c) = src[3 * p + c];
      b(static_cast<Eigen::Index>(p), c) = dst[3 * p + c];
    }
  const Eigen::MatrixXd lin = a.colPivHouseholderQr().solve(b);
  PlanarImage lin_out(16, 16);
  const Eigen::MatrixXd pred = a * lin;
  for (std::size_t p = 0; p < src.pixel_count(); ++p)
    for (int c = 0; c < 3; ++c) lin_out[3 * p + c] = pred(static_cast<Eigen::Index>(p), c);
  EXPECT_GE(metrics::psnr(apply_poly(quad, src), dst), metrics::psnr(lin_out, dst));
}

TEST(PolyMatrixText, RoundTripIsExact) {
  const auto m = random_matrix(5);
  const auto text = m.to_text();
  int lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(PolyMatrix::from_text(text), m);
  EXPECT_THROW(PolyMatrix::from_text("1 2 3\n"), FormatError);
}

TEST(PolyMatrix, RowMajorLayout) {
  std::array<double, 18> v{};
  for (int i = 0; i < 18; ++i) v[static_cast<std::size_t>(i)] = i;
  const auto m = PolyMatrix::from_row_major(v);
  EXPECT_EQ(m(1, 2), 8.0);
  EXPECT_EQ(m.row_major(), v);
}

}  // namespace
}  // namespace xyzcycle::poly
