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

#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/error.hpp"

namespace xyzcycle::color {
namespace {

using testing::max_abs_diff;
using testing::random_image;

PlanarImage pixel(double r, double g, double b) { return PlanarImage(1, 1, std::vector<double>{r, g, b}); }

TEST(GammaTransfer, EndpointsAreFixed) {
  const auto img = pixel(0.0, 1.0, 0.0);
  const auto d = gamma_transfer(img, 2.2, TransferDirection::kDecode);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_EQ(d[1], 1.0);
}

TEST(GammaTransfer, EncodeQuarter) {
  // exp(ln(0.25) / 2.2) = 0.532521..., frozen from a long-double evaluation.
  const long double oracle = std::exp(std::log(0.25L) / 2.2L);
  EXPECT_NEAR(static_cast<double>(oracle), 0.5325, 1e-4);
  const auto e = gamma_transfer(pixel(0.25, 0.25, 0.25), 2.2, TransferDirection::kEncode);
  EXPECT_NEAR(e[0], 0.5325, 1e-4);
  EXPECT_NEAR(e[0], static_cast<double>(oracle), 1e-15);
}

TEST(GammaTransfer, RoundTripProperty) {
  const auto img = random_image(16, 16, 3);
  for (double g : {0.5, 1.0, 2.2, 3.0}) {
    const auto back = gamma_transfer(gamma_transfer(img, g, TransferDirection::kDecode), g,
                                     TransferDirection::kEncode);
    EXPECT_LT(max_abs_diff(back, img), 1e-6) << "gamma " << g;
  }
}

TEST(GammaTransfer, RejectsNonFinite) {
  auto img = pixel(0.1, std::numeric_limits<double>::quiet_NaN(), 0.2);
  EXPECT_THROW(gamma_transfer(img, 2.2, TransferDirection::kDecode), InvalidInputError);
  EXPECT_THROW(gamma_transfer(pixel(0.1, 0.1, 0.1), 0.0, TransferDirection::kDecode), InvalidInputError);
}

TEST(XyzMatrix, WhiteMapsToD65) {
  const auto xyz = xyz_matrix_transform(pixel(1, 1, 1), XyzDirection::kSrgbToXyz);
  EXPECT_NEAR(xyz[0], 0.9505, 1e-3);
  EXPECT_NEAR(xyz[1], 1.0000, 1e-3);
  EXPECT_NEAR(xyz[2], 1.0888, 1e-3);
}

// Independent derivation of the linear-sRGB -> XYZ matrix from the primaries'
// chromaticities and the D65 white.
TEST(XyzMatrix, MatchesPrimariesDerivation) {
  const double xs[3] = {0.64, 0.30, 0.15}, ys[3] = {0.33, 0.60, 0.06};
  Mat3 p;
  for (int c = 0; c < 3; ++c) p.col(c) = Vec3(xs[c] / ys[c], 1.0, (1 - xs[c] - ys[c]) / ys[c]);
  const Vec3 white(0.3127 / 0.3290, 1.0, (1 - 0.3127 - 0.3290) / 0.3290);
  const Vec3 s = p.inverse() * white;
  const Mat3 m = p * s.asDiagonal();
  EXPECT_LT((m - srgb_to_xyz_matrix()).cwiseAbs().maxCoeff(), 5e-4);
  EXPECT_LT((srgb_to_xyz_matrix() * xyz_to_srgb_matrix() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(XyzMatrix, BlackAndRoundTrip) {
  const auto z = xyz_matrix_transform(pixel(0, 0, 0), XyzDirection::kSrgbToXyz);
  EXPECT_EQ(z, pixel(0, 0, 0));
  const auto img = random_image(8, 9, 5);
  const auto back = xyz_matrix_transform(xyz_matrix_transform(img, XyzDirection::kSrgbToXyz),
                                         XyzDirection::kXyzToSrgb);
  EXPECT_LT(max_abs_diff(back, img), 1e-6);
}

TEST(XyzMatrix, LinearityProperty) {
  const auto a = random_image(6, 6, 11), b = random_image(6, 6, 12);
  const double alpha = 0.7, beta = -1.3;
  PlanarImage mix(6, 6);
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
  const auto ta = xyz_matrix_transform(a, XyzDirection::kSrgbToXyz);
  const auto tb = xyz_matrix_transform(b, XyzDirection::kSrgbToXyz);
  const auto tm = xyz_matrix_transform(mix, XyzDirection::kSrgbToXyz);
  for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_NEAR(tm[i], alpha * ta[i] + beta * tb[i], 1e-6);
}

TEST(ChromaticAdapt, IdentityForEqualWhites) {
  const auto img = random_image(5, 5, 2);
  for (auto cat : {CatKind::kBradford, CatKind::kSharp, CatKind::kVonKries}) {
    EXPECT_LT(max_abs_diff(chromatic_adapt(img, WhitePoint::d65(), WhitePoint::d65(), cat), img), 1e-9);
  }
}

TEST(ChromaticAdapt, SourceWhiteMapsToDestinationWhite) {
  for (auto cat : {CatKind::kBradford, CatKind::kSharp, CatKind::kVonKries}) {
    const Vec3 w = WhitePoint::a().xyz;
    const auto out = chromatic_adapt(pixel(w[0], w[1], w[2]), WhitePoint::a(), WhitePoint::d50(), cat);
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(out[c], WhitePoint::d50().xyz[c], 1e-12);
  }
}

// Bradford by hand with the published cone matrix.
TEST(ChromaticAdapt, BradfordD65ToD50) {
  Mat3 b;
  b << 0.8951, 0.2664, -0.1614, -0.7502, 1.7135, 0.0367, 0.0389, -0.0685, 1.0296;
  const Vec3 s = b * Vec3(0.95047, 1.0, 1.08883), d = b * Vec3(0.96422, 1.0, 0.82521);
  const Mat3 oracle = b.inverse() * (d.array() / s.array()).matrix().asDiagonal() * b;
  const Vec3 expect = oracle * Vec3(0.9505, 1.0, 1.0888);
  EXPECT_NEAR(expect[0], 0.9642, 1e-3);
  EXPECT_NEAR(expect[2], 0.8249, 1e-3);

  const auto out = chromatic_adapt(pixel(0.9505, 1.0, 1.0888), WhitePoint::d65(), WhitePoint::d50(),
                                   CatKind::kBradford);
  EXPECT_NEAR(out[0], 0.9642, 1e-3);
  EXPECT_NEAR(out[1], 1.0000, 1e-3);
  EXPECT_NEAR(out[2], 0.8249, 1e-3);
  EXPECT_LT((adaptation_matrix(WhitePoint::d65(), WhitePoint::d50(), CatKind::kBradford) - oracle)
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(ChromaticAdapt, ZeroConeResponseIsSingular) {
  // A "white" whose von Kries cone response has a zero component.
  const Mat3& vk = cat_matrix(CatKind::kVonKries);
  const Vec3 bad = vk.inverse() * Vec3(1.0, 0.0, 1.0);
  EXPECT_THROW(adaptation_matrix(WhitePoint{bad}, WhitePoint::d65(), CatKind::kVonKries),
               SingularAdaptationError);
}

TEST(StandardBaseline, RoundTripAwayFromClamp) {
  const auto img = random_image(12, 12, 8, 0.02, 0.98);
  const auto back = standard_baseline(standard_baseline(img, BaselineDirection::kUnprocess),
                                      BaselineDirection::kRender);
  EXPECT_LT(max_abs_diff(back, img), 1e-5);
}

TEST(StandardBaseline, BlackAndGray) {
  EXPECT_EQ(standard_baseline(pixel(0, 0, 0), BaselineDirection::kUnprocess), pixel(0, 0, 0));
  const auto g = standard_baseline(pixel(0.5, 0.5, 0.5), BaselineDirection::kUnprocess);
  EXPECT_NEAR(g[1], 0.2176, 1e-3);
  EXPECT_NEAR(g[1], std::pow(0.5, 2.2), 1e-6);
}

TEST(StandardBaseline, RenderClampsNegativeXyz) {
  // Pure negative X lands outside the gamut; output must stay displayable.
  const auto out = standard_baseline(pixel(-0.5, 0.2, 0.1), BaselineDirection::kRender);
  for (double v : out.samples()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(SrgbCurve, PiecewiseInverse) {
  for (double v = 0.0; v <= 1.0; v += 0.01) EXPECT_NEAR(srgb_decode(srgb_encode(v)), v, 1e-12);
  EXPECT_NEAR(srgb_encode(0.0031308), 0.0031308 * 12.92, 1e-9);
}

}  // namespace
}  // namespace xyzcycle::color
