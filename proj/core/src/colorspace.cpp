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

#include "xyzcycle/colorspace.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "xyzcycle/error.hpp"

namespace xyzcycle::color {

namespace {

// Linear sRGB primaries (Rec. 709) with D65 white, normalized so Y(white) = 1.
const Mat3 kSrgbToXyz = (Mat3() << 0.4124564, 0.3575761, 0.1804375,  //
                         0.2126729, 0.7151522, 0.0721750,              //
                         0.0193339, 0.1191920, 0.9503041)
                            .finished();

const Mat3 kXyzToSrgb = kSrgbToXyz.inverse();

const Mat3 kBradford = (Mat3() << 0.8951, 0.2664, -0.1614,  //
                        -0.7502, 1.7135, 0.0367,            //
                        0.0389, -0.0685, 1.0296)
                           .finished();

const Mat3 kSharp = (Mat3() << 1.2694, -0.0988, -0.1706,  //
                     -0.8364, 1.8006, 0.0357,             //
                     0.0297, -0.0315, 1.0018)
                        .finished();

// Hunt-Pointer-Estevez cone fundamentals, normalized to D65.
const Mat3 kVonKries = (Mat3() << 0.40024, 0.70760, -0.08081,  //
                        -0.22630, 1.16532, 0.04570,            //
                        0.0, 0.0, 0.91822)
                           .finished();

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidInputError("gamma must be positive and finite, got " + std::to_string(gamma));
  }
}

}  // namespace

WhitePoint WhitePoint::d65() { return {Vec3(0.95047, 1.0, 1.08883)}; }
WhitePoint WhitePoint::d50() { return {Vec3(0.96422, 1.0, 0.82521)}; }
WhitePoint WhitePoint::a() { return {Vec3(1.09850, 1.0, 0.35585)}; }
WhitePoint WhitePoint::e() { return {Vec3(1.0, 1.0, 1.0)}; }

const Mat3& srgb_to_xyz_matrix() { return kSrgbToXyz; }
const Mat3& xyz_to_srgb_matrix() { return kXyzToSrgb; }

const Mat3& cat_matrix(CatKind cat) {
  switch (cat) {
    case CatKind::kBradford:
      return kBradford;
    case CatKind::kSharp:
      return kSharp;
    case CatKind::kVonKries:
      return kVonKries;
  }
  return kBradford;
}

PlanarImage gamma_transfer(const PlanarImage& img, double gamma, TransferDirection direction) {
  require_finite(img, "gamma_transfer");
  require_positive_gamma(gamma);
  const double exponent = direction == TransferDirection::kDecode ? gamma : 1.0 / gamma;
  PlanarImage out = img;
  for (double& v : out.samples()) v = std::pow(std::clamp(v, 0.0, 1.0), exponent);
  return out;
}

double srgb_encode(double linear) {
  const double v = std::clamp(linear, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double encoded) {
  const double v = std::clamp(encoded, 0.0, 1.0);
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

PlanarImage apply_matrix(const Mat3& m, const PlanarImage& img) {
  PlanarImage out = img;
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    const Vec3 v(img[3 * p], img[3 * p + 1], img[3 * p + 2]);
    const Vec3 r = m * v;
    out[3 * p] = r[0];
    out[3 * p + 1] = r[1];
    out[3 * p + 2] = r[2];
  }
  return out;
}

PlanarImage xyz_matrix_transform(const PlanarImage& img, XyzDirection direction) {
  require_finite(img, "xyz_matrix_transform");
  return apply_matrix(direction == XyzDirection::kSrgbToXyz ? kSrgbToXyz : kXyzToSrgb, img);
}

Mat3 adaptation_matrix(const WhitePoint& src, const WhitePoint& dst, CatKind cat) {
  const Mat3& cone = cat_matrix(cat);
  const Vec3 src_lms = cone * src.xyz;
  const Vec3 dst_lms = cone * dst.xyz;
  // Relative threshold: a response that is zero up to rounding is still singular.
  const double tiny = 1e-12 * src_lms.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(src_lms[i]) <= tiny || !std::isfinite(src_lms[i])) {
      throw SingularAdaptationError("source white has zero cone response in channel " +
                                    std::to_string(i));
    }
  }
  const Vec3 ratio = dst_lms.cwiseQuotient(src_lms);
  return cone.inverse() * ratio.asDiagonal() * cone;
}

PlanarImage chromatic_adapt(const PlanarImage& img, const WhitePoint& src, const WhitePoint& dst,
                            CatKind cat) {
  require_finite(img, "chromatic_adapt");
  return apply_matrix(adaptation_matrix(src, dst, cat), img);
}

PlanarImage standard_baseline(const PlanarImage& img, BaselineDirection direction) {
  require_finite(img, "standard_baseline");
  if (direction == BaselineDirection::kUnprocess) {
    return apply_matrix(kSrgbToXyz, gamma_transfer(img, kStandardGamma, TransferDirection::kDecode));
  }
  PlanarImage linear = clamp(apply_matrix(kXyzToSrgb, img), 0.0, 1.0);
  return gamma_transfer(linear, kStandardGamma, TransferDirection::kEncode);
}

}  // namespace xyzcycle::color
