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

#include "xyzcycle/image.hpp"

// Deterministic colorimetry: transfer curves, linear-sRGB <-> CIE XYZ (D65,
// CIE 1931 2 degree observer), chromatic adaptation, and the plain "2.2 gamma
// plus matrix" linearization used as the reference baseline everywhere else.
namespace xyzcycle::color {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

enum class TransferDirection { kEncode, kDecode };
enum class XyzDirection { kSrgbToXyz, kXyzToSrgb };
enum class BaselineDirection { kUnprocess, kRender };

inline constexpr double kStandardGamma = 2.2;

// Tristimulus white, Y normalized to 1.
struct WhitePoint {
  Vec3 xyz;

  static WhitePoint d65();
  static WhitePoint d50();
  static WhitePoint a();
  static WhitePoint e();
};

enum class CatKind { kBradford, kSharp, kVonKries };

// Linear-sRGB (D65) to XYZ and its inverse, at double precision.
const Mat3& srgb_to_xyz_matrix();
const Mat3& xyz_to_srgb_matrix();

// Cone-response matrix of a chromatic adaptation transform.
const Mat3& cat_matrix(CatKind cat);

// Pure power curve: decode v -> v^gamma, encode v -> v^(1/gamma). Inputs are
// clamped to [0, 1] before the power so slightly out-of-range values stay
// finite; the output is in [0, 1].
PlanarImage gamma_transfer(const PlanarImage& img, double gamma, TransferDirection direction);

// Piecewise IEC 61966-2-1 curve, offered to the ISP simulator as an
// alternative to the pure power law.
double srgb_encode(double linear);
double srgb_decode(double encoded);

// Per-pixel 3x3 multiply with the D65 sRGB matrices. No clamping.
PlanarImage xyz_matrix_transform(const PlanarImage& img, XyzDirection direction);

// Applies any 3x3 matrix per pixel.
PlanarImage apply_matrix(const Mat3& m, const PlanarImage& img);

// 3x3 adaptation matrix CAT^-1 * diag(dst_lms / src_lms) * CAT.
Mat3 adaptation_matrix(const WhitePoint& src, const WhitePoint& dst, CatKind cat);

PlanarImage chromatic_adapt(const PlanarImage& img, const WhitePoint& src, const WhitePoint& dst,
                            CatKind cat);

// Unprocess: decode with 2.2 gamma, then linear sRGB -> XYZ.
// Render: XYZ -> linear sRGB, clamp to [0, 1], encode with 2.2 gamma.
PlanarImage standard_baseline(const PlanarImage& img, BaselineDirection direction);

}  // namespace xyzcycle::color
