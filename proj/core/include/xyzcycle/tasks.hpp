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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/cyclenet.hpp"
#include "xyzcycle/data.hpp"
#include "xyzcycle/image.hpp"

namespace xyzcycle::tasks {

inline const std::vector<double> kDefaultGains = {0.1, 1.4, 2.7, 4.0};

// Scalar gain per output, no clamping.
std::vector<PlanarImage> multi_gain(const PlanarImage& xyz, std::span<const double> gains);

// Mertens-style exposure fusion. Per-pixel weight = contrast (|Laplacian| of
// the channel mean) x saturation (channel standard deviation) x
// well-exposedness (prod over channels of exp(-(v - 0.5)^2 / (2 * 0.2^2))),
// plus 1e-12, normalized across inputs, then blended with Laplacian /
// Gaussian pyramids of depth floor(log2(min dim)) - 1.
PlanarImage exposure_fusion(std::span<const PlanarImage> images);

double well_exposedness(double v);

// A pair of maps between display-referred sRGB and a linear state.
struct Linearizer {
  std::function<PlanarImage(const PlanarImage&)> to_linear;
  std::function<PlanarImage(const PlanarImage&)> to_srgb;
};

// 2.2 gamma plus the sRGB/XYZ matrix (color::standard_baseline).
Linearizer standard_linearizer();
// unprocess / render through a trained model; the model must outlive the result.
Linearizer learned_linearizer(const cycle::Model& net);

// linearize -> multi_gain -> clamp to [0, 1] -> exposure_fusion -> re-render.
PlanarImage enhance_lowlight(const Linearizer& lin, const PlanarImage& srgb,
                             std::span<const double> gains = kDefaultGains);
PlanarImage enhance_lowlight(const cycle::Model& net, const PlanarImage& srgb,
                             std::span<const double> gains = kDefaultGains);

struct RawCalibration {
  color::Mat3 xyz_to_raw = color::Mat3::Identity();
  double residual = 0.0;  // RMS of M * xyz - raw over the chart
  std::size_t samples = 0;
};

// Least-squares 3x3 fit of raw = M * xyz; fewer than three linearly
// independent chart colors raise RankError.
RawCalibration calibrate_xyz_to_raw(std::span<const color::Vec3> xyz,
                                    std::span<const color::Vec3> raw);

PlanarImage apply_calibration(const RawCalibration& cal, const PlanarImage& xyz);

struct Illuminant {
  color::Vec3 rgb = color::Vec3::Ones();
};

// Per-channel multiplication by the illuminant (diagonal cast in sensor space).
PlanarImage apply_illuminant(const PlanarImage& raw_wb, const Illuminant& l);
PlanarImage remove_illuminant(const PlanarImage& raw, const Illuminant& l);

struct CastSample {
  PlanarImage raw;
  Illuminant illuminant;
};

// Illuminant-estimation training sample: XYZ -> white-balanced raw through
// the calibration, then a cast drawn uniformly from `illuminants`.
CastSample illuminant_augment(const PlanarImage& xyz, const RawCalibration& cal,
                              std::span<const Illuminant> illuminants, std::uint64_t seed);

enum class HazeDirection { kSynthesize, kInvert };

// I = J t + A (1 - t) and its inverse J = (I - A (1 - t)) / t.
PlanarImage haze_model(const PlanarImage& img, double t, const color::Vec3& a,
                       HazeDirection direction);
PlanarImage haze_model(const PlanarImage& img, const PlanarImage& t, const color::Vec3& a,
                       HazeDirection direction);

// Nonnegative 2-D filter; taps are row-major, the center tap sits at
// (height / 2, width / 2).
struct Kernel {
  int height = 1;
  int width = 1;
  std::vector<double> taps{1.0};

  double sum() const;
};

Kernel delta_kernel();
// Line of `length` taps through the center at `angle_degrees`, normalized.
Kernel motion_kernel(int length, double angle_degrees = 0.0);

// Circular convolution with the kernel (periodic boundary).
PlanarImage convolve(const PlanarImage& img, const Kernel& k);
// Wiener deconvolution of a circular blur: F = conj(H) G / (|H|^2 + 1 / snr).
PlanarImage wiener_deconvolve(const PlanarImage& img, const Kernel& k, double snr);

struct HarnessResult {
  double psnr_srgb_path = 0.0;
  double psnr_linear_path = 0.0;
};

struct BlurOptions {
  double snr = 1e3;
  // Quantize the rendered observation to 8 bits, as a camera would store it.
  bool quantize = true;
};

HarnessResult blur_harness(const PlanarImage& scene_xyz, const Kernel& kernel,
                           const data::IspParams& isp, const Linearizer& lin,
                           const BlurOptions& options = {});

inline constexpr double kDefaultNoiseSigma = 0.05;
inline constexpr double kDefaultDenoiseStrength = 0.5;

// Gaussian noise of standard deviation sigma in the linear state; the
// stand-in denoiser is a Gaussian filter of width `strength` (0 = none).
HarnessResult denoise_harness(const PlanarImage& scene_xyz, const data::IspParams& isp,
                              double sigma, double strength, const Linearizer& lin,
                              std::uint64_t seed);

// Haze of transmission t and airlight a added in the linear state, removed
// with the known t and a either directly on the rendered sRGB (airlight
// rendered through the same camera) or on the linearized image.
HarnessResult haze_harness(const PlanarImage& scene_xyz, const data::IspParams& isp, double t,
                           const color::Vec3& a, const Linearizer& lin);

PlanarImage quantize8(const PlanarImage& img);

// A seeded set of procedural scenes photographed by one synthetic camera.
// Scene i is generated from derive_seed(seed, first_stream + i); the camera
// is random_isp_params(seed, ...), i.e. the same one simulate_pairs uses for
// that seed. Choose first_stream >= the training count to get unseen scenes.
struct SceneSetup {
  int count = 10;
  int size = 128;
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 1u << 20;
  double exposure = 1.0;
  double gamma = color::kStandardGamma;
  double quad_coeff = 0.05;
  double vignette_strength = 0.15;
  double local_contrast = 0.1;
};

struct Scene {
  std::uint64_t seed = 0;
  PlanarImage xyz;
};

data::IspParams scene_camera(const SceneSetup& setup);
std::vector<Scene> make_scenes(const SceneSetup& setup);

// One line of a harness report.
struct HarnessRow {
  std::uint64_t seed = 0;
  std::string path;
  double psnr = 0.0;
};

// CSV "seed,path,psnr" followed by one "mean,<path>,<value>" row per path.
void write_harness_csv(const std::vector<HarnessRow>& rows, const std::filesystem::path& path);

}  // namespace xyzcycle::tasks
