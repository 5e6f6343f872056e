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
#include <string>
#include <vector>

#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/image.hpp"

namespace xyzcycle::data {

// Synthetic camera pipeline standing in for a real raw-to-sRGB renderer.
struct IspParams {
  color::Mat3 color_matrix = color::xyz_to_srgb_matrix();
  double gamma = color::kStandardGamma;
  double quad_coeff = 0.0;
  double vignette_strength = 0.0;
  double local_contrast = 0.0;
  double unsharp_sigma = 2.0;
  // Use the piecewise sRGB curve instead of the pure power curve.
  bool srgb_curve = false;
  std::uint64_t seed = 0;

  void validate() const;
};

// color_matrix = xyz_to_srgb * (I + D), D uniform in [-perturbation, perturbation].
IspParams random_isp_params(std::uint64_t seed, double gamma, double quad_coeff,
                            double vignette_strength, double local_contrast,
                            double perturbation = 0.1);

// Global stage: clamp(encode(L + q L^2)), L = color_matrix * xyz.
// Local stage: radial vignette gain 1 - v r^2 (r = 1 at the corners), then
// an unsharp term local_contrast * (img - blur(img)); final clamp to [0, 1].
PlanarImage simulate_isp(const PlanarImage& xyz, const IspParams& p);

// Procedural XYZ scene: smooth gradient backdrop, colored discs and boxes,
// low-frequency shading and fine texture, built in linear sRGB and scaled
// by `exposure`. Deterministic in `seed`.
PlanarImage generate_scene(int height, int width, std::uint64_t seed, double exposure = 1.0);

struct ImagePair {
  PlanarImage srgb;
  PlanarImage xyz;
};

// Random size x size crops taken from the same window of both images. With
// `augment`, each patch is reflected horizontally / vertically with
// probability 0.5 and its window is rescaled by a factor in [0.75, 1.25]
// (bilinear). Patch k draws from its own stream derive_seed(seed, k).
std::vector<ImagePair> extract_patches(const ImagePair& pair, int size, int count,
                                       std::uint64_t seed, bool augment);

enum class Split { kTrain, kVal, kTest };
const char* to_string(Split split);
Split parse_split(const std::string& text);

struct PairEntry {
  std::filesystem::path srgb_path;
  std::filesystem::path xyz_path;
  Split split = Split::kTrain;
};

struct SplitFractions {
  double train = 0.768;
  double val = 0.040;
  double test = 0.192;
};

// Shuffles deterministically and tags floor(n * val) pairs val, floor(n * test)
// test, and the remainder train. Fractions are renormalized to sum to 1.
std::vector<PairEntry> split_pairs(std::vector<PairEntry> pairs, const SplitFractions& fractions,
                                   std::uint64_t seed);

// CSV with header "srgb_path,xyz_path,split". Relative paths are resolved
// against the manifest's directory on read.
std::vector<PairEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<PairEntry>& pairs, const std::filesystem::path& path);

ImagePair load_pair(const PairEntry& entry);
std::vector<ImagePair> load_split(const std::vector<PairEntry>& entries, Split split);

struct SimulateOptions {
  int count = 8;
  int height = 128;
  int width = 128;
  std::uint64_t seed = 0;
  double quad_coeff = 0.05;
  double vignette_strength = 0.15;
  double local_contrast = 0.1;
  double gamma = color::kStandardGamma;
  SplitFractions fractions;
};

// Renders `count` scenes, writes srgb_NNNN.png (16-bit), xyz_NNNN.pfm,
// isp.txt and manifest.csv under `dir`, and returns the manifest entries.
std::vector<PairEntry> simulate_dataset(const std::filesystem::path& dir,
                                        const SimulateOptions& options);

// In-memory variant of simulate_dataset: same scenes, no files.
std::vector<ImagePair> simulate_pairs(const SimulateOptions& options, IspParams* isp = nullptr);

}  // namespace xyzcycle::data
