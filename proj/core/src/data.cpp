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

#include "xyzcycle/data.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "xyzcycle/error.hpp"
#include "xyzcycle/filter.hpp"
#include "xyzcycle/image_io.hpp"
#include "xyzcycle/random.hpp"

namespace xyzcycle::data {

void IspParams::validate() const {
  if (!color_matrix.allFinite() || std::abs(color_matrix.determinant()) < 1e-12) {
    throw ConfigError("isp: color matrix must be finite and nonsingular");
  }
  if (!(gamma > 0.0)) throw ConfigError("isp: gamma must be positive");
  if (!(quad_coeff >= 0.0) || !(vignette_strength >= 0.0) || !(local_contrast >= 0.0) ||
      !(unsharp_sigma >= 0.0)) {
    throw ConfigError("isp: strengths must be nonnegative");
  }
}

IspParams random_isp_params(std::uint64_t seed, double gamma, double quad_coeff,
                            double vignette_strength, double local_contrast,
                            double perturbation) {
  Rng rng(derive_seed(seed, 0x15B));
  IspParams p;
  for (;;) {
    color::Mat3 d;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) d(r, c) = rng.uniform(-perturbation, perturbation);
    p.color_matrix = color::xyz_to_srgb_matrix() * (color::Mat3::Identity() + d);
    if (std::abs(p.color_matrix.determinant()) > 1e-6) break;
  }
  p.gamma = gamma;
  p.quad_coeff = quad_coeff;
  p.vignette_strength = vignette_strength;
  p.local_contrast = local_contrast;
  p.seed = seed;
  p.validate();
  return p;
}

PlanarImage simulate_isp(const PlanarImage& xyz, const IspParams& p) {
  require_finite(xyz, "simulate_isp");
  p.validate();
  const int h = xyz.height(), w = xyz.width();
  PlanarImage out(h, w);
  for (std::size_t i = 0; i < xyz.pixel_count(); ++i) {
    const color::Vec3 v(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
    const color::Vec3 lin = p.color_matrix * v;
    for (int c = 0; c < 3; ++c) {
      const double t = std::clamp(lin[c] + p.quad_coeff * lin[c] * lin[c], 0.0, 1.0);
      out[3 * i + c] = p.srgb_curve ? color::srgb_encode(t) : std::pow(t, 1.0 / p.gamma);
    }
  }
  if (p.vignette_strength > 0.0) {
    const double cy = 0.5 * (h - 1), cx = 0.5 * (w - 1);
    const double r2max = std::max(cy * cy + cx * cx, 1e-12);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double r2 = ((y - cy) * (y - cy) + (x - cx) * (x - cx)) / r2max;
        const double gain = 1.0 - p.vignette_strength * r2;
        for (int c = 0; c < 3; ++c) out.at(y, x, c) *= gain;
      }
  }
  if (p.local_contrast > 0.0) {
    const PlanarImage blurred = gaussian_blur(out, p.unsharp_sigma);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] += p.local_contrast * (out[i] - blurred[i]);
    }
  }
  return clamp(out, 0.0, 1.0);
}

PlanarImage generate_scene(int height, int width, std::uint64_t seed, double exposure) {
  if (!(exposure > 0.0)) throw InvalidInputError("generate_scene: exposure must be positive");
  Rng rng(derive_seed(seed, 0x5CE));
  PlanarImage lin(height, width);
  const double inv_h = 1.0 / std::max(height - 1, 1), inv_w = 1.0 / std::max(width - 1, 1);

  // Backdrop: per-channel bilinear gradient.
  double corner[4][3];
  for (auto& k : corner)
    for (double& v : k) v = rng.uniform(0.05, 0.8);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double ty = y * inv_h, tx = x * inv_w;
      for (int c = 0; c < 3; ++c) {
        lin.at(y, x, c) = (1 - ty) * ((1 - tx) * corner[0][c] + tx * corner[1][c]) +
                          ty * ((1 - tx) * corner[2][c] + tx * corner[3][c]);
      }
    }

  // Shapes: discs and axis-aligned boxes with soft edges.
  const int shapes = 6 + rng.uniform_int(7);
  for (int s = 0; s < shapes; ++s) {
    double color[3];
    for (double& v : color) v = std::pow(rng.uniform(), 1.5);
    const double cy = rng.uniform(0.0, height), cx = rng.uniform(0.0, width);
    const double size = rng.uniform(0.06, 0.3) * std::min(height, width);
    const bool disc = rng.bernoulli(0.5);
    const double aspect = rng.uniform(0.5, 2.0);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        double d;
        if (disc) {
          d = std::hypot(y - cy, x - cx) - size;
        } else {
          d = std::max(std::abs(y - cy) - size * aspect, std::abs(x - cx) - size / aspect);
        }
        const double alpha = std::clamp(0.5 - d, 0.0, 1.0);  // ~1 px antialiased edge
        if (alpha <= 0.0) continue;
        for (int c = 0; c < 3; ++c) {
          lin.at(y, x, c) = (1 - alpha) * lin.at(y, x, c) + alpha * color[c];
        }
      }
  }

  // Low-frequency shading.
  const double fy = rng.uniform(0.5, 2.0), fx = rng.uniform(0.5, 2.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double g = 1.0 + 0.15 * std::sin(2 * std::numbers::pi * (fy * y * inv_h + fx * x * inv_w) + phase);
      for (int c = 0; c < 3; ++c) lin.at(y, x, c) *= g;
    }

  // Fine texture.
  PlanarImage noise(height, width);
  for (double& v : noise.samples()) v = 0.03 * rng.normal();
  noise = gaussian_blur(noise, 0.7);
  for (std::size_t i = 0; i < lin.size(); ++i) lin[i] += noise[i];

  lin = clamp(lin, 0.0, 1.0);
  return color::xyz_matrix_transform(scale(lin, exposure), color::XyzDirection::kSrgbToXyz);
}

std::vector<ImagePair> extract_patches(const ImagePair& pair, int size, int count,
                                       std::uint64_t seed, bool augment) {
  require_same_shape(pair.srgb, pair.xyz, "extract_patches");
  if (size < 1) throw ConfigError("extract_patches: patch size must be positive");
  if (count < 0) throw ConfigError("extract_patches: negative patch count");
  const int h = pair.srgb.height(), w = pair.srgb.width();
  if (h < size || w < size) {
    throw ConfigError("patch size " + std::to_string(size) + " exceeds image " +
                      std::to_string(h) + "x" + std::to_string(w));
  }
  std::vector<ImagePair> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    ImagePair patch;
    if (!augment) {
      const int y0 = rng.uniform_int(h - size + 1), x0 = rng.uniform_int(w - size + 1);
      patch.srgb = resample_window(pair.srgb, y0, x0, size, size, size, size);
      patch.xyz = resample_window(pair.xyz, y0, x0, size, size, size, size);
    } else {
      // The window is size / factor; the factor is raised if needed so the
      // window fits inside the image.
      double factor = rng.uniform(0.75, 1.25);
      factor = std::max(factor, static_cast<double>(size) / std::min(h, w));
      const double win = size / factor;
      const double y0 = rng.uniform(0.0, h - win), x0 = rng.uniform(0.0, w - win);
      patch.srgb = resample_window(pair.srgb, y0, x0, win, win, size, size);
      patch.xyz = resample_window(pair.xyz, y0, x0, win, win, size, size);
      if (rng.bernoulli(0.5)) {
        patch.srgb = flip_horizontal(patch.srgb);
        patch.xyz = flip_horizontal(patch.xyz);
      }
      if (rng.bernoulli(0.5)) {
        patch.srgb = flip_vertical(patch.srgb);
        patch.xyz = flip_vertical(patch.xyz);
      }
    }
    out.push_back(std::move(patch));
  }
  return out;
}

const char* to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw FormatError("unknown split '" + text + "'");
}

std::vector<PairEntry> split_pairs(std::vector<PairEntry> pairs, const SplitFractions& fractions,
                                   std::uint64_t seed) {
  if (pairs.empty()) throw ConfigError("split_pairs: no pairs");
  const double total = fractions.train + fractions.val + fractions.test;
  if (!(fractions.train >= 0 && fractions.val >= 0 && fractions.test >= 0) || !(total > 0)) {
    throw ConfigError("split_pairs: fractions must be nonnegative with a positive sum");
  }
  Rng rng(derive_seed(seed, 0x5B117));
  for (std::size_t i = pairs.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(pairs[i - 1], pairs[j]);
  }
  const double n = static_cast<double>(pairs.size());
  // The small slack keeps exact products such as 10 * 0.1 from rounding down.
  const auto n_val = static_cast<std::size_t>(std::floor(n * fractions.val / total + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * fractions.test / total + 1e-9));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pairs[i].split = i < n_val ? Split::kVal : i < n_val + n_test ? Split::kTest : Split::kTrain;
  }
  return pairs;
}

std::vector<PairEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open manifest");
  const auto base = path.parent_path();
  std::string line;
  std::vector<PairEntry> out;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "srgb_path,xyz_path,split") {
        throw FormatError(path.string() + ": expected header 'srgb_path,xyz_path,split'");
      }
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    PairEntry e;
    e.srgb_path = std::filesystem::path(fields[0]);
    e.xyz_path = std::filesystem::path(fields[1]);
    if (e.srgb_path.is_relative()) e.srgb_path = base / e.srgb_path;
    if (e.xyz_path.is_relative()) e.xyz_path = base / e.xyz_path;
    try {
      e.split = parse_split(fields[2]);
    } catch (const FormatError& err) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
    out.push_back(std::move(e));
  }
  if (out.empty()) throw FormatError(path.string() + ": manifest lists no pairs");
  return out;
}

void write_manifest(const std::vector<PairEntry>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out << "srgb_path,xyz_path,split\n";
  const auto base = path.parent_path();
  auto rel = [&](const std::filesystem::path& p) {
    const std::string s = (p.is_absolute() || base.empty()) ? p.lexically_proximate(base).string()
                                                            : p.lexically_relative(base).string();
    if (s.find(',') != std::string::npos) {
      throw FormatError("manifest paths may not contain commas: " + s);
    }
    return s.empty() ? p.string() : s;
  };
  for (const auto& e : pairs) {
    out << rel(e.srgb_path) << ',' << rel(e.xyz_path) << ',' << to_string(e.split) << '\n';
  }
}

ImagePair load_pair(const PairEntry& entry) {
  ImagePair p{load_image(entry.srgb_path), load_image(entry.xyz_path)};
  require_same_shape(p.srgb, p.xyz, entry.srgb_path.string());
  return p;
}

std::vector<ImagePair> load_split(const std::vector<PairEntry>& entries, Split split) {
  std::vector<ImagePair> out;
  for (const auto& e : entries)
    if (e.split == split) out.push_back(load_pair(e));
  return out;
}

namespace {

IspParams dataset_isp(const SimulateOptions& o) {
  return random_isp_params(o.seed, o.gamma, o.quad_coeff, o.vignette_strength, o.local_contrast);
}

}  // namespace

std::vector<ImagePair> simulate_pairs(const SimulateOptions& options, IspParams* isp) {
  if (options.count < 0) throw ConfigError("simulate: negative count");
  const IspParams p = dataset_isp(options);
  if (isp) *isp = p;
  std::vector<ImagePair> out;
  out.reserve(static_cast<std::size_t>(options.count));
  for (int i = 0; i < options.count; ++i) {
    PlanarImage xyz = generate_scene(options.height, options.width,
                                     derive_seed(options.seed, static_cast<std::uint64_t>(i)));
    PlanarImage srgb = simulate_isp(xyz, p);
    out.push_back({std::move(srgb), std::move(xyz)});
  }
  return out;
}

std::vector<PairEntry> simulate_dataset(const std::filesystem::path& dir,
                                        const SimulateOptions& options) {
  if (options.count < 1) throw ConfigError("simulate: count must be at least 1");
  std::filesystem::create_directories(dir);
  IspParams p;
  const auto pairs = simulate_pairs(options, &p);
  std::vector<PairEntry> entries;
  for (int i = 0; i < options.count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "%04d", i);
    PairEntry e{dir / ("srgb_" + std::string(stem) + ".png"), dir / ("xyz_" + std::string(stem) + ".pfm"),
                Split::kTrain};
    save_png(pairs[static_cast<std::size_t>(i)].srgb, e.srgb_path, 16);
    save_pfm(pairs[static_cast<std::size_t>(i)].xyz, e.xyz_path);
    entries.push_back(std::move(e));
  }
  entries = split_pairs(std::move(entries), options.fractions, options.seed);
  std::sort(entries.begin(), entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.srgb_path < b.srgb_path; });
  write_manifest(entries, dir / "manifest.csv");

  std::ofstream info(dir / "isp.txt");
  info.precision(17);
  info << "seed=" << p.seed << "\ngamma=" << p.gamma << "\nquad_coeff=" << p.quad_coeff
       << "\nvignette_strength=" << p.vignette_strength << "\nlocal_contrast=" << p.local_contrast
       << "\nunsharp_sigma=" << p.unsharp_sigma << "\ncolor_matrix=";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) info << (r || c ? "," : "") << p.color_matrix(r, c);
  info << '\n';
  return entries;
}

}  // namespace xyzcycle::data
