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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/cyclenet.hpp"
#include "xyzcycle/data.hpp"
#include "xyzcycle/image_io.hpp"
#include "xyzcycle/metrics.hpp"
#include "xyzcycle/nn/gradcheck.hpp"
#include "xyzcycle/nn/layers.hpp"
#include "xyzcycle/polymap.hpp"
#include "xyzcycle/random.hpp"
#include "xyzcycle/tasks.hpp"

namespace fs = std::filesystem;
using namespace xyzcycle;

namespace {

// Synthetic training run for criteria 4 and 8.
constexpr int kPairs = 200;
constexpr int kHeldOut = 20;
constexpr int kImageSize = 64;
constexpr int kEpochs = 30;
constexpr double kLearningRate = 1e-3;
constexpr int kLrDropEvery = 7;
constexpr bool kAugment = false;
constexpr double kHeadGain = 0.01;
constexpr double kLowLightExposure = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0, double e = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

PlanarImage random_image(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  PlanarImage img(h, w);
  for (double& v : img.samples()) v = rng.uniform();
  return img;
}

// Samples on the 2^-32 grid, where the sRGB split is exact by construction.
PlanarImage grid_image(int h, int w, std::uint64_t seed) {
  Rng rng(seed);
  PlanarImage img(h, w);
  for (double& v : img.samples()) v = std::ldexp(static_cast<double>(rng.next() >> 32), -32);
  return img;
}

double max_abs_diff(const PlanarImage& a, const PlanarImage& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

nn::Tensor<double> random_tensor(std::vector<int> dims, std::uint64_t seed) {
  nn::Tensor<double> t(std::move(dims));
  Rng rng(seed);
  for (auto& v : t.values()) v = rng.uniform(-1.0, 1.0);
  return t;
}

// ---- 1 ----------------------------------------------------------------------

Outcome architecture() {
  cycle::Model net;
  net.initialize(0);
  const std::size_t n = net.parameter_count();
  return {n == 2697578, "parameters=" + std::to_string(n)};
}

// ---- 2 ----------------------------------------------------------------------

Outcome gradients() {
  struct Case {
    std::string name;
    std::function<nn::Sequential<double>()> make;
    std::vector<int> input;
    nn::GradCheckOptions options;
  };
  auto single = [](auto make_layer) {
    return [make_layer] {
      nn::Sequential<double> net;
      make_layer(net);
      net.initialize(7);
      net.set_training(false);
      return net;
    };
  };
  nn::GradCheckOptions full;
  nn::GradCheckOptions sampled;
  sampled.max_samples_per_parameter = 48;
  sampled.max_input_samples = 64;
  std::vector<Case> cases = {
      {"conv3x3", single([](auto& n) { n.template emplace<nn::Conv3x3<double>>(3, 4); }), {3, 8, 8}, full},
      {"conv3x3_stride2", single([](auto& n) { n.template emplace<nn::Conv3x3<double>>(3, 4, 2, 1); }),
       {3, 8, 8}, full},
      {"leaky_relu", single([](auto& n) { n.template emplace<nn::LeakyRelu<double>>(); }), {3, 8, 8}, full},
      {"tanh", single([](auto& n) { n.template emplace<nn::Tanh<double>>(); }), {3, 8, 8}, full},
      {"maxpool2", single([](auto& n) { n.template emplace<nn::MaxPool2<double>>(); }), {3, 8, 8}, full},
      {"subsample", single([](auto& n) { n.template emplace<nn::UniformSubsample<double>>(5, 5); }), {3, 8, 8},
       full},
      {"fully_connected", single([](auto& n) { n.template emplace<nn::FullyConnected<double>>(192, 18); }),
       {192}, full},
      {"dropout_inference", single([](auto& n) { n.template emplace<nn::Dropout<double>>(0.5, 3); }), {192},
       full},
      {"local_subnet",
       [] {
         auto net = cycle::make_local_subnet<double>();
         net.initialize(11);
         return net;
       },
       {3, 8, 8}, sampled},
      {"global_subnet",
       [] {
         auto net = cycle::make_global_subnet<double>(5);
         net.initialize(12);
         net.set_training(false);
         return net;
       },
       {3, 8, 8}, sampled},
  };
  double worst = 0.0;
  std::string worst_name;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    auto net = cases[i].make();
    const auto r = nn::grad_check(net, random_tensor(cases[i].input, 100 + i), cases[i].options);
    checked += r.checked;
    if (r.max_relative_error >= worst) {
      worst = r.max_relative_error;
      worst_name = cases[i].name + ":" + r.worst;
    }
  }
  return {worst < 1e-4, fmt("max_rel_err=%.3g", worst) + " at " + worst_name +
                            " cases=" + std::to_string(cases.size()) + " coords=" + std::to_string(checked)};
}

// ---- 3 ----------------------------------------------------------------------

Outcome polynomial() {
  Rng rng(21);
  poly::PolyMatrix::Storage s;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < poly::kTerms; ++c) s(r, c) = rng.uniform(-1.0, 1.0);
  const poly::PolyMatrix truth(s);
  std::vector<PlanarImage> src = {random_image(32, 32, 22), random_image(17, 23, 23)};
  std::vector<PlanarImage> dst;
  for (const auto& img : src) dst.push_back(poly::apply_poly(truth, img));
  poly::FitOptions o;
  o.ridge = 0.0;
  o.max_grid = 0;
  const auto fit = poly::fit_poly(src, dst, o);
  const double fit_err = (fit.entries() - truth.entries()).cwiseAbs().maxCoeff();

  double apply_err = 0.0;
  const PlanarImage& img = src[1];
  const PlanarImage out = poly::apply_poly(truth, img);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
      const double phi[6] = {r, g, b, r * r, g * g, b * b};
      for (int c = 0; c < 3; ++c) {
        long double acc = 0;
        for (int k = 0; k < 6; ++k) acc += static_cast<long double>(truth(c, k)) * phi[k];
        apply_err = std::max(apply_err, std::abs(static_cast<double>(acc) - out.at(y, x, c)));
      }
    }
  return {fit_err < 1e-8 && apply_err < 1e-12, fmt("fit_err=%.3g apply_err=%.3g", fit_err, apply_err)};
}

// ---- 4 and 8 ----------------------------------------------------------------

struct Trained {
  std::unique_ptr<cycle::Model> net;
  bool loaded = false;
  double seconds = 0.0;
};

data::SimulateOptions training_options() {
  data::SimulateOptions o;
  o.count = kPairs;
  o.height = kImageSize;
  o.width = kImageSize;
  o.seed = 0;
  o.gamma = 2.2;
  o.quad_coeff = 0.05;
  o.vignette_strength = 0.15;
  o.local_contrast = 0.1;
  return o;
}

Trained train_model(const std::vector<data::ImagePair>& train, const std::string& load_path,
                    const std::string& save_path) {
  Trained t;
  t.net = std::make_unique<cycle::Model>();
  const auto start = std::chrono::steady_clock::now();
  if (!load_path.empty()) {
    t.net->load(load_path);
    t.loaded = true;
  } else {
    t.net->initialize(0, kHeadGain);
    cycle::TrainSchedule s;
    s.epochs = kEpochs;
    s.patch = kImageSize;
    s.lr = kLearningRate;
    s.lr_drop_every = kLrDropEvery;
    s.augment = kAugment;
    s.seed = 0;
    cycle::train(*t.net, train, s, [](const cycle::EpochRecord& r) {
      std::printf("  epoch=%d lr=%g loss=%.5f loss_xyz=%.5f loss_srgb=%.5f\n", r.epoch, r.lr, r.loss_total,
                  r.loss_xyz, r.loss_srgb);
      std::fflush(stdout);
    });
    if (!save_path.empty()) t.net->save(save_path);
  }
  t.net->set_training(false);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

Outcome end_to_end(const Trained& t, const std::vector<data::ImagePair>& held_out) {
  double model = 0.0, baseline = 0.0, cycle_psnr = 0.0;
  for (const auto& p : held_out) {
    const auto d = cycle::unprocess(*t.net, p.srgb);
    model += metrics::psnr(d.xyz, p.xyz);
    baseline += metrics::psnr(color::standard_baseline(p.srgb, color::BaselineDirection::kUnprocess), p.xyz);
    cycle_psnr += metrics::psnr(cycle::render(*t.net, d.xyz).srgb, p.srgb);
  }
  const double n = static_cast<double>(held_out.size());
  model /= n;
  baseline /= n;
  cycle_psnr /= n;
  std::string detail = fmt("xyz_psnr=%.2f baseline=%.2f gain=%.2f cycle_psnr=%.2f", model, baseline,
                           model - baseline, cycle_psnr);
  detail += t.loaded ? " (loaded weights)" : fmt(" train_s=%.0f", t.seconds);
  return {model - baseline >= 3.0 && cycle_psnr >= 35.0, detail};
}

Outcome enhancement(const cycle::Model& net) {
  tasks::SceneSetup dark;
  dark.size = kImageSize;
  dark.exposure = kLowLightExposure;
  tasks::SceneSetup bright = dark;
  bright.exposure = 1.0;
  const auto camera = tasks::scene_camera(dark);
  const auto dark_scenes = tasks::make_scenes(dark);
  const auto bright_scenes = tasks::make_scenes(bright);
  const tasks::Linearizer learned = tasks::learned_linearizer(net);
  const tasks::Linearizer standard = tasks::standard_linearizer();
  double l = 0.0, s = 0.0, o = 0.0, luma = 0.0;
  for (std::size_t i = 0; i < dark_scenes.size(); ++i) {
    const PlanarImage input = data::simulate_isp(dark_scenes[i].xyz, camera);
    const PlanarImage reference = data::simulate_isp(bright_scenes[i].xyz, camera);
    // true scene and true camera; reported for scale, not part of the check
    const tasks::Linearizer oracle{[&](const PlanarImage&) { return dark_scenes[i].xyz; },
                                   [&](const PlanarImage& x) { return data::simulate_isp(x, camera); }};
    luma += mean_luma(input);
    l += metrics::psnr(tasks::enhance_lowlight(learned, input), reference);
    s += metrics::psnr(tasks::enhance_lowlight(standard, input), reference);
    o += metrics::psnr(tasks::enhance_lowlight(oracle, input), reference);
  }
  const double n = static_cast<double>(dark_scenes.size());
  return {l / n > s / n, fmt("learned=%.2f standard=%.2f oracle=%.2f input_luma=%.3f scenes=%.0f", l / n, s / n,
                             o / n, luma / n, n)};
}

// ---- 5 ----------------------------------------------------------------------

Outcome cycle_identities() {
  int failures = 0;
  double max_res = 0.0;
  for (int k = 0; k < 100; ++k) {
    cycle::Model net;
    // Alternate near-identity and full-gain heads so the bound is exercised.
    net.initialize(static_cast<std::uint64_t>(k), k % 2 == 0 ? 0.01 : 1.0);
    net.set_training(false);
    const PlanarImage srgb = grid_image(12, 12, 1000 + k);
    const auto inv = cycle::unprocess(net, srgb);
    bool ok = inv.srgb == srgb && add(inv.glob, inv.res) == srgb;
    const auto fwd = cycle::render(net, inv.xyz);
    ok = ok && add(fwd.glob, fwd.res) == fwd.srgb_unclamped;
    for (const auto* res : {&inv.res, &fwd.res})
      for (double v : res->samples()) {
        max_res = std::max(max_res, std::abs(v));
        ok = ok && std::abs(v) <= 0.25;
      }
    failures += ok ? 0 : 1;
  }
  return {failures == 0, "inits=100 failures=" + std::to_string(failures) + fmt(" max_abs_res=%.4f", max_res)};
}

// ---- 6 ----------------------------------------------------------------------

Outcome restoration() {
  const tasks::SceneSetup setup;
  const auto camera = tasks::scene_camera(setup);
  const auto lin = tasks::standard_linearizer();
  const auto kernel = tasks::motion_kernel(9, 30.0);
  double bs = 0, bl = 0, ds = 0, dl = 0;
  const auto scenes = tasks::make_scenes(setup);
  for (const auto& scene : scenes) {
    const auto b = tasks::blur_harness(scene.xyz, kernel, camera, lin);
    bs += b.psnr_srgb_path;
    bl += b.psnr_linear_path;
    const auto d = tasks::denoise_harness(scene.xyz, camera, tasks::kDefaultNoiseSigma,
                                          tasks::kDefaultDenoiseStrength, lin, scene.seed);
    ds += d.psnr_srgb_path;
    dl += d.psnr_linear_path;
  }
  const double n = static_cast<double>(scenes.size());
  return {bl > bs && dl > ds,
          fmt("blur srgb=%.2f linear=%.2f; denoise srgb=%.2f linear=%.2f", bs / n, bl / n, ds / n, dl / n)};
}

// ---- 7 ----------------------------------------------------------------------

double ssim_oracle(const PlanarImage& a, const PlanarImage& b) {
  long double g[11][11], gsum = 0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0L * 2.25L));
      gsum += g[i][j];
    }
  const long double c1 = 1e-4L, c2 = 9e-4L;
  long double total = 0;
  for (int c = 0; c < 3; ++c) {
    long double sum = 0;
    int count = 0;
    for (int y0 = 0; y0 + 11 <= a.height(); ++y0)
      for (int x0 = 0; x0 + 11 <= a.width(); ++x0) {
        long double mx = 0, my = 0, vx = 0, vy = 0, cov = 0;
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            mx += g[i][j] / gsum * a.at(y0 + i, x0 + j, c);
            my += g[i][j] / gsum * b.at(y0 + i, x0 + j, c);
          }
        for (int i = 0; i < 11; ++i)
          for (int j = 0; j < 11; ++j) {
            const long double dx = a.at(y0 + i, x0 + j, c) - mx, dy = b.at(y0 + i, x0 + j, c) - my;
            vx += g[i][j] / gsum * dx * dx;
            vy += g[i][j] / gsum * dy * dy;
            cov += g[i][j] / gsum * dx * dy;
          }
        sum += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
    total += sum / count;
  }
  return static_cast<double>(total / 3);
}

Outcome metric_conformance() {
  const double p = metrics::psnr(PlanarImage(16, 16, 0.5), PlanarImage(16, 16, 0.6));
  const PlanarImage a = random_image(24, 21, 31), b = random_image(24, 21, 32);
  const double same = metrics::ssim(a, a);
  const double ssim_err = std::abs(metrics::ssim(a, b) - ssim_oracle(a, b));
  const std::vector<double> v = {1, 2, 3, 4, 5};
  const auto s = metrics::summarize(v);
  const bool ok = std::abs(p - 20.0) < 1e-9 && same == 1.0 && ssim_err < 1e-6 && s.avg == 3 && s.q1 == 2 &&
                  s.q2 == 3 && s.q3 == 4;
  return {ok, fmt("psnr=%.6f ssim_same=%.6f ssim_err=%.2g", p, same, ssim_err) +
                  fmt(" summary=(%g,%g,%g,%g)", s.avg, s.q1, s.q2, s.q3)};
}

// ---- 9 ----------------------------------------------------------------------

Outcome round_trips() {
  PlanarImage interior = random_image(32, 32, 41);
  for (double& v : interior.samples()) v = 0.02 + 0.96 * v;
  const double baseline_err = max_abs_diff(
      color::standard_baseline(color::standard_baseline(interior, color::BaselineDirection::kUnprocess),
                               color::BaselineDirection::kRender),
      interior);

  const color::Vec3 airlight(0.9, 0.8, 0.85);
  double haze_err = 0.0;
  for (double t : {0.05, 0.3, 0.7, 1.0}) {
    const auto hazy = tasks::haze_model(interior, t, airlight, tasks::HazeDirection::kSynthesize);
    haze_err = std::max(haze_err,
                        max_abs_diff(tasks::haze_model(hazy, t, airlight, tasks::HazeDirection::kInvert), interior));
  }

  const tasks::Illuminant cast{{0.55, 1.0, 1.45}};
  const PlanarImage back = tasks::remove_illuminant(tasks::apply_illuminant(interior, cast), cast);
  bool illuminant_ok = tasks::apply_illuminant(interior, tasks::Illuminant{}) == interior;
  for (std::size_t i = 0; i < back.size(); ++i) {
    illuminant_ok = illuminant_ok && std::abs(back[i] - interior[i]) <=
                                         std::nextafter(interior[i], 2.0) - interior[i];
  }

  PlanarImage floats = random_image(7, 9, 42);
  for (double& v : floats.samples()) v = static_cast<float>(v * 3.0 - 1.0);
  const fs::path pfm = fs::temp_directory_path() / "xyzcycle_acceptance.pfm";
  data::save_pfm(floats, pfm);
  const bool pfm_ok = data::load_pfm(pfm) == floats;
  fs::remove(pfm);

  const bool ok = baseline_err < 1e-5 && haze_err < 1e-9 && illuminant_ok && pfm_ok;
  return {ok, fmt("baseline_err=%.2g haze_err=%.2g", baseline_err, haze_err) +
                  " illuminant=" + (illuminant_ok ? "ok" : "bad") + " pfm=" + (pfm_ok ? "bitwise" : "bad")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  std::string load_path, save_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--weights") && i + 1 < argc) {
      load_path = argv[++i];
    } else if (!std::strcmp(argv[i], "--save-weights") && i + 1 < argc) {
      save_path = argv[++i];
    } else if (std::atoi(argv[i]) >= 1 && std::atoi(argv[i]) <= 9) {
      selected.insert(std::atoi(argv[i]));
    } else {
      std::fprintf(stderr, "usage: %s [--weights FILE] [--save-weights FILE] [criterion...]\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  std::vector<data::ImagePair> train, held_out;
  std::optional<Trained> trained;
  auto model = [&]() -> const Trained& {
    if (!trained) {
      auto pairs = data::simulate_pairs(training_options());
      train.assign(pairs.begin(), pairs.end() - kHeldOut);
      held_out.assign(pairs.end() - kHeldOut, pairs.end());
      trained = train_model(train, load_path, save_path);
    }
    return *trained;
  };

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"architecture", architecture},
      {"gradients", gradients},
      {"polynomial", polynomial},
      {"end_to_end", [&] {
         const Trained& t = model();
         return end_to_end(t, held_out);
       }},
      {"cycle_identities", cycle_identities},
      {"restoration", restoration},
      {"metrics", metric_conformance},
      {"enhancement", [&] { return enhancement(*model().net); }},
      {"round_trips", round_trips},
  };

  int failed = 0;
  for (int id : selected) {
    const auto& [name, run] = criteria[static_cast<std::size_t>(id - 1)];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s %s (%.1f s)\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(selected.size()) - failed, selected.size());
  return failed == 0 ? 0 : 1;
}
