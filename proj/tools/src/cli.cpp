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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kv_config.hpp"
#include "xyzcycle/colorspace.hpp"
#include "xyzcycle/cyclenet.hpp"
#include "xyzcycle/data.hpp"
#include "xyzcycle/error.hpp"
#include "xyzcycle/image_io.hpp"
#include "xyzcycle/metrics.hpp"
#include "xyzcycle/polymap.hpp"
#include "xyzcycle/tasks.hpp"

namespace xyzcycle::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::uint64_t seed = 0;
  std::string out;
  std::string weights;
  std::string manifest;
  std::string config;
  std::string gains;
  std::string in;
  std::string ref;
  std::string split = "test";
  double gamma = color::kStandardGamma;
  int count = 0;
};

// Usage problems discovered after parsing (missing required flag combos).
class UsageError : public Error {
 public:
  using Error::Error;
};

KvConfig load_config(const Flags& f) { return f.config.empty() ? KvConfig{} : KvConfig::load(f.config); }

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

cycle::Model load_model(const std::string& path) {
  cycle::Model net;
  net.load(path);
  net.set_training(false);
  return net;
}

tasks::Linearizer pick_linearizer(const Flags& f, cycle::Model& net, std::ostream& out) {
  if (f.weights.empty()) {
    out << "linearizer=standard\n";
    return tasks::standard_linearizer();
  }
  net = load_model(f.weights);
  out << "linearizer=learned\n";
  return tasks::learned_linearizer(net);
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

// ---- subcommands --------------------------------------------------------------

int cmd_simulate(const Flags& f, std::ostream& out) {
  require(f.out, "--out");
  const KvConfig cfg = load_config(f);
  data::SimulateOptions o;
  o.count = f.count > 0 ? f.count : cfg.get_int("count", o.count);
  o.seed = f.seed;
  o.gamma = f.gamma;
  o.height = cfg.get_int("height", o.height);
  o.width = cfg.get_int("width", o.width);
  o.quad_coeff = cfg.get_double("quad_coeff", o.quad_coeff);
  o.vignette_strength = cfg.get_double("vignette_strength", o.vignette_strength);
  o.local_contrast = cfg.get_double("local_contrast", o.local_contrast);
  o.fractions.train = cfg.get_double("train_fraction", o.fractions.train);
  o.fractions.val = cfg.get_double("val_fraction", o.fractions.val);
  o.fractions.test = cfg.get_double("test_fraction", o.fractions.test);
  cfg.check_consumed();
  const auto entries = data::simulate_dataset(f.out, o);
  int counts[3] = {0, 0, 0};
  for (const auto& e : entries) ++counts[static_cast<int>(e.split)];
  out << "pairs=" << entries.size() << " train=" << counts[0] << " val=" << counts[1]
      << " test=" << counts[2] << "\nmanifest=" << (fs::path(f.out) / "manifest.csv").string() << '\n';
  return kExitOk;
}

int cmd_fit_global(const Flags& f, std::ostream& out) {
  require(f.manifest, "--manifest");
  require(f.out, "--out");
  const KvConfig cfg = load_config(f);
  poly::FitOptions fo;
  fo.ridge = cfg.get_double("ridge", fo.ridge);
  fo.max_grid = cfg.get_int("max_grid", fo.max_grid);
  cfg.check_consumed();
  const auto entries = data::read_manifest(f.manifest);
  const auto train = data::load_split(entries, data::Split::kTrain);
  if (train.empty()) throw ConfigError("fit-global: manifest has no train pairs");
  std::vector<PlanarImage> srgb, xyz;
  for (const auto& p : train) {
    srgb.push_back(p.srgb);
    xyz.push_back(p.xyz);
  }
  const poly::PolyMatrix m_inv = poly::fit_poly(srgb, xyz, fo);
  const poly::PolyMatrix m_fwd = poly::fit_poly(xyz, srgb, fo);
  fs::create_directories(f.out);
  std::ofstream(fs::path(f.out) / "m_inv.txt") << m_inv.to_text();
  std::ofstream(fs::path(f.out) / "m_fwd.txt") << m_fwd.to_text();

  const auto eval = data::load_split(entries, data::parse_split(f.split));
  double a = 0.0, b = 0.0;
  for (const auto& p : eval) {
    a += metrics::psnr(poly::apply_poly(m_inv, p.srgb), p.xyz);
    b += metrics::psnr(clamp(poly::apply_poly(m_fwd, p.xyz), 0.0, 1.0), p.srgb);
  }
  out << "train_pairs=" << train.size() << '\n';
  if (!eval.empty()) {
    const double n = static_cast<double>(eval.size());
    out << "split=" << f.split << " pairs=" << eval.size() << " psnr_srgb_to_xyz=" << fmt(a / n)
        << " psnr_xyz_to_srgb=" << fmt(b / n) << '\n';
  }
  return kExitOk;
}

int cmd_train(const Flags& f, std::ostream& out) {
  require(f.manifest, "--manifest");
  require(f.out, "--out");
  const KvConfig cfg = load_config(f);
  cycle::TrainSchedule s;
  s.seed = f.seed;
  s.epochs = cfg.get_int("epochs", s.epochs);
  s.batch = cfg.get_int("batch", s.batch);
  s.patch = cfg.get_int("patch", s.patch);
  s.lr = cfg.get_double("lr", s.lr);
  s.lr_drop = cfg.get_double("lr_drop", s.lr_drop);
  s.lr_drop_every = cfg.get_int("lr_drop_every", s.lr_drop_every);
  s.lambda = cfg.get_double("lambda", s.lambda);
  s.lambda_reg = cfg.get_double("lambda_reg", s.lambda_reg);
  s.patches_per_pair = cfg.get_int("patches_per_pair", s.patches_per_pair);
  s.augment = cfg.get_bool("augment", s.augment);
  s.teacher_forcing = cfg.get_bool("teacher_forcing", s.teacher_forcing);
  const double head_gain = cfg.get_double("head_gain", 0.01);
  cfg.check_consumed();
  s.validate();

  const auto entries = data::read_manifest(f.manifest);
  const auto train = data::load_split(entries, data::Split::kTrain);
  if (train.empty()) throw ConfigError("train: manifest has no train pairs");
  cycle::Model net;
  net.initialize(f.seed, head_gain);
  out << "train_pairs=" << train.size() << " parameters=" << net.parameter_count() << '\n';
  const auto history = cycle::train(net, train, s, [&](const cycle::EpochRecord& r) {
    out << "epoch=" << r.epoch << " lr=" << fmt(r.lr) << " loss=" << fmt(r.loss_total)
        << " loss_xyz=" << fmt(r.loss_xyz) << " loss_srgb=" << fmt(r.loss_srgb) << std::endl;
  });
  fs::create_directories(f.out);
  net.save(fs::path(f.out) / "weights.bin");
  cycle::write_history_csv(history, fs::path(f.out) / "history.csv");

  const auto val = data::load_split(entries, data::Split::kVal);
  if (!val.empty()) {
    net.set_training(false);
    double a = 0.0;
    for (const auto& p : val) a += metrics::psnr(cycle::unprocess(net, p.srgb).xyz, p.xyz);
    out << "val_pairs=" << val.size() << " val_psnr_srgb_to_xyz=" << fmt(a / static_cast<double>(val.size()))
        << '\n';
  }
  out << "weights=" << (fs::path(f.out) / "weights.bin").string() << '\n';
  return kExitOk;
}

int cmd_unprocess(const Flags& f, std::ostream& out) {
  require(f.weights, "--weights");
  require(f.in, "--in");
  require(f.out, "--out");
  const cycle::Model net = load_model(f.weights);
  const auto d = cycle::unprocess(net, data::load_image(f.in));
  data::save_image(d.xyz, f.out, 16);
  double rmax = 0.0;
  for (double v : d.res.samples()) rmax = std::max(rmax, std::abs(v));
  out << "out=" << f.out << " max_abs_res=" << fmt(rmax) << '\n';
  return kExitOk;
}

int cmd_render(const Flags& f, std::ostream& out) {
  require(f.weights, "--weights");
  require(f.in, "--in");
  require(f.out, "--out");
  const cycle::Model net = load_model(f.weights);
  const auto d = cycle::render(net, data::load_image(f.in));
  data::save_image(d.srgb, f.out, 16);
  out << "out=" << f.out << '\n';
  if (!f.ref.empty()) out << "psnr=" << fmt(metrics::psnr(d.srgb, data::load_image(f.ref))) << '\n';
  return kExitOk;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  require(f.manifest, "--manifest");
  require(f.weights, "--weights");
  const cycle::Model net = load_model(f.weights);
  const auto entries = data::read_manifest(f.manifest);
  const data::Split split = data::parse_split(f.split);
  std::vector<metrics::ReportRow> rows;
  for (const auto& e : entries) {
    if (e.split != split) continue;
    const auto p = data::load_pair(e);
    const std::string id = stem_of(e.srgb_path);
    const auto d = cycle::unprocess(net, p.srgb);
    rows.push_back({id, "srgb_to_xyz", metrics::psnr(d.xyz, p.xyz)});
    rows.push_back({id, "xyz_to_srgb", metrics::psnr(cycle::render(net, d.xyz).srgb, p.srgb)});
    rows.push_back({id, "baseline_srgb_to_xyz",
                    metrics::psnr(color::standard_baseline(p.srgb, color::BaselineDirection::kUnprocess), p.xyz)});
  }
  if (rows.empty()) throw ConfigError("eval: no pairs in split " + f.split);
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    metrics::write_report(rows, fs::path(f.out) / "report.csv");
    metrics::write_summary(rows, fs::path(f.out) / "summary.csv");
  }
  out << "metric,Avg,Q1,Q2,Q3,n\n";
  for (const char* m : {"srgb_to_xyz", "xyz_to_srgb", "baseline_srgb_to_xyz"}) {
    std::vector<double> v;
    for (const auto& r : rows)
      if (r.metric == m) v.push_back(r.value);
    const auto s = metrics::summarize(v);
    out << m << ',' << fmt(s.avg) << ',' << fmt(s.q1) << ',' << fmt(s.q2) << ',' << fmt(s.q3) << ',' << s.n
        << '\n';
  }
  return kExitOk;
}

int cmd_enhance(const Flags& f, std::ostream& out) {
  require(f.in, "--in");
  require(f.out, "--out");
  const std::vector<double> gains =
      f.gains.empty() ? tasks::kDefaultGains : parse_double_list(f.gains, "--gains");
  cycle::Model net;
  const tasks::Linearizer lin = pick_linearizer(f, net, out);
  const PlanarImage in = data::load_image(f.in);
  const PlanarImage result = tasks::enhance_lowlight(lin, in, gains);
  data::save_image(result, f.out, 16);
  out << "out=" << f.out << " mean_luma_in=" << fmt(mean_luma(in))
      << " mean_luma_out=" << fmt(mean_luma(result)) << '\n';
  return kExitOk;
}

// Chart CSV: header "x,y,z,r,g,b", one patch per row.
int cmd_calibrate(const Flags& f, std::ostream& out) {
  require(f.in, "--in");
  require(f.out, "--out");
  std::ifstream in(f.in);
  if (!in) throw FormatError("cannot open " + f.in);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,y,z,r,g,b", 0) != 0) {
    throw FormatError(f.in + ": expected header x,y,z,r,g,b");
  }
  std::vector<color::Vec3> xyz, raw;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v[6];
    char comma = 0;
    for (int i = 0; i < 6; ++i) {
      if (!(ss >> v[i]) || (i < 5 && !(ss >> comma && comma == ','))) {
        throw FormatError(f.in + ":" + std::to_string(lineno) + ": expected six numbers");
      }
    }
    xyz.emplace_back(v[0], v[1], v[2]);
    raw.emplace_back(v[3], v[4], v[5]);
  }
  const auto cal = tasks::calibrate_xyz_to_raw(xyz, raw);
  std::ofstream o(f.out);
  if (!o) throw FormatError("cannot write " + f.out);
  o.precision(17);
  for (int r = 0; r < 3; ++r) o << cal.xyz_to_raw(r, 0) << ' ' << cal.xyz_to_raw(r, 1) << ' ' << cal.xyz_to_raw(r, 2) << '\n';
  out << "samples=" << cal.samples << " residual=" << fmt(cal.residual) << " out=" << f.out << '\n';
  return kExitOk;
}

tasks::SceneSetup scene_setup(const Flags& f, const KvConfig& cfg) {
  tasks::SceneSetup s;
  s.seed = f.seed;
  s.gamma = f.gamma;
  s.count = f.count > 0 ? f.count : cfg.get_int("count", s.count);
  s.size = cfg.get_int("size", s.size);
  s.quad_coeff = cfg.get_double("quad_coeff", s.quad_coeff);
  s.vignette_strength = cfg.get_double("vignette_strength", s.vignette_strength);
  s.local_contrast = cfg.get_double("local_contrast", s.local_contrast);
  return s;
}

int finish_harness(const Flags& f, const std::string& name, const std::vector<tasks::HarnessRow>& rows,
                   std::ostream& out) {
  double s = 0.0, l = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    out << "seed=" << r.seed << " path=" << r.path << " psnr=" << fmt(r.psnr) << '\n';
    if (r.path == "srgb") {
      s += r.psnr;
      ++n;
    } else {
      l += r.psnr;
    }
  }
  out << "harness=" << name << " scenes=" << n << " mean_srgb=" << fmt(s / n) << " mean_linear=" << fmt(l / n)
      << '\n';
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    tasks::write_harness_csv(rows, fs::path(f.out) / ("harness_" + name + ".csv"));
  }
  return kExitOk;
}

template <typename RunOne>
int run_harness(const Flags& f, const std::string& name, const KvConfig& cfg, std::ostream& out,
                RunOne&& one) {
  const tasks::SceneSetup setup = scene_setup(f, cfg);
  cfg.check_consumed();
  cycle::Model net;
  const tasks::Linearizer lin = pick_linearizer(f, net, out);
  const data::IspParams isp = tasks::scene_camera(setup);
  std::vector<tasks::HarnessRow> rows;
  for (const auto& scene : tasks::make_scenes(setup)) {
    const tasks::HarnessResult r = one(scene, isp, lin);
    rows.push_back({scene.seed, "srgb", r.psnr_srgb_path});
    rows.push_back({scene.seed, "linear", r.psnr_linear_path});
  }
  return finish_harness(f, name, rows, out);
}

int cmd_harness_blur(const Flags& f, std::ostream& out) {
  const KvConfig cfg = load_config(f);
  const int length = cfg.get_int("kernel_length", 9);
  const double angle = cfg.get_double("kernel_angle", 30.0);
  tasks::BlurOptions bo;
  bo.snr = cfg.get_double("snr", bo.snr);
  bo.quantize = cfg.get_bool("quantize", bo.quantize);
  const tasks::Kernel k = tasks::motion_kernel(length, angle);
  return run_harness(f, "blur", cfg, out, [&](const tasks::Scene& s, const data::IspParams& isp,
                                              const tasks::Linearizer& lin) {
    return tasks::blur_harness(s.xyz, k, isp, lin, bo);
  });
}

int cmd_harness_denoise(const Flags& f, std::ostream& out) {
  const KvConfig cfg = load_config(f);
  const double sigma = cfg.get_double("sigma", tasks::kDefaultNoiseSigma);
  const double strength = cfg.get_double("strength", tasks::kDefaultDenoiseStrength);
  return run_harness(f, "denoise", cfg, out, [&](const tasks::Scene& s, const data::IspParams& isp,
                                                 const tasks::Linearizer& lin) {
    return tasks::denoise_harness(s.xyz, isp, sigma, strength, lin, s.seed);
  });
}

int cmd_harness_haze(const Flags& f, std::ostream& out) {
  const KvConfig cfg = load_config(f);
  const double t = cfg.get_double("t", 0.6);
  const auto a = cfg.get_doubles("airlight", {0.8, 0.8, 0.8});
  if (a.size() != 3) throw ConfigError("airlight needs three values");
  return run_harness(f, "haze", cfg, out, [&](const tasks::Scene& s, const data::IspParams& isp,
                                              const tasks::Linearizer& lin) {
    return tasks::haze_harness(s.xyz, isp, t, color::Vec3(a[0], a[1], a[2]), lin);
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decompose sRGB images into CIE XYZ plus a local residual layer and back."};
  app.name("xyzcycle");
  app.require_subcommand(1, 1);
  Flags f;

  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", f.seed, "random seed")->capture_default_str(); };
  auto add_config = [&](CLI::App* c) { c->add_option("--config", f.config, "key=value config file"); };
  auto add_out = [&](CLI::App* c, const char* what) { c->add_option("--out", f.out, what); };

  auto* simulate = app.add_subcommand("simulate", "render a synthetic sRGB/XYZ dataset");
  add_seed(simulate);
  add_config(simulate);
  add_out(simulate, "output directory");
  simulate->add_option("--count", f.count, "number of pairs");
  simulate->add_option("--gamma", f.gamma, "camera gamma")->capture_default_str();

  auto* fit = app.add_subcommand("fit-global", "fit 3x6 polynomial transforms in both directions");
  add_config(fit);
  add_out(fit, "output directory");
  fit->add_option("--manifest", f.manifest, "manifest CSV");
  fit->add_option("--split", f.split, "split to report on")->capture_default_str();

  auto* train = app.add_subcommand("train", "train the cycle network");
  add_seed(train);
  add_config(train);
  add_out(train, "output directory");
  train->add_option("--manifest", f.manifest, "manifest CSV");

  auto* unprocess = app.add_subcommand("unprocess", "sRGB image to XYZ");
  unprocess->add_option("--weights", f.weights, "weights file");
  unprocess->add_option("--in", f.in, "input image (PNG or PFM)");
  add_out(unprocess, "output image (PNG or PFM)");

  auto* render = app.add_subcommand("render", "XYZ image to sRGB");
  render->add_option("--weights", f.weights, "weights file");
  render->add_option("--in", f.in, "input image (PNG or PFM)");
  render->add_option("--ref", f.ref, "reference sRGB image; prints PSNR against it");
  add_out(render, "output image (PNG or PFM)");

  auto* eval = app.add_subcommand("eval", "per-image PSNR report with quartiles");
  eval->add_option("--manifest", f.manifest, "manifest CSV");
  eval->add_option("--weights", f.weights, "weights file");
  eval->add_option("--split", f.split, "split to evaluate")->capture_default_str();
  add_out(eval, "output directory for report.csv and summary.csv");

  auto* enhance = app.add_subcommand("enhance", "low-light enhancement by multi-gain exposure fusion");
  enhance->add_option("--weights", f.weights, "weights file; standard linearization when omitted");
  enhance->add_option("--in", f.in, "input sRGB image");
  enhance->add_option("--gains", f.gains, "comma-separated digital gains");
  add_out(enhance, "output image");

  auto* calibrate = app.add_subcommand("calibrate", "fit an XYZ-to-raw matrix from chart colors");
  calibrate->add_option("--in", f.in, "chart CSV with header x,y,z,r,g,b");
  add_out(calibrate, "output matrix file");

  std::vector<CLI::App*> harnesses;
  for (const auto& [name, help] : {std::pair{"harness-blur", "motion deblurring study"},
                                   std::pair{"harness-denoise", "denoising study"},
                                   std::pair{"harness-haze", "haze removal study"}}) {
    auto* h = app.add_subcommand(name, help);
    add_seed(h);
    add_config(h);
    add_out(h, "output directory for the CSV report");
    h->add_option("--weights", f.weights, "weights file; standard linearization when omitted");
    h->add_option("--count", f.count, "number of scenes");
    h->add_option("--gamma", f.gamma, "camera gamma")->capture_default_str();
    harnesses.push_back(h);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(f, out);
    if (fit->parsed()) return cmd_fit_global(f, out);
    if (train->parsed()) return cmd_train(f, out);
    if (unprocess->parsed()) return cmd_unprocess(f, out);
    if (render->parsed()) return cmd_render(f, out);
    if (eval->parsed()) return cmd_eval(f, out);
    if (enhance->parsed()) return cmd_enhance(f, out);
    if (calibrate->parsed()) return cmd_calibrate(f, out);
    if (harnesses[0]->parsed()) return cmd_harness_blur(f, out);
    if (harnesses[1]->parsed()) return cmd_harness_denoise(f, out);
    if (harnesses[2]->parsed()) return cmd_harness_haze(f, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n' << "run 'xyzcycle --help' for usage\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace xyzcycle::cli
