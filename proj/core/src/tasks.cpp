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

#include "xyzcycle/tasks.hpp"

#include <fftw3.h>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>

#include "xyzcycle/error.hpp"
#include "xyzcycle/filter.hpp"
#include "xyzcycle/metrics.hpp"
#include "xyzcycle/random.hpp"

namespace xyzcycle::tasks {

std::vector<PlanarImage> multi_gain(const PlanarImage& xyz, std::span<const double> gains) {
  std::vector<PlanarImage> out;
  out.reserve(gains.size());
  for (double g : gains) {
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidInputError("multi_gain: gains must be positive");
    out.push_back(scale(xyz, g));
  }
  return out;
}

// ---- exposure fusion --------------------------------------------------------

double well_exposedness(double v) {
  const double d = v - 0.5;
  return std::exp(-d * d / (2.0 * 0.2 * 0.2));
}

namespace {

// Single-channel plane used by the pyramids.
struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int h_, int w_, double fill = 0.0) : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, fill) {}
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

constexpr double kBurt[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) i = i < 0 ? -i : 2 * (n - 1) - i;
  return i;
}

Plane reduce(const Plane& p) {
  Plane tmp(p.h, (p.w + 1) / 2);
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < tmp.w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kBurt[k + 2] * p.at(y, reflect(2 * x + k, p.w));
      tmp.at(y, x) = acc;
    }
  Plane out((p.h + 1) / 2, tmp.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int k = -2; k <= 2; ++k) acc += kBurt[k + 2] * tmp.at(reflect(2 * y + k, p.h), x);
      out.at(y, x) = acc;
    }
  return out;
}

// Interpolates onto an h x w grid: out(y) = sum_j 2 k[y - 2j + 2] p(j).
Plane expand(const Plane& p, int h, int w) {
  auto taps = [](int i, int n, int src_n, auto&& fn) {
    for (int j = (i - 2 + 1) / 2 - 1; j <= (i + 2) / 2 + 1; ++j) {
      const int d = i - 2 * j;
      if (d < -2 || d > 2) continue;
      fn(std::clamp(j, 0, src_n - 1), 2.0 * kBurt[d + 2]);
    }
    (void)n;
  };
  Plane tmp(p.h, w);
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      taps(x, w, p.w, [&](int j, double k) { acc += k * p.at(y, j); });
      tmp.at(y, x) = acc;
    }
  Plane out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      taps(y, h, p.h, [&](int j, double k) { acc += k * tmp.at(j, x); });
      out.at(y, x) = acc;
    }
  return out;
}

std::vector<Plane> gaussian_pyramid(Plane p, int depth) {
  std::vector<Plane> pyr;
  pyr.push_back(std::move(p));
  for (int i = 1; i < depth; ++i) pyr.push_back(reduce(pyr.back()));
  return pyr;
}

std::vector<Plane> laplacian_pyramid(const Plane& p, int depth) {
  auto g = gaussian_pyramid(p, depth);
  for (int i = 0; i + 1 < depth; ++i) {
    const Plane up = expand(g[i + 1], g[i].h, g[i].w);
    for (std::size_t k = 0; k < up.v.size(); ++k) g[i].v[k] -= up.v[k];
  }
  return g;
}

Plane channel(const PlanarImage& img, int c) {
  Plane p(img.height(), img.width());
  for (std::size_t i = 0; i < img.pixel_count(); ++i) p.v[i] = img[3 * i + c];
  return p;
}

std::vector<double> fusion_weights(const PlanarImage& img) {
  const int h = img.height(), w = img.width();
  std::vector<double> gray(img.pixel_count());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = (img[3 * i] + img[3 * i + 1] + img[3 * i + 2]) / 3.0;
  }
  std::vector<double> out(img.pixel_count());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto at = [&](int yy, int xx) {
        return gray[static_cast<std::size_t>(reflect(yy, h)) * w + reflect(xx, w)];
      };
      const double lap = at(y - 1, x) + at(y + 1, x) + at(y, x - 1) + at(y, x + 1) - 4.0 * at(y, x);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double r = img[3 * i], g = img[3 * i + 1], b = img[3 * i + 2];
      const double mu = (r + g + b) / 3.0;
      const double sat = std::sqrt(((r - mu) * (r - mu) + (g - mu) * (g - mu) + (b - mu) * (b - mu)) / 3.0);
      const double wexp = well_exposedness(r) * well_exposedness(g) * well_exposedness(b);
      out[i] = std::abs(lap) * sat * wexp + 1e-12;
    }
  return out;
}

}  // namespace

PlanarImage exposure_fusion(std::span<const PlanarImage> images) {
  if (images.empty()) throw InvalidInputError("exposure_fusion: no images");
  for (const auto& img : images) {
    require_finite(img, "exposure_fusion");
    require_same_shape(images[0], img, "exposure_fusion");
  }
  const int h = images[0].height(), w = images[0].width();
  const int depth = std::max(1, static_cast<int>(std::floor(std::log2(std::min(h, w)))) - 1);

  std::vector<std::vector<double>> weights;
  for (const auto& img : images) weights.push_back(fusion_weights(img));
  for (std::size_t i = 0; i < weights[0].size(); ++i) {
    double sum = 0.0;
    for (const auto& wk : weights) sum += wk[i];
    for (auto& wk : weights) wk[i] /= sum;
  }

  PlanarImage out(h, w);
  for (int c = 0; c < 3; ++c) {
    std::vector<Plane> blend;
    for (std::size_t k = 0; k < images.size(); ++k) {
      Plane wp(h, w);
      wp.v = weights[k];
      const auto gw = gaussian_pyramid(std::move(wp), depth);
      const auto lp = laplacian_pyramid(channel(images[k], c), depth);
      if (blend.empty()) {
        blend = lp;
        for (auto& level : blend) std::fill(level.v.begin(), level.v.end(), 0.0);
      }
      for (int l = 0; l < depth; ++l)
        for (std::size_t i = 0; i < blend[l].v.size(); ++i) blend[l].v[i] += gw[l].v[i] * lp[l].v[i];
    }
    Plane acc = blend.back();
    for (int l = depth - 2; l >= 0; --l) {
      Plane up = expand(acc, blend[l].h, blend[l].w);
      for (std::size_t i = 0; i < up.v.size(); ++i) up.v[i] += blend[l].v[i];
      acc = std::move(up);
    }
    for (std::size_t i = 0; i < acc.v.size(); ++i) out[3 * i + c] = acc.v[i];
  }
  return out;
}

// ---- linearizers and enhancement ------------------------------------------

Linearizer standard_linearizer() {
  return {[](const PlanarImage& s) { return color::standard_baseline(s, color::BaselineDirection::kUnprocess); },
          [](const PlanarImage& x) { return color::standard_baseline(x, color::BaselineDirection::kRender); }};
}

Linearizer learned_linearizer(const cycle::Model& net) {
  return {[&net](const PlanarImage& s) { return cycle::unprocess(net, s).xyz; },
          [&net](const PlanarImage& x) { return cycle::render(net, x).srgb; }};
}

PlanarImage enhance_lowlight(const Linearizer& lin, const PlanarImage& srgb,
                             std::span<const double> gains) {
  if (gains.empty()) throw InvalidInputError("enhance_lowlight: no gains");
  const PlanarImage xyz = lin.to_linear(srgb);
  auto exposures = multi_gain(xyz, gains);
  for (auto& e : exposures) e = clamp(e, 0.0, 1.0);
  return lin.to_srgb(exposure_fusion(exposures));
}

PlanarImage enhance_lowlight(const cycle::Model& net, const PlanarImage& srgb,
                             std::span<const double> gains) {
  return enhance_lowlight(learned_linearizer(net), srgb, gains);
}

// ---- calibration and illuminants -------------------------------------------

RawCalibration calibrate_xyz_to_raw(std::span<const color::Vec3> xyz,
                                    std::span<const color::Vec3> raw) {
  if (xyz.size() != raw.size()) {
    throw ShapeError("calibrate_xyz_to_raw: " + std::to_string(xyz.size()) + " XYZ colors vs " +
                     std::to_string(raw.size()) + " raw colors");
  }
  const auto n = static_cast<Eigen::Index>(xyz.size());
  Eigen::MatrixXd x(n, 3), r(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = xyz[static_cast<std::size_t>(i)].transpose();
    r.row(i) = raw[static_cast<std::size_t>(i)].transpose();
  }
  if (!x.allFinite() || !r.allFinite()) throw InvalidInputError("calibrate_xyz_to_raw: non-finite color");
  if (n < 3) {
    throw RankError("calibrate_xyz_to_raw: need at least 3 non-coplanar colors, got " +
                    std::to_string(n));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  const auto sv = svd.singularValues();
  if (!(sv(2) > 1e-10 * sv(0))) {
    throw RankError("calibrate_xyz_to_raw: chart colors are coplanar (rank < 3)");
  }
  // x * M^T = r in the least-squares sense.
  const Eigen::Matrix3d mt = x.colPivHouseholderQr().solve(r);
  RawCalibration cal;
  cal.xyz_to_raw = mt.transpose();
  cal.samples = xyz.size();
  cal.residual = std::sqrt((x * mt - r).squaredNorm() / static_cast<double>(n));
  return cal;
}

PlanarImage apply_calibration(const RawCalibration& cal, const PlanarImage& xyz) {
  return color::apply_matrix(cal.xyz_to_raw, xyz);
}

namespace {

void require_illuminant(const Illuminant& l) {
  if (!(l.rgb.minCoeff() > 0.0) || !l.rgb.allFinite()) {
    throw InvalidInputError("illuminant components must be positive");
  }
}

}  // namespace

PlanarImage apply_illuminant(const PlanarImage& raw_wb, const Illuminant& l) {
  require_illuminant(l);
  require_finite(raw_wb, "apply_illuminant");
  PlanarImage out = raw_wb;
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) out[3 * i + c] *= l.rgb[c];
  return out;
}

PlanarImage remove_illuminant(const PlanarImage& raw, const Illuminant& l) {
  require_illuminant(l);
  require_finite(raw, "remove_illuminant");
  PlanarImage out = raw;
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) out[3 * i + c] /= l.rgb[c];
  return out;
}

CastSample illuminant_augment(const PlanarImage& xyz, const RawCalibration& cal,
                              std::span<const Illuminant> illuminants, std::uint64_t seed) {
  if (illuminants.empty()) throw InvalidInputError("illuminant_augment: no illuminants");
  Rng rng(derive_seed(seed, 0x111));
  const Illuminant& l = illuminants[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(illuminants.size())))];
  return {apply_illuminant(clamp_min(apply_calibration(cal, xyz), 0.0), l), l};
}

// ---- haze -------------------------------------------------------------------

namespace {

void require_airlight(const color::Vec3& a) {
  if (!(a.minCoeff() >= 0.0 && a.maxCoeff() <= 1.0)) {
    throw InvalidInputError("haze_model: airlight must lie in [0, 1]^3");
  }
}

double haze_sample(double v, double t, double a, HazeDirection direction) {
  if (direction == HazeDirection::kSynthesize) return v * t + a * (1.0 - t);
  if (!(t > 0.0)) throw InvalidInputError("haze_model: transmission must be positive to invert");
  return (v - a * (1.0 - t)) / t;
}

}  // namespace

PlanarImage haze_model(const PlanarImage& img, double t, const color::Vec3& a,
                       HazeDirection direction) {
  require_finite(img, "haze_model");
  require_airlight(a);
  if (direction == HazeDirection::kInvert && !(t > 0.0)) {
    throw InvalidInputError("haze_model: transmission must be positive to invert");
  }
  PlanarImage out = img;
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) out[3 * i + c] = haze_sample(img[3 * i + c], t, a[c], direction);
  return out;
}

PlanarImage haze_model(const PlanarImage& img, const PlanarImage& t, const color::Vec3& a,
                       HazeDirection direction) {
  require_finite(img, "haze_model");
  require_finite(t, "haze_model transmission");
  require_same_shape(img, t, "haze_model");
  require_airlight(a);
  PlanarImage out = img;
  for (std::size_t i = 0; i < out.pixel_count(); ++i)
    for (int c = 0; c < 3; ++c) {
      out[3 * i + c] = haze_sample(img[3 * i + c], t[3 * i + c], a[c], direction);
    }
  return out;
}

// ---- kernels and Wiener deconvolution ---------------------------------------

double Kernel::sum() const {
  double s = 0.0;
  for (double v : taps) s += v;
  return s;
}

Kernel delta_kernel() { return Kernel{}; }

Kernel motion_kernel(int length, double angle_degrees) {
  if (length < 1) throw InvalidInputError("motion_kernel: length must be positive");
  const double theta = angle_degrees * std::numbers::pi / 180.0;
  const double dx = std::cos(theta), dy = -std::sin(theta);
  const int half = length / 2;
  const int size = 2 * half + 1;
  Kernel k{size, size, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0)};
  // Bilinear splat of `length` unit samples spaced one pixel apart.
  for (int i = 0; i < length; ++i) {
    const double s = i - (length - 1) / 2.0;
    const double fy = half + s * dy, fx = half + s * dx;
    const int y0 = static_cast<int>(std::floor(fy)), x0 = static_cast<int>(std::floor(fx));
    const double ty = fy - y0, tx = fx - x0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const int y = y0 + a, x = x0 + b;
        const double wgt = (a ? ty : 1 - ty) * (b ? tx : 1 - tx);
        if (wgt > 0.0 && y >= 0 && y < size && x >= 0 && x < size) {
          k.taps[static_cast<std::size_t>(y) * size + x] += wgt;
        }
      }
  }
  // Trim empty border rows / columns, keeping the center.
  int top = 0;
  while (top < half) {
    bool empty = true;
    for (int x = 0; x < size; ++x)
      empty = empty && k.taps[static_cast<std::size_t>(top) * size + x] == 0.0 &&
              k.taps[static_cast<std::size_t>(size - 1 - top) * size + x] == 0.0;
    if (!empty) break;
    ++top;
  }
  int left = 0;
  while (left < half) {
    bool empty = true;
    for (int y = 0; y < size; ++y)
      empty = empty && k.taps[static_cast<std::size_t>(y) * size + left] == 0.0 &&
              k.taps[static_cast<std::size_t>(y) * size + size - 1 - left] == 0.0;
    if (!empty) break;
    ++left;
  }
  Kernel out{size - 2 * top, size - 2 * left, {}};
  for (int y = top; y < size - top; ++y)
    for (int x = left; x < size - left; ++x) out.taps.push_back(k.taps[static_cast<std::size_t>(y) * size + x]);
  const double s = out.sum();
  for (double& v : out.taps) v /= s;
  return out;
}

namespace {

void validate_kernel(const Kernel& k, const PlanarImage& img) {
  if (k.height < 1 || k.width < 1 ||
      k.taps.size() != static_cast<std::size_t>(k.height) * k.width) {
    throw InvalidInputError("kernel: tap count does not match its dimensions");
  }
  for (double v : k.taps) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInputError("kernel: taps must be finite and nonnegative");
  }
  if (k.height > img.height() || k.width > img.width()) {
    throw InvalidInputError("kernel " + std::to_string(k.height) + "x" + std::to_string(k.width) +
                            " is larger than the image");
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

// Frequency-domain processing of one image, channel by channel.
class Spectrum {
 public:
  Spectrum(int h, int w) : h_(h), w_(w), wc_(w / 2 + 1) {
    real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * h * w)));
    freq_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * h * wc_)));
    forward_ = fftw_plan_dft_r2c_2d(h, w, real_.get(), freq_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(h, w, freq_.get(), real_.get(), FFTW_ESTIMATE);
  }
  ~Spectrum() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  Spectrum(const Spectrum&) = delete;
  Spectrum& operator=(const Spectrum&) = delete;

  std::vector<std::complex<double>> transform_kernel(const Kernel& k) {
    std::fill(real_.get(), real_.get() + static_cast<std::size_t>(h_) * w_, 0.0);
    for (int y = 0; y < k.height; ++y)
      for (int x = 0; x < k.width; ++x) {
        const int yy = ((y - k.height / 2) % h_ + h_) % h_;
        const int xx = ((x - k.width / 2) % w_ + w_) % w_;
        real_.get()[static_cast<std::size_t>(yy) * w_ + xx] += k.taps[static_cast<std::size_t>(y) * k.width + x];
      }
    fftw_execute(forward_);
    return spectrum();
  }

  template <typename Filter>
  void filter_channel(const PlanarImage& in, PlanarImage& out, int c, Filter&& f) {
    const std::size_t n = static_cast<std::size_t>(h_) * w_;
    for (std::size_t i = 0; i < n; ++i) real_.get()[i] = in[3 * i + c];
    fftw_execute(forward_);
    for (std::size_t i = 0; i < static_cast<std::size_t>(h_) * wc_; ++i) {
      const std::complex<double> g(freq_.get()[i][0], freq_.get()[i][1]);
      const std::complex<double> r = f(i, g);
      freq_.get()[i][0] = r.real();
      freq_.get()[i][1] = r.imag();
    }
    fftw_execute(backward_);
    for (std::size_t i = 0; i < n; ++i) out[3 * i + c] = real_.get()[i] / static_cast<double>(n);
  }

 private:
  std::vector<std::complex<double>> spectrum() const {
    std::vector<std::complex<double>> s(static_cast<std::size_t>(h_) * wc_);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {freq_.get()[i][0], freq_.get()[i][1]};
    return s;
  }

  int h_, w_, wc_;
  std::unique_ptr<double, FftwFree> real_;
  std::unique_ptr<fftw_complex, FftwFree> freq_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

PlanarImage convolve(const PlanarImage& img, const Kernel& k) {
  require_finite(img, "convolve");
  validate_kernel(k, img);
  Spectrum s(img.height(), img.width());
  const auto hk = s.transform_kernel(k);
  PlanarImage out(img.height(), img.width());
  for (int c = 0; c < 3; ++c) {
    s.filter_channel(img, out, c, [&](std::size_t i, std::complex<double> g) { return g * hk[i]; });
  }
  return out;
}

PlanarImage wiener_deconvolve(const PlanarImage& img, const Kernel& k, double snr) {
  require_finite(img, "wiener_deconvolve");
  validate_kernel(k, img);
  if (!(snr > 0.0)) throw InvalidInputError("wiener_deconvolve: snr must be positive");
  Spectrum s(img.height(), img.width());
  const auto hk = s.transform_kernel(k);
  const double reg = 1.0 / snr;
  PlanarImage out(img.height(), img.width());
  for (int c = 0; c < 3; ++c) {
    s.filter_channel(img, out, c, [&](std::size_t i, std::complex<double> g) {
      const double p = std::norm(hk[i]) + reg;
      return p > 0.0 ? std::conj(hk[i]) * g / p : std::complex<double>{};
    });
  }
  return out;
}

// ---- harnesses ----------------------------------------------------------------

PlanarImage quantize8(const PlanarImage& img) {
  PlanarImage out = img;
  for (double& v : out.samples()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return out;
}

HarnessResult blur_harness(const PlanarImage& scene_xyz, const Kernel& kernel,
                           const data::IspParams& isp, const Linearizer& lin,
                           const BlurOptions& options) {
  validate_kernel(kernel, scene_xyz);
  if (std::abs(kernel.sum() - 1.0) > 1e-9) throw InvalidInputError("blur_harness: kernel must sum to 1");
  const PlanarImage reference = data::simulate_isp(scene_xyz, isp);
  PlanarImage observed = data::simulate_isp(convolve(scene_xyz, kernel), isp);
  if (options.quantize) observed = quantize8(observed);

  HarnessResult r;
  const PlanarImage direct = clamp(wiener_deconvolve(observed, kernel, options.snr), 0.0, 1.0);
  r.psnr_srgb_path = metrics::psnr(direct, reference);
  const PlanarImage linear = wiener_deconvolve(lin.to_linear(observed), kernel, options.snr);
  r.psnr_linear_path = metrics::psnr(clamp(lin.to_srgb(clamp_min(linear, 0.0)), 0.0, 1.0), reference);
  return r;
}

HarnessResult denoise_harness(const PlanarImage& scene_xyz, const data::IspParams& isp,
                              double sigma, double strength, const Linearizer& lin,
                              std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidInputError("denoise_harness: sigma must be nonnegative");
  if (!(strength >= 0.0)) throw InvalidInputError("denoise_harness: strength must be nonnegative");
  const PlanarImage reference = data::simulate_isp(scene_xyz, isp);
  PlanarImage noisy = scene_xyz;
  Rng rng(derive_seed(seed, 0xD15E));
  for (double& v : noisy.samples()) v += sigma * rng.normal();
  const PlanarImage observed = data::simulate_isp(noisy, isp);

  HarnessResult r;
  r.psnr_srgb_path = metrics::psnr(clamp(gaussian_blur(observed, strength), 0.0, 1.0), reference);
  const PlanarImage linear = gaussian_blur(lin.to_linear(observed), strength);
  r.psnr_linear_path = metrics::psnr(clamp(lin.to_srgb(clamp_min(linear, 0.0)), 0.0, 1.0), reference);
  return r;
}

HarnessResult haze_harness(const PlanarImage& scene_xyz, const data::IspParams& isp, double t,
                           const color::Vec3& a, const Linearizer& lin) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInputError("haze_harness: t must lie in (0, 1]");
  const PlanarImage reference = data::simulate_isp(scene_xyz, isp);
  const PlanarImage observed =
      data::simulate_isp(haze_model(scene_xyz, t, a, HazeDirection::kSynthesize), isp);

  // Airlight as the camera renders it, for the direct sRGB path.
  data::IspParams global = isp;
  global.vignette_strength = 0.0;
  global.local_contrast = 0.0;
  const PlanarImage air = data::simulate_isp(PlanarImage(1, 1, std::vector<double>{a[0], a[1], a[2]}), global);
  const color::Vec3 a_srgb(air[0], air[1], air[2]);

  HarnessResult r;
  r.psnr_srgb_path = metrics::psnr(
      clamp(haze_model(observed, t, a_srgb, HazeDirection::kInvert), 0.0, 1.0), reference);
  const PlanarImage linear = lin.to_linear(observed);
  // The airlight in the linearized state: the linearizer applied to the rendered airlight.
  const PlanarImage air_lin = lin.to_linear(PlanarImage(linear.height(), linear.width(),
                                                        [&] {
                                                          std::vector<double> v(linear.size());
                                                          for (std::size_t i = 0; i < linear.pixel_count(); ++i)
                                                            for (int c = 0; c < 3; ++c) v[3 * i + c] = a_srgb[c];
                                                          return v;
                                                        }()));
  PlanarImage dehazed = linear;
  for (std::size_t i = 0; i < dehazed.size(); ++i) dehazed[i] = (linear[i] - air_lin[i] * (1.0 - t)) / t;
  r.psnr_linear_path = metrics::psnr(clamp(lin.to_srgb(clamp_min(dehazed, 0.0)), 0.0, 1.0), reference);
  return r;
}

data::IspParams scene_camera(const SceneSetup& setup) {
  return data::random_isp_params(setup.seed, setup.gamma, setup.quad_coeff,
                                 setup.vignette_strength, setup.local_contrast);
}

std::vector<Scene> make_scenes(const SceneSetup& setup) {
  if (setup.count < 0 || setup.size < 1) throw ConfigError("make_scenes: bad count or size");
  std::vector<Scene> out;
  for (int i = 0; i < setup.count; ++i) {
    const std::uint64_t s = derive_seed(setup.seed, setup.first_stream + static_cast<std::uint64_t>(i));
    out.push_back({s, data::generate_scene(setup.size, setup.size, s, setup.exposure)});
  }
  return out;
}

void write_harness_csv(const std::vector<HarnessRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out.precision(10);
  out << "seed,path,psnr\n";
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& r : rows) {
    out << r.seed << ',' << r.path << ',' << r.psnr << '\n';
    if (!sums.count(r.path)) order.push_back(r.path);
    auto& [sum, n] = sums[r.path];
    sum += r.psnr;
    ++n;
  }
  for (const auto& p : order) out << "mean," << p << ',' << sums[p].first / sums[p].second << '\n';
  if (!out) throw FormatError("failed writing " + path.string());
}

}  // namespace xyzcycle::tasks
