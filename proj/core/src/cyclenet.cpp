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

#include "xyzcycle/cyclenet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "xyzcycle/error.hpp"
#include "xyzcycle/nn/adam.hpp"
#include "xyzcycle/nn/weights_io.hpp"
#include "xyzcycle/random.hpp"
#include "nn/denormals.hpp"

namespace xyzcycle::cycle {

using nn::Sequential;
using nn::Tensor;

template <typename T>
Sequential<T> make_local_subnet() {
  Sequential<T> net;
  net.template emplace<nn::Conv3x3<T>>(3, 32);
  net.template emplace<nn::LeakyRelu<T>>();
  for (int i = 0; i < 14; ++i) {
    net.template emplace<nn::Conv3x3<T>>(32, 32);
    net.template emplace<nn::LeakyRelu<T>>();
  }
  net.template emplace<nn::Conv3x3<T>>(32, 3);
  net.template emplace<nn::Tanh<T>>();
  return net;
}

template <typename T>
Sequential<T> make_global_subnet(std::uint64_t dropout_seed) {
  Sequential<T> net;
  net.template emplace<nn::UniformSubsample<T>>(kSubsampleSize, kSubsampleSize);
  for (int i = 0; i < 5; ++i) {
    net.template emplace<nn::Conv3x3<T>>(i == 0 ? 3 : 64, 64);
    net.template emplace<nn::LeakyRelu<T>>();
    net.template emplace<nn::MaxPool2<T>>();
  }
  net.template emplace<nn::FullyConnected<T>>(4 * 4 * 64, 1024);
  net.template emplace<nn::LeakyRelu<T>>();
  net.template emplace<nn::Dropout<T>>(0.5, dropout_seed);
  net.template emplace<nn::FullyConnected<T>>(1024, 18);
  return net;
}

namespace {

// The last parameterized layer of a sub-network: final conv (local) or FC (global).
template <typename T>
nn::Layer<T>& head(Sequential<T>& net) {
  for (std::size_t i = net.size(); i-- > 0;) {
    if (!net.layer(i).parameters().empty()) return net.layer(i);
  }
  throw StateError("sub-network has no parameterized layer");
}

template <typename T>
void set_identity_bias(nn::Layer<T>& fc) {
  auto& bias = *fc.parameters()[1];
  const auto id = poly::PolyMatrix::identity().row_major();
  for (std::size_t i = 0; i < id.size(); ++i) bias[i] = static_cast<T>(id[i]);
}

template <typename T>
void scale_tensor(Tensor<T>& t, double gain) {
  for (auto& v : t.values()) v = static_cast<T>(v * gain);
}

}  // namespace

template <typename T>
CycleNet<T>::CycleNet()
    : g_loc(make_local_subnet<T>()),
      g_glob(make_global_subnet<T>()),
      f_glob(make_global_subnet<T>()),
      f_loc(make_local_subnet<T>()) {}

template <typename T>
void CycleNet<T>::initialize(std::uint64_t seed, double head_gain) {
  g_loc.initialize(derive_seed(seed, 0));
  g_glob.initialize(derive_seed(seed, 1));
  f_glob.initialize(derive_seed(seed, 2));
  f_loc.initialize(derive_seed(seed, 3));
  for (auto* net : {&g_loc, &f_loc}) scale_tensor(*head(*net).parameters()[0], head_gain);
  for (auto* net : {&g_glob, &f_glob}) {
    auto& fc = head(*net);
    scale_tensor(*fc.parameters()[0], head_gain);
    set_identity_bias(fc);
  }
}

template <typename T>
void CycleNet<T>::set_identity() {
  for (auto* net : {&g_loc, &f_loc, &g_glob, &f_glob}) {
    for (auto* p : head(*net).parameters()) std::fill(p->values().begin(), p->values().end(), T{0});
  }
  set_identity_bias(head(g_glob));
  set_identity_bias(head(f_glob));
}

template <typename T>
std::size_t CycleNet<T>::parameter_count() const {
  return g_loc.parameter_count() + g_glob.parameter_count() + f_glob.parameter_count() +
         f_loc.parameter_count();
}

template <typename T>
std::vector<nn::NamedParameter<T>> CycleNet<T>::named_parameters() {
  std::vector<nn::NamedParameter<T>> out;
  for (auto& [name, net] : {std::pair{"g_loc", &g_loc}, std::pair{"g_glob", &g_glob},
                            std::pair{"f_glob", &f_glob}, std::pair{"f_loc", &f_loc}}) {
    for (auto& p : net->named_parameters(name)) out.push_back(std::move(p));
  }
  return out;
}

template <typename T>
std::vector<Tensor<T>*> CycleNet<T>::parameters() {
  std::vector<Tensor<T>*> out;
  for (auto& p : named_parameters()) out.push_back(p.tensor);
  return out;
}

template <typename T>
void CycleNet<T>::set_training(bool training) {
  for (auto* net : {&g_loc, &g_glob, &f_glob, &f_loc}) net->set_training(training);
}

template <typename T>
void CycleNet<T>::zero_grad() {
  for (auto* net : {&g_loc, &g_glob, &f_glob, &f_loc}) net->zero_grad();
}

template <typename T>
void CycleNet<T>::clear_saved() {
  for (auto* net : {&g_loc, &g_glob, &f_glob, &f_loc}) net->clear_saved();
}

template <typename T>
void CycleNet<T>::save(const std::filesystem::path& path) {
  nn::save_weights(path, named_parameters());
}

template <typename T>
void CycleNet<T>::load(const std::filesystem::path& path) {
  nn::load_weights(path, named_parameters());
}

template class CycleNet<float>;
template class CycleNet<double>;

template <typename T>
Tensor<T> to_tensor(const PlanarImage& img) {
  const int h = img.height(), w = img.width();
  Tensor<T> t({3, h, w});
  const std::size_t plane = img.pixel_count();
  for (std::size_t p = 0; p < plane; ++p)
    for (int c = 0; c < 3; ++c) t[c * plane + p] = static_cast<T>(img[3 * p + c]);
  return t;
}

template <typename T>
PlanarImage from_tensor(const Tensor<T>& t) {
  if (t.rank() != 3 || t.dim(0) != 3) {
    throw ShapeError("expected a [3 x h x w] tensor, got " + t.shape_string());
  }
  PlanarImage img(t.dim(1), t.dim(2));
  const std::size_t plane = img.pixel_count();
  for (std::size_t p = 0; p < plane; ++p)
    for (int c = 0; c < 3; ++c) img[3 * p + c] = static_cast<double>(t[c * plane + p]);
  return img;
}

template Tensor<float> to_tensor<float>(const PlanarImage&);
template Tensor<double> to_tensor<double>(const PlanarImage&);
template PlanarImage from_tensor<float>(const Tensor<float>&);
template PlanarImage from_tensor<double>(const Tensor<double>&);

double snap_to_split_grid(double v) { return std::nearbyint(v / kSplitGrid) * kSplitGrid; }

namespace {

template <typename T>
poly::PolyMatrix to_matrix(const Tensor<T>& out) {
  if (out.size() != 18) throw ShapeError("global head must emit 18 values, got " + out.shape_string());
  std::array<double, 18> v{};
  for (std::size_t i = 0; i < 18; ++i) v[i] = static_cast<double>(out[i]);
  return poly::PolyMatrix::from_row_major(v);
}

}  // namespace

template <typename T>
Decomposition unprocess(const CycleNet<T>& net, const PlanarImage& srgb) {
  require_finite(srgb, "unprocess");
  const nn::ScopedFlushDenormals ftz;
  Decomposition d;
  d.srgb = srgb;
  for (double& v : d.srgb.samples()) v = snap_to_split_grid(v);
  d.res = from_tensor(net.g_loc.infer(to_tensor<T>(d.srgb)));
  // Truncation toward zero keeps |res| <= residual_scale after snapping.
  for (double& v : d.res.samples()) v = std::trunc(net.residual_scale * v / kSplitGrid) * kSplitGrid;
  d.glob = subtract(d.srgb, d.res);
  d.matrix = to_matrix(net.g_glob.infer(to_tensor<T>(d.glob)));
  d.xyz = clamp_min(poly::apply_poly(d.matrix, d.glob), 0.0);
  return d;
}

template <typename T>
Decomposition render(const CycleNet<T>& net, const PlanarImage& xyz) {
  require_finite(xyz, "render");
  const nn::ScopedFlushDenormals ftz;
  Decomposition d;
  d.xyz = xyz;
  d.matrix = to_matrix(net.f_glob.infer(to_tensor<T>(xyz)));
  d.glob = poly::apply_poly(d.matrix, xyz);
  d.res = scale(from_tensor(net.f_loc.infer(to_tensor<T>(d.glob))), net.residual_scale);
  d.srgb_unclamped = add(d.glob, d.res);
  d.srgb = clamp(d.srgb_unclamped, 0.0, 1.0);
  return d;
}

template Decomposition unprocess(const CycleNet<float>&, const PlanarImage&);
template Decomposition unprocess(const CycleNet<double>&, const PlanarImage&);
template Decomposition render(const CycleNet<float>&, const PlanarImage&);
template Decomposition render(const CycleNet<double>&, const PlanarImage&);

double cycle_loss(const PlanarImage& pred_xyz, const PlanarImage& gt_xyz,
                  const PlanarImage& pred_srgb, const PlanarImage& gt_srgb, double lambda) {
  require_same_shape(pred_xyz, gt_xyz, "cycle_loss xyz");
  require_same_shape(pred_srgb, gt_srgb, "cycle_loss srgb");
  double ex = 0.0, es = 0.0;
  for (std::size_t i = 0; i < pred_xyz.size(); ++i) ex += std::abs(pred_xyz[i] - gt_xyz[i]);
  for (std::size_t i = 0; i < pred_srgb.size(); ++i) es += std::abs(pred_srgb[i] - gt_srgb[i]);
  return lambda * ex / static_cast<double>(pred_xyz.size()) +
         es / static_cast<double>(pred_srgb.size());
}

void TrainSchedule::validate() const {
  if (epochs < 1 || batch < 1 || patch < 1 || lr_drop_every < 1 || patches_per_pair < 1) {
    throw ConfigError("train: epochs, batch, patch, lr_drop_every and patches_per_pair must be positive");
  }
  if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
  if (!(lr_drop > 0.0 && lr_drop < 1.0)) throw ConfigError("train: lr_drop must lie in (0, 1)");
  if (!(lambda >= 0.0) || !(lambda_reg >= 0.0)) {
    throw ConfigError("train: lambda and lambda_reg must be nonnegative");
  }
}

namespace {

// d/dx and d/dM of y = M phi(x), given dL/dy.
void poly_backward(const poly::PolyMatrix& m, const PlanarImage& x, const PlanarImage& dy,
                   PlanarImage& dx, std::array<double, 18>& dm) {
  dm.fill(0.0);
  const auto& e = m.entries();
  for (std::size_t p = 0; p < x.pixel_count(); ++p) {
    const double v[3] = {x[3 * p], x[3 * p + 1], x[3 * p + 2]};
    const double phi[6] = {v[0], v[1], v[2], v[0] * v[0], v[1] * v[1], v[2] * v[2]};
    double g[3] = {0.0, 0.0, 0.0};
    for (int r = 0; r < 3; ++r) {
      const double d = dy[3 * p + r];
      if (d == 0.0) continue;
      for (int k = 0; k < 6; ++k) dm[static_cast<std::size_t>(r * 6 + k)] += d * phi[k];
      for (int c = 0; c < 3; ++c) g[c] += d * (e(r, c) + 2.0 * e(r, c + 3) * v[c]);
    }
    for (int c = 0; c < 3; ++c) dx[3 * p + c] += g[c];
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; }

template <typename T>
Tensor<T> vector_tensor(const std::array<double, 18>& v) {
  Tensor<T> t({18});
  for (std::size_t i = 0; i < 18; ++i) t[i] = static_cast<T>(v[i]);
  return t;
}

}  // namespace

template <typename T>
SampleLoss forward_backward(CycleNet<T>& net, const data::ImagePair& sample, double lambda,
                            bool teacher_forcing, double grad_scale) {
  const PlanarImage& s = sample.srgb;
  const PlanarImage& gt = sample.xyz;
  require_same_shape(s, gt, "forward_backward");
  const double rs = net.residual_scale;
  const double n = static_cast<double>(s.size());

  // Inverse pipeline.
  const PlanarImage a = from_tensor(net.g_loc.forward(to_tensor<T>(s)));
  const PlanarImage glob_i = subtract(s, scale(a, rs));
  const poly::PolyMatrix m_i = to_matrix(net.g_glob.forward(to_tensor<T>(glob_i)));
  const PlanarImage xyz_pre = poly::apply_poly(m_i, glob_i);
  const PlanarImage xyz = clamp_min(xyz_pre, 0.0);

  // Forward pipeline.
  const PlanarImage& fwd_in = teacher_forcing ? gt : xyz;
  const poly::PolyMatrix m_f = to_matrix(net.f_glob.forward(to_tensor<T>(fwd_in)));
  const PlanarImage glob_f = poly::apply_poly(m_f, fwd_in);
  const PlanarImage b = from_tensor(net.f_loc.forward(to_tensor<T>(glob_f)));
  PlanarImage srgb_pre = glob_f;
  for (std::size_t i = 0; i < srgb_pre.size(); ++i) srgb_pre[i] += rs * b[i];

  SampleLoss loss;
  for (std::size_t i = 0; i < s.size(); ++i) {
    loss.xyz += std::abs(xyz_pre[i] - gt[i]);
    loss.srgb += std::abs(srgb_pre[i] - s[i]);
  }
  loss.xyz /= n;
  loss.srgb /= n;
  loss.total = lambda * loss.xyz + loss.srgb;

  // Backward through the forward pipeline.
  PlanarImage d_srgb(s.height(), s.width());
  for (std::size_t i = 0; i < s.size(); ++i) d_srgb[i] = grad_scale * sign(srgb_pre[i] - s[i]) / n;
  PlanarImage d_glob_f = d_srgb;
  {
    const PlanarImage d_b_in = from_tensor(net.f_loc.backward(to_tensor<T>(scale(d_srgb, rs))));
    for (std::size_t i = 0; i < d_glob_f.size(); ++i) d_glob_f[i] += d_b_in[i];
  }
  PlanarImage d_fwd_in(s.height(), s.width());
  std::array<double, 18> dm{};
  poly_backward(m_f, fwd_in, d_glob_f, d_fwd_in, dm);
  {
    const PlanarImage d_net_in = from_tensor(net.f_glob.backward(vector_tensor<T>(dm)));
    for (std::size_t i = 0; i < d_fwd_in.size(); ++i) d_fwd_in[i] += d_net_in[i];
  }

  // Backward through the inverse pipeline.
  PlanarImage d_xyz_pre(s.height(), s.width());
  for (std::size_t i = 0; i < s.size(); ++i) {
    double g = grad_scale * lambda * sign(xyz_pre[i] - gt[i]) / n;
    if (!teacher_forcing && xyz_pre[i] > 0.0) g += d_fwd_in[i];
    d_xyz_pre[i] = g;
  }
  PlanarImage d_glob_i(s.height(), s.width());
  poly_backward(m_i, glob_i, d_xyz_pre, d_glob_i, dm);
  {
    const PlanarImage d_net_in = from_tensor(net.g_glob.backward(vector_tensor<T>(dm)));
    for (std::size_t i = 0; i < d_glob_i.size(); ++i) d_glob_i[i] += d_net_in[i];
  }
  // glob_i = s - rs * a; the input gradient of g_loc is not needed.
  net.g_loc.backward(to_tensor<T>(scale(d_glob_i, -rs)));
  return loss;
}

template SampleLoss forward_backward(CycleNet<float>&, const data::ImagePair&, double, bool, double);
template SampleLoss forward_backward(CycleNet<double>&, const data::ImagePair&, double, bool, double);

std::vector<EpochRecord> train(Model& net, const std::vector<data::ImagePair>& dataset,
                               const TrainSchedule& schedule, const EpochCallback& on_epoch) {
  schedule.validate();
  if (dataset.empty()) throw ConfigError("train: empty dataset");
  for (const auto& pair : dataset) {
    require_same_shape(pair.srgb, pair.xyz, "train");
    if (pair.srgb.height() < schedule.patch || pair.srgb.width() < schedule.patch) {
      throw ConfigError("train: patch size " + std::to_string(schedule.patch) +
                        " exceeds a training image of " + std::to_string(pair.srgb.height()) +
                        "x" + std::to_string(pair.srgb.width()));
    }
  }

  const nn::ScopedFlushDenormals ftz;
  const auto params = net.parameters();
  nn::AdamState state;
  std::vector<EpochRecord> history;
  net.set_training(true);
  for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
    const double lr =
        schedule.lr * std::pow(schedule.lr_drop, (epoch - 1) / schedule.lr_drop_every);
    const std::uint64_t epoch_seed = derive_seed(schedule.seed, static_cast<std::uint64_t>(epoch));

    std::vector<data::ImagePair> patches;
    patches.reserve(dataset.size() * static_cast<std::size_t>(schedule.patches_per_pair));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      auto p = data::extract_patches(dataset[i], schedule.patch, schedule.patches_per_pair,
                                     derive_seed(epoch_seed, i), schedule.augment);
      for (auto& q : p) patches.push_back(std::move(q));
    }
    Rng order_rng(derive_seed(epoch_seed, 0xD0));
    for (std::size_t i = patches.size(); i > 1; --i) {
      std::swap(patches[i - 1], patches[static_cast<std::size_t>(order_rng.uniform_int(static_cast<int>(i)))]);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    for (std::size_t start = 0; start < patches.size(); start += static_cast<std::size_t>(schedule.batch)) {
      const std::size_t end = std::min(patches.size(), start + static_cast<std::size_t>(schedule.batch));
      net.zero_grad();
      const double gs = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const SampleLoss l =
            forward_backward(net, patches[k], schedule.lambda, schedule.teacher_forcing, gs);
        rec.loss_total += l.total;
        rec.loss_xyz += l.xyz;
        rec.loss_srgb += l.srgb;
      }
      nn::adam_step(params, state, lr, schedule.lambda_reg);
    }
    const double count = static_cast<double>(patches.size());
    rec.loss_total /= count;
    rec.loss_xyz /= count;
    rec.loss_srgb /= count;
    history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  net.set_training(false);
  net.clear_saved();
  return history;
}

void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out.precision(9);
  out << "epoch,lr,loss_total,loss_xyz,loss_srgb\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << r.lr << ',' << r.loss_total << ',' << r.loss_xyz << ',' << r.loss_srgb
        << '\n';
  }
}

template Sequential<float> make_local_subnet<float>();
template Sequential<double> make_local_subnet<double>();
template Sequential<float> make_global_subnet<float>(std::uint64_t);
template Sequential<double> make_global_subnet<double>(std::uint64_t);

}  // namespace xyzcycle::cycle
