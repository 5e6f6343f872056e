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
#include <string>
#include <vector>

#include "xyzcycle/data.hpp"
#include "xyzcycle/image.hpp"
#include "xyzcycle/nn/network.hpp"
#include "xyzcycle/polymap.hpp"

namespace xyzcycle::cycle {

inline constexpr double kResidualScale = 0.25;
inline constexpr int kSubsampleSize = 128;
inline constexpr std::size_t kLocalParameters = 131235;
inline constexpr std::size_t kGlobalParameters = 1217554;
inline constexpr std::size_t kTotalParameters = 2 * kLocalParameters + 2 * kGlobalParameters;

// conv 3->32, 14 x conv 32->32, conv 32->3, LReLU between convs, tanh on top.
template <typename T>
nn::Sequential<T> make_local_subnet();

// 128x128 subsample, five (conv, LReLU, maxpool) stages 3->64->...->64,
// FC 1024->1024, LReLU, dropout 0.5, FC 1024->18.
template <typename T>
nn::Sequential<T> make_global_subnet(std::uint64_t dropout_seed = 0);

template <typename T>
class CycleNet {
 public:
  CycleNet();

  nn::Sequential<T> g_loc;   // sRGB -> residual layer
  nn::Sequential<T> g_glob;  // global sRGB layer -> inverse matrix
  nn::Sequential<T> f_glob;  // XYZ -> forward matrix
  nn::Sequential<T> f_loc;   // global sRGB layer -> residual layer
  double residual_scale = kResidualScale;

  // He initialization with the last layer of every sub-network scaled by
  // `head_gain`, and the global heads biased to [I3 | 0], so a fresh network
  // starts near the identity mapping.
  void initialize(std::uint64_t seed, double head_gain = 0.01);
  // Exact identity: local heads emit zero, global heads emit [I3 | 0].
  void set_identity();

  std::size_t parameter_count() const;
  std::vector<nn::NamedParameter<T>> named_parameters();
  std::vector<nn::Tensor<T>*> parameters();
  void set_training(bool training);
  void zero_grad();
  void clear_saved();

  void save(const std::filesystem::path& path);
  void load(const std::filesystem::path& path);
};

extern template class CycleNet<float>;
extern template class CycleNet<double>;

using Model = CycleNet<float>;

struct Decomposition {
  PlanarImage xyz;
  PlanarImage glob;
  PlanarImage res;
  poly::PolyMatrix matrix;
  // Inverse direction: the input as split (see unprocess).
  // Forward direction: the clamped output.
  PlanarImage srgb;
  // Forward direction: glob + res before clamping.
  PlanarImage srgb_unclamped;
};

// Residual and sRGB samples are snapped to multiples of 2^-32 before the
// split, which makes srgb = glob + res exact in double arithmetic. The snap
// moves a sample by at most 2^-33.
inline constexpr double kSplitGrid = 0x1.0p-32;
double snap_to_split_grid(double v);

template <typename T>
Decomposition unprocess(const CycleNet<T>& net, const PlanarImage& srgb);

template <typename T>
Decomposition render(const CycleNet<T>& net, const PlanarImage& xyz);

double cycle_loss(const PlanarImage& pred_xyz, const PlanarImage& gt_xyz,
                  const PlanarImage& pred_srgb, const PlanarImage& gt_srgb, double lambda);

struct TrainSchedule {
  int epochs = 300;
  int batch = 4;
  int patch = 256;
  double lr = 1e-4;
  double lr_drop = 0.5;
  int lr_drop_every = 75;
  double lambda = 1.5;
  double lambda_reg = 1e-3;
  std::uint64_t seed = 0;
  // Patches drawn per training pair per epoch.
  int patches_per_pair = 1;
  bool augment = true;
  // Feed the forward pipeline ground-truth XYZ instead of the reconstruction.
  bool teacher_forcing = false;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double loss_total = 0.0;
  double loss_xyz = 0.0;
  double loss_srgb = 0.0;
};

struct SampleLoss {
  double total = 0.0;
  double xyz = 0.0;
  double srgb = 0.0;
};

// One training sample through both pipelines. Gradients of
// grad_scale * loss are accumulated into the parameter grad buffers.
template <typename T>
SampleLoss forward_backward(CycleNet<T>& net, const data::ImagePair& sample, double lambda,
                            bool teacher_forcing, double grad_scale);

using EpochCallback = std::function<void(const EpochRecord&)>;

std::vector<EpochRecord> train(Model& net, const std::vector<data::ImagePair>& dataset,
                               const TrainSchedule& schedule, const EpochCallback& on_epoch = {});

void write_history_csv(const std::vector<EpochRecord>& history, const std::filesystem::path& path);

// Layout conversions between interleaved images and [3, h, w] tensors.
template <typename T>
nn::Tensor<T> to_tensor(const PlanarImage& img);
template <typename T>
PlanarImage from_tensor(const nn::Tensor<T>& t);

}  // namespace xyzcycle::cycle
