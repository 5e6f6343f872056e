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

#include <filesystem>
#include <string>
#include <vector>

#include "xyzcycle/nn/network.hpp"

// Binary weight file:
//   magic  "XYZW1" (5 bytes)
//   repeated until end of file, one record per tensor:
//     u32 name length, UTF-8 name bytes, u32 rank, u32 dims[rank],
//     float32 values[product(dims)]
// All integers and floats little-endian.
namespace xyzcycle::nn {

inline constexpr char kWeightMagic[] = "XYZW1";

struct WeightRecord {
  std::string name;
  std::vector<int> dims;
  std::vector<float> values;
};

template <typename T>
void save_weights(const std::filesystem::path& path,
                  const std::vector<NamedParameter<T>>& parameters);

std::vector<WeightRecord> read_weight_file(const std::filesystem::path& path);

// Loads values into `parameters` by name. Throws FormatError naming the path
// if the file's total parameter count differs from the parameters' total,
// a name is missing, or a shape differs.
template <typename T>
void load_weights(const std::filesystem::path& path,
                  const std::vector<NamedParameter<T>>& parameters);

}  // namespace xyzcycle::nn
