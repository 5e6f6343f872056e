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

#include "xyzcycle/nn/weights_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "xyzcycle/error.hpp"

namespace xyzcycle::nn {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

bool get_u32(std::istream& is, std::uint32_t& v) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
  v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
      (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return true;
}

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
  throw FormatError(path.string() + ": " + what);
}

}  // namespace

template <typename T>
void save_weights(const std::filesystem::path& path,
                  const std::vector<NamedParameter<T>>& parameters) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path.string() + ": cannot open for writing");
  os.write(kWeightMagic, 5);
  for (const auto& p : parameters) {
    put_u32(os, static_cast<std::uint32_t>(p.name.size()));
    os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put_u32(os, static_cast<std::uint32_t>(p.tensor->rank()));
    for (int d : p.tensor->dims()) put_u32(os, static_cast<std::uint32_t>(d));
    for (std::size_t k = 0; k < p.tensor->size(); ++k) {
      put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>((*p.tensor)[k])));
    }
  }
  if (!os) throw FormatError(path.string() + ": write failed");
}

std::vector<WeightRecord> read_weight_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path.string() + ": cannot open weight file");
  char magic[5];
  if (!is.read(magic, 5) || std::memcmp(magic, kWeightMagic, 5) != 0) {
    corrupt(path, "missing XYZW1 header");
  }
  std::vector<WeightRecord> records;
  std::uint32_t name_len = 0;
  while (get_u32(is, name_len)) {
    if (name_len > 4096) corrupt(path, "implausible tensor name length");
    WeightRecord rec;
    rec.name.resize(name_len);
    if (!is.read(rec.name.data(), name_len)) corrupt(path, "truncated tensor name");
    std::uint32_t rank = 0;
    if (!get_u32(is, rank) || rank > 8) corrupt(path, "bad rank for " + rec.name);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      std::uint32_t d = 0;
      if (!get_u32(is, d)) corrupt(path, "truncated dims for " + rec.name);
      rec.dims.push_back(static_cast<int>(d));
      count *= d;
    }
    if (count > (std::size_t{1} << 31)) corrupt(path, "implausible size for " + rec.name);
    rec.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      std::uint32_t bits = 0;
      if (!get_u32(is, bits)) corrupt(path, "truncated data for " + rec.name);
      rec.values[k] = std::bit_cast<float>(bits);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

template <typename T>
void load_weights(const std::filesystem::path& path,
                  const std::vector<NamedParameter<T>>& parameters) {
  const auto records = read_weight_file(path);
  std::size_t file_total = 0;
  std::map<std::string, const WeightRecord*> by_name;
  for (const auto& r : records) {
    file_total += r.values.size();
    by_name[r.name] = &r;
  }
  std::size_t expected_total = 0;
  for (const auto& p : parameters) expected_total += p.tensor->size();
  if (file_total != expected_total) {
    corrupt(path, "holds " + std::to_string(file_total) + " parameters, model expects " +
                      std::to_string(expected_total));
  }
  for (const auto& p : parameters) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) corrupt(path, "missing tensor " + p.name);
    if (it->second->dims != p.tensor->dims()) {
      corrupt(path, "tensor " + p.name + " has shape " + shape_string(it->second->dims) +
                        ", model expects " + p.tensor->shape_string());
    }
    for (std::size_t k = 0; k < p.tensor->size(); ++k) {
      (*p.tensor)[k] = static_cast<T>(it->second->values[k]);
    }
  }
}

template void save_weights(const std::filesystem::path&, const std::vector<NamedParameter<float>>&);
template void save_weights(const std::filesystem::path&,
                           const std::vector<NamedParameter<double>>&);
template void load_weights(const std::filesystem::path&, const std::vector<NamedParameter<float>>&);
template void load_weights(const std::filesystem::path&,
                           const std::vector<NamedParameter<double>>&);

}  // namespace xyzcycle::nn
