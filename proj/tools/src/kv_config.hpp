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
#include <map>
#include <set>
#include <string>
#include <vector>

namespace xyzcycle::cli {

// Plain key=value file. Blank lines and lines starting with '#' are skipped.
// Every key must be consumed by the subcommand, otherwise check_consumed()
// reports the leftovers as a ConfigError.
class KvConfig {
 public:
  KvConfig() = default;
  static KvConfig parse(const std::string& text, const std::string& origin = "config");
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  void check_consumed() const;

 private:
  const std::string* lookup(const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

// "0.1,1.4,2.7" -> {0.1, 1.4, 2.7}. Throws ConfigError on junk.
std::vector<double> parse_double_list(const std::string& text, const std::string& what);

}  // namespace xyzcycle::cli
