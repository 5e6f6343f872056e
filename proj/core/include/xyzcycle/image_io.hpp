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

#include "xyzcycle/image.hpp"

namespace xyzcycle::data {

// PNG: 8-bit samples decode to v/255, 16-bit to v/65535. Only 3-channel RGB
// files are accepted. PFM: 3-channel "PF" files of either byte order; samples
// are returned unscaled.
PlanarImage load_png(const std::filesystem::path& path);
void save_png(const PlanarImage& img, const std::filesystem::path& path, int bit_depth = 8);

PlanarImage load_pfm(const std::filesystem::path& path);
// Writes little-endian (negative scale) rows bottom to top.
void save_pfm(const PlanarImage& img, const std::filesystem::path& path);

// Dispatch on the extension (.png or .pfm, case-insensitive).
PlanarImage load_image(const std::filesystem::path& path);
void save_image(const PlanarImage& img, const std::filesystem::path& path, int png_bit_depth = 8);

}  // namespace xyzcycle::data
