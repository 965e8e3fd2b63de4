// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "chord/raster.hpp"

namespace chord {

/// 8-bit RGB PNG. The world transform is stored in a `chord:transform`
/// text chunk ("scale offset_x offset_y") and restored by read_png.
void write_png(const LayoutImage& image, const std::string& path);
LayoutImage read_png(const std::string& path);

/// Rounds every channel to the nearest multiple of 1/255, which is what a
/// PNG round trip does.
LayoutImage quantize_8bit(LayoutImage image);

}  // namespace chord
