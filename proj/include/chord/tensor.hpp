// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "chord/raster.hpp"

namespace chord {

/// Dense channel-major (C, H, W) buffer.
template <class S>
struct TensorT {
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<S> data;

  TensorT() = default;
  TensorT(int channels, int height, int width, S fill = S(0))
      : c(channels), h(height), w(width),
        data(static_cast<size_t>(channels) * height * width, fill) {}

  size_t size() const { return data.size(); }
  size_t plane() const { return static_cast<size_t>(h) * w; }
  S& at(int ch, int y, int x) { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
  S at(int ch, int y, int x) const { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
  S* channel(int ch) { return data.data() + ch * plane(); }
  const S* channel(int ch) const { return data.data() + ch * plane(); }
  bool same_shape(const TensorT& o) const { return c == o.c && h == o.h && w == o.w; }
};

using Tensor = TensorT<float>;

/// RGB image in [0, 1] -> 3-channel tensor in [-1, 1].
Tensor image_to_tensor(const LayoutImage& image);
/// Inverse mapping with clamping to [0, 1].
LayoutImage tensor_to_image(const Tensor& t, const WorldTransform& transform = {});

}  // namespace chord
