// Copyright 2026 The chord-layout Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "chord/diffusion.hpp"
#include "chord/error.hpp"

namespace chord {

namespace {

template <class S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

template <class S>
void silu_forward(const std::vector<S>& x, std::vector<S>& y) {
  y.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] * sigmoid(x[i]);
}

// g *= silu'(x)
template <class S>
void silu_backward(const std::vector<S>& x, std::vector<S>& g) {
  for (size_t i = 0; i < x.size(); ++i) {
    const S s = sigmoid(x[i]);
    g[i] *= s * (S(1) + x[i] * (S(1) - s));
  }
}

struct ConvP {
  int cin = 0, cout = 0;
  size_t w = 0, b = 0;  // offsets into the parameter vector
};

struct LinP {
  int in = 0, out = 0;
  size_t w = 0, b = 0;
};

struct BlockP {
  int ch = 0;
  ConvP a, b;
  LinP t;
};

// 3x3 convolution, zero padding 1, stride 1. Weights are [cout][cin][3][3].
template <class S>
void conv_forward(const ConvP& p, const S* params, const TensorT<S>& in, TensorT<S>& out) {
  const int H = in.h, W = in.w;
  out = TensorT<S>(p.cout, H, W);
  const S* wt = params + p.w;
  const S* bias = params + p.b;
  for (int co = 0; co < p.cout; ++co) {
    S* op = out.channel(co);
    std::fill(op, op + out.plane(), bias[co]);
    for (int ci = 0; ci < p.cin; ++ci) {
      const S* ip = in.channel(ci);
      const S* k = wt + (static_cast<size_t>(co) * p.cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          const S wv = k[ky * 3 + kx];
          for (int y = y0; y < y1; ++y) {
            S* orow = op + static_cast<size_t>(y) * W;
            const S* irow = ip + static_cast<size_t>(y + dy) * W + dx;
            for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
}

// Accumulates weight/bias gradients; writes the input gradient when `gin`
// is non-null (overwritten, not accumulated).
template <class S>
void conv_backward(const ConvP& p, const S* params, const TensorT<S>& in, const TensorT<S>& gout,
                   S* grad, TensorT<S>* gin) {
  const int H = in.h, W = in.w;
  const S* wt = params + p.w;
  S* gw = grad + p.w;
  S* gb = grad + p.b;
  if (gin) *gin = TensorT<S>(p.cin, H, W);
  for (int co = 0; co < p.cout; ++co) {
    const S* gp = gout.channel(co);
    S acc = 0;
#pragma omp simd reduction(+ : acc)
    for (size_t i = 0; i < gout.plane(); ++i) acc += gp[i];
    gb[co] += acc;
    for (int ci = 0; ci < p.cin; ++ci) {
      const S* ip = in.channel(ci);
      S* gip = gin ? gin->channel(ci) : nullptr;
      const size_t kidx = (static_cast<size_t>(co) * p.cin + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        const int dy = ky - 1;
        const int y0 = std::max(0, -dy), y1 = std::min(H, H - dy);
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          const S wv = wt[kidx + ky * 3 + kx];
          S wacc = 0;
          for (int y = y0; y < y1; ++y) {
            const S* grow = gp + static_cast<size_t>(y) * W;
            const S* irow = ip + static_cast<size_t>(y + dy) * W + dx;
#pragma omp simd reduction(+ : wacc)
            for (int x = x0; x < x1; ++x) wacc += grow[x] * irow[x];
            if (gip) {
              S* girow = gip + static_cast<size_t>(y + dy) * W + dx;
              for (int x = x0; x < x1; ++x) girow[x] += wv * grow[x];
            }
          }
          gw[kidx + ky * 3 + kx] += wacc;
        }
      }
    }
  }
}

template <class S>
void linear_forward(const LinP& p, const S* params, const std::vector<S>& x, std::vector<S>& y) {
  y.assign(p.out, 0);
  for (int o = 0; o < p.out; ++o) {
    S acc = params[p.b + o];
    const S* row = params + p.w + static_cast<size_t>(o) * p.in;
    for (int i = 0; i < p.in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}

// Accumulates parameter gradients and adds the input gradient into `gx`.
template <class S>
void linear_backward(const LinP& p, const S* params, const std::vector<S>& x,
                     const std::vector<S>& gy, S* grad, std::vector<S>& gx) {
  for (int o = 0; o < p.out; ++o) {
    grad[p.b + o] += gy[o];
    const S* row = params + p.w + static_cast<size_t>(o) * p.in;
    S* grow = grad + p.w + static_cast<size_t>(o) * p.in;
    for (int i = 0; i < p.in; ++i) {
      grow[i] += gy[o] * x[i];
      gx[i] += row[i] * gy[o];
    }
  }
}

template <class S>
TensorT<S> avgpool(const TensorT<S>& in) {
  TensorT<S> out(in.c, in.h / 2, in.w / 2);
  for (int c = 0; c < in.c; ++c) {
    for (int y = 0; y < out.h; ++y) {
      for (int x = 0; x < out.w; ++x) {
        out.at(c, y, x) = S(0.25) * (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                                     in.at(c, 2 * y + 1, 2 * x) + in.at(c, 2 * y + 1, 2 * x + 1));
      }
    }
  }
  return out;
}

// Adds the pooled-gradient spread into `gin`.
template <class S>
void avgpool_backward(const TensorT<S>& gout, TensorT<S>& gin) {
  for (int c = 0; c < gout.c; ++c) {
    for (int y = 0; y < gout.h; ++y) {
      for (int x = 0; x < gout.w; ++x) {
        const S g = S(0.25) * gout.at(c, y, x);
        gin.at(c, 2 * y, 2 * x) += g;
        gin.at(c, 2 * y, 2 * x + 1) += g;
        gin.at(c, 2 * y + 1, 2 * x) += g;
        gin.at(c, 2 * y + 1, 2 * x + 1) += g;
      }
    }
  }
}

template <class S>
TensorT<S> upsample(const TensorT<S>& in) {
  TensorT<S> out(in.c, in.h * 2, in.w * 2);
  for (int c = 0; c < out.c; ++c) {
    for (int y = 0; y < out.h; ++y) {
      for (int x = 0; x < out.w; ++x) out.at(c, y, x) = in.at(c, y / 2, x / 2);
    }
  }
  return out;
}

template <class S>
TensorT<S> upsample_backward(const TensorT<S>& gout) {
  TensorT<S> gin(gout.c, gout.h / 2, gout.w / 2);
  for (int c = 0; c < gout.c; ++c) {
    for (int y = 0; y < gout.h; ++y) {
      for (int x = 0; x < gout.w; ++x) gin.at(c, y / 2, x / 2) += gout.at(c, y, x);
    }
  }
  return gin;
}

template <class S>
TensorT<S> concat(const TensorT<S>& a, const TensorT<S>& b) {
  TensorT<S> out(a.c + b.c, a.h, a.w);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<long>(a.size()));
  return out;
}

template <class S>
void split(const TensorT<S>& g, int first_channels, TensorT<S>& a, TensorT<S>& b) {
  a = TensorT<S>(first_channels, g.h, g.w);
  b = TensorT<S>(g.c - first_channels, g.h, g.w);
  std::copy(g.data.begin(), g.data.begin() + static_cast<long>(a.size()), a.data.begin());
  std::copy(g.data.begin() + static_cast<long>(a.size()), g.data.end(), b.data.begin());
}

template <class S>
void add_into(TensorT<S>& dst, const TensorT<S>& src) {
  for (size_t i = 0; i < dst.size(); ++i) dst.data[i] += src.data[i];
}

template <class S>
std::vector<S> timestep_embedding(int t, int dim) {
  std::vector<S> e(dim, 0);
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    e[i] = static_cast<S>(std::sin(t * freq));
    e[half + i] = static_cast<S>(std::cos(t * freq));
  }
  return e;
}

}  // namespace

template <class S>
struct TinyUNet<S>::Layout {
  size_t total = 0;
  LinP time;
  ConvP conv_in;
  BlockP blk0;
  ConvP down1;
  BlockP blk1;
  ConvP down2;
  BlockP blk2;
  ConvP up1;
  BlockP blk3;
  ConvP up0;
  BlockP blk4;
  ConvP conv_out;

  ConvP conv(int cin, int cout) {
    ConvP p{cin, cout, total, 0};
    total += static_cast<size_t>(cin) * cout * 9;
    p.b = total;
    total += cout;
    return p;
  }
  LinP lin(int in, int out) {
    LinP p{in, out, total, 0};
    total += static_cast<size_t>(in) * out;
    p.b = total;
    total += out;
    return p;
  }
  BlockP block(int ch, int tdim) {
    BlockP b;
    b.ch = ch;
    b.a = conv(ch, ch);
    b.b = conv(ch, ch);
    b.t = lin(tdim, ch);
    return b;
  }

  explicit Layout(const UNetConfig& c) {
    const int c0 = c.widths[0], c1 = c.widths[1], c2 = c.widths[2];
    time = lin(c.time_dim, c.time_dim);
    conv_in = conv(c.in_channels, c0);
    blk0 = block(c0, c.time_dim);
    down1 = conv(c0, c1);
    blk1 = block(c1, c.time_dim);
    down2 = conv(c1, c2);
    blk2 = block(c2, c.time_dim);
    up1 = conv(c2 + c1, c1);
    blk3 = block(c1, c.time_dim);
    up0 = conv(c1 + c0, c0);
    blk4 = block(c0, c.time_dim);
    conv_out = conv(c0, c.out_channels);
  }
};

namespace {

template <class S>
struct BlockCache {
  TensorT<S> x, a, c, d;  // input, silu(input), conv_a + time bias, silu(c)
};

}  // namespace

template <class S>
struct TinyUNet<S>::Cache {
  std::vector<S> temb, tpre, th;
  TensorT<S> xin, h0, e0, p0, h1, e1, p1, h2, m, cat1, h3, d1, cat0, h4, d0, sd0;
  BlockCache<S> b0, b1, b2, b3, b4;
};

namespace {

template <class S>
TensorT<S> block_forward(const BlockP& p, const S* params, const std::vector<S>& th,
                         const TensorT<S>& x, BlockCache<S>* cache) {
  BlockCache<S> local;
  BlockCache<S>& bc = cache ? *cache : local;
  bc.x = x;
  bc.a = TensorT<S>(x.c, x.h, x.w);
  silu_forward(x.data, bc.a.data);
  conv_forward(p.a, params, bc.a, bc.c);
  std::vector<S> tb;
  linear_forward(p.t, params, th, tb);
  for (int ch = 0; ch < p.ch; ++ch) {
    S* cp = bc.c.channel(ch);
    for (size_t i = 0; i < bc.c.plane(); ++i) cp[i] += tb[ch];
  }
  bc.d = TensorT<S>(bc.c.c, bc.c.h, bc.c.w);
  silu_forward(bc.c.data, bc.d.data);
  TensorT<S> e;
  conv_forward(p.b, params, bc.d, e);
  add_into(e, x);
  return e;
}

// Returns d(loss)/d(block input); accumulates the embedding gradient in `gth`.
template <class S>
TensorT<S> block_backward(const BlockP& p, const S* params, const std::vector<S>& th,
                          const BlockCache<S>& bc, const TensorT<S>& gy, S* grad,
                          std::vector<S>& gth) {
  TensorT<S> gd;
  conv_backward(p.b, params, bc.d, gy, grad, &gd);
  silu_backward(bc.c.data, gd.data);  // gd is now d(loss)/dc
  std::vector<S> gtb(p.ch, 0);
  for (int ch = 0; ch < p.ch; ++ch) {
    const S* g = gd.channel(ch);
    S acc = 0;
    for (size_t i = 0; i < gd.plane(); ++i) acc += g[i];
    gtb[ch] = acc;
  }
  linear_backward(p.t, params, th, gtb, grad, gth);
  TensorT<S> ga;
  conv_backward(p.a, params, bc.a, gd, grad, &ga);
  silu_backward(bc.x.data, ga.data);
  add_into(ga, gy);
  return ga;
}

}  // namespace

template <class S>
TinyUNet<S>::TinyUNet(const UNetConfig& config, uint64_t seed)
    : config_(config), layout_(std::make_unique<Layout>(config)) {
  for (int w : config.widths) {
    if (w < 1) fail(ErrorKind::kArgument, "U-Net widths must be positive");
  }
  if (config.time_dim < 2 || config.time_dim % 2) {
    fail(ErrorKind::kArgument, "time embedding size must be even and >= 2");
  }
  params_.assign(layout_->total, S(0));
  Rng rng(seed);
  auto init_conv = [&](const ConvP& p, double gain = 1.0) {
    const double stdev = gain / std::sqrt(9.0 * p.cin);
    for (size_t i = 0; i < static_cast<size_t>(p.cin) * p.cout * 9; ++i) {
      params_[p.w + i] = static_cast<S>(rng.normal() * stdev);
    }
  };
  auto init_lin = [&](const LinP& p) {
    const double stdev = 1.0 / std::sqrt(static_cast<double>(p.in));
    for (size_t i = 0; i < static_cast<size_t>(p.in) * p.out; ++i) {
      params_[p.w + i] = static_cast<S>(rng.normal() * stdev);
    }
  };
  const Layout& L = *layout_;
  init_lin(L.time);
  init_conv(L.conv_in);
  for (const BlockP* b : {&L.blk0, &L.blk1, &L.blk2, &L.blk3, &L.blk4}) {
    init_conv(b->a);
    // Residual branches start small so every block is close to identity.
    init_conv(b->b, 0.1);
    init_lin(b->t);
  }
  for (const ConvP* c : {&L.down1, &L.down2, &L.up1, &L.up0}) init_conv(*c);
  init_conv(L.conv_out, 0.1);
}

template <class S>
TinyUNet<S>::~TinyUNet() = default;

template <class S>
TinyUNet<S>::TinyUNet(const TinyUNet& o)
    : config_(o.config_), layout_(std::make_unique<Layout>(*o.layout_)), params_(o.params_) {}

template <class S>
TinyUNet<S>& TinyUNet<S>::operator=(const TinyUNet& o) {
  if (this != &o) {
    config_ = o.config_;
    layout_ = std::make_unique<Layout>(*o.layout_);
    params_ = o.params_;
  }
  return *this;
}

template <class S>
std::shared_ptr<typename TinyUNet<S>::Cache> TinyUNet<S>::make_cache() const {
  return std::make_shared<Cache>();
}

template <class S>
TensorT<S> TinyUNet<S>::forward(const TensorT<S>& x_t, const TensorT<S>& cond, int t) const {
  Cache cache;
  return forward(x_t, cond, t, cache);
}

template <class S>
TensorT<S> TinyUNet<S>::forward(const TensorT<S>& x_t, const TensorT<S>& cond, int t,
                                Cache& k) const {
  if (x_t.h != cond.h || x_t.w != cond.w) {
    fail(ErrorKind::kTensor, "layout and condition sizes differ");
  }
  if (x_t.c + cond.c != config_.in_channels) {
    fail(ErrorKind::kTensor, "expected " + std::to_string(config_.in_channels) +
                                 " input channels, got " + std::to_string(x_t.c + cond.c));
  }
  if (x_t.h % 4 || x_t.w % 4 || x_t.h == 0 || x_t.w == 0) {
    fail(ErrorKind::kTensor, "image height and width must be positive multiples of 4");
  }
  const Layout& L = *layout_;
  const S* P = params_.data();

  k.temb = timestep_embedding<S>(t, config_.time_dim);
  linear_forward(L.time, P, k.temb, k.tpre);
  silu_forward(k.tpre, k.th);

  k.xin = concat(x_t, cond);
  conv_forward(L.conv_in, P, k.xin, k.h0);
  k.e0 = block_forward(L.blk0, P, k.th, k.h0, &k.b0);
  k.p0 = avgpool(k.e0);
  conv_forward(L.down1, P, k.p0, k.h1);
  k.e1 = block_forward(L.blk1, P, k.th, k.h1, &k.b1);
  k.p1 = avgpool(k.e1);
  conv_forward(L.down2, P, k.p1, k.h2);
  k.m = block_forward(L.blk2, P, k.th, k.h2, &k.b2);
  k.cat1 = concat(upsample(k.m), k.e1);
  conv_forward(L.up1, P, k.cat1, k.h3);
  k.d1 = block_forward(L.blk3, P, k.th, k.h3, &k.b3);
  k.cat0 = concat(upsample(k.d1), k.e0);
  conv_forward(L.up0, P, k.cat0, k.h4);
  k.d0 = block_forward(L.blk4, P, k.th, k.h4, &k.b4);
  k.sd0 = TensorT<S>(k.d0.c, k.d0.h, k.d0.w);
  silu_forward(k.d0.data, k.sd0.data);
  TensorT<S> out;
  conv_forward(L.conv_out, P, k.sd0, out);
  return out;
}

template <class S>
void TinyUNet<S>::backward(const Cache& k, const TensorT<S>& grad_out, std::vector<S>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), S(0));
  const Layout& L = *layout_;
  const S* P = params_.data();
  S* G = grad.data();
  std::vector<S> gth(config_.time_dim, 0);

  TensorT<S> g;
  conv_backward(L.conv_out, P, k.sd0, grad_out, G, &g);
  silu_backward(k.d0.data, g.data);
  g = block_backward(L.blk4, P, k.th, k.b4, g, G, gth);
  TensorT<S> gcat;
  conv_backward(L.up0, P, k.cat0, g, G, &gcat);
  TensorT<S> gu0, ge0;
  split(gcat, L.up0.cin - config_.widths[0], gu0, ge0);

  g = upsample_backward(gu0);
  g = block_backward(L.blk3, P, k.th, k.b3, g, G, gth);
  conv_backward(L.up1, P, k.cat1, g, G, &gcat);
  TensorT<S> gu1, ge1;
  split(gcat, L.up1.cin - config_.widths[1], gu1, ge1);

  g = upsample_backward(gu1);
  g = block_backward(L.blk2, P, k.th, k.b2, g, G, gth);
  TensorT<S> gp;
  conv_backward(L.down2, P, k.p1, g, G, &gp);
  avgpool_backward(gp, ge1);

  g = block_backward(L.blk1, P, k.th, k.b1, ge1, G, gth);
  conv_backward(L.down1, P, k.p0, g, G, &gp);
  avgpool_backward(gp, ge0);

  g = block_backward(L.blk0, P, k.th, k.b0, ge0, G, gth);
  conv_backward<S>(L.conv_in, P, k.xin, g, G, nullptr);

  silu_backward(k.tpre, gth);
  std::vector<S> unused(config_.time_dim, 0);
  linear_backward(L.time, P, k.temb, gth, G, unused);
}

template class TinyUNet<float>;
template class TinyUNet<double>;

}  // namespace chord
