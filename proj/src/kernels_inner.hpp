#pragma once

// Per-element kernel routines shared by the serial and OpenMP backends.
// Every routine computes one independent output region with a fixed internal
// reduction order, which is what makes the two backends bit-identical.

#include <cmath>
#include <cstdint>

#include "mulab/kernels.hpp"

namespace mulab::kernels::inner {

inline int64_t idx4(int a, int b, int c, int d, int B, int C, int D) {
  return ((static_cast<int64_t>(a) * B + b) * C + c) * D + d;
}

// Four-lane dot product. Fixed lane-strided accumulation order; the lanes let
// the compiler vectorize without reassociating a single serial chain.
inline float dot4(const float* a, const float* b, int n) {
  float s0 = 0.f, s1 = 0.f, s2 = 0.f, s3 = 0.f;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  float tail = 0.f;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((s0 + s1) + (s2 + s3)) + tail;
}

// One output row y[n,f,oh,:]. Accumulation order per element: (c, kh, kw).
inline void conv2d_row(const float* x, const float* k, float* yrow,
                       const Conv2dDims& d, int n, int f, int oh) {
  for (int i = 0; i < d.ow; ++i) yrow[i] = 0.f;
  for (int c = 0; c < d.c; ++c) {
    const float* krowc = k + idx4(f, c, 0, 0, d.c, d.kh, d.kw);
    for (int kh = 0; kh < d.kh; ++kh) {
      const int ih = oh * d.stride + kh - d.pad;
      if (ih < 0 || ih >= d.h) continue;
      const float* xrow = x + idx4(n, c, ih, 0, d.c, d.h, d.w);
      const float* krow = krowc + static_cast<int64_t>(kh) * d.kw;
      if (d.stride == 1) {
        for (int kw = 0; kw < d.kw; ++kw) {
          const float kv = krow[kw];
          int lo = d.pad - kw;
          if (lo < 0) lo = 0;
          int hi = d.w + d.pad - kw;
          if (hi > d.ow) hi = d.ow;
          const float* xs = xrow + kw - d.pad;
          for (int ow = lo; ow < hi; ++ow) yrow[ow] += kv * xs[ow];
        }
      } else {
        for (int kw = 0; kw < d.kw; ++kw) {
          const float kv = krow[kw];
          for (int ow = 0; ow < d.ow; ++ow) {
            const int iw = ow * d.stride + kw - d.pad;
            if (iw < 0 || iw >= d.w) continue;
            yrow[ow] += kv * xrow[iw];
          }
        }
      }
    }
  }
}

// One input-grad row dx[n,c,ih,:] += correlation of dy with the flipped
// kernel. Accumulation order per element: (f, kh, kw).
inline void conv2d_dx_row(const float* dy, const float* k, float* dxrow,
                          const Conv2dDims& d, int n, int c, int ih) {
  for (int f = 0; f < d.f; ++f) {
    for (int kh = 0; kh < d.kh; ++kh) {
      const int ohs = ih + d.pad - kh;
      if (d.stride == 1) {
        const int oh = ohs;
        if (oh < 0 || oh >= d.oh) continue;
        const float* dyrow = dy + idx4(n, f, oh, 0, d.f, d.oh, d.ow);
        const float* krow = k + idx4(f, c, kh, 0, d.c, d.kh, d.kw);
        for (int kw = 0; kw < d.kw; ++kw) {
          const float kv = krow[kw];
          int lo = kw - d.pad;
          if (lo < 0) lo = 0;
          int hi = d.ow + kw - d.pad;
          if (hi > d.w) hi = d.w;
          const float* dys = dyrow - kw + d.pad;
          for (int iw = lo; iw < hi; ++iw) dxrow[iw] += kv * dys[iw];
        }
      } else {
        if (ohs % d.stride != 0) continue;
        const int oh = ohs / d.stride;
        if (oh < 0 || oh >= d.oh) continue;
        const float* dyrow = dy + idx4(n, f, oh, 0, d.f, d.oh, d.ow);
        const float* krow = k + idx4(f, c, kh, 0, d.c, d.kh, d.kw);
        for (int kw = 0; kw < d.kw; ++kw) {
          const float kv = krow[kw];
          for (int iw = 0; iw < d.w; ++iw) {
            const int ows = iw + d.pad - kw;
            if (ows % d.stride != 0) continue;
            const int ow = ows / d.stride;
            if (ow < 0 || ow >= d.ow) continue;
            dxrow[iw] += kv * dyrow[ow];
          }
        }
      }
    }
  }
}

// One kernel-grad slice dk[f,c,:,:]. Accumulation order per element:
// (n, oh, ow) with the dot4 lane order over ow.
inline void conv2d_dk_slice(const float* dy, const float* x, float* dkslice,
                            const Conv2dDims& d, int f, int c) {
  for (int kh = 0; kh < d.kh; ++kh) {
    for (int kw = 0; kw < d.kw; ++kw) {
      float acc = dkslice[kh * d.kw + kw];
      for (int n = 0; n < d.n; ++n) {
        for (int oh = 0; oh < d.oh; ++oh) {
          const int ih = oh * d.stride + kh - d.pad;
          if (ih < 0 || ih >= d.h) continue;
          const float* dyrow = dy + idx4(n, f, oh, 0, d.f, d.oh, d.ow);
          const float* xrow = x + idx4(n, c, ih, 0, d.c, d.h, d.w);
          if (d.stride == 1) {
            int lo = d.pad - kw;
            if (lo < 0) lo = 0;
            int hi = d.w + d.pad - kw;
            if (hi > d.ow) hi = d.ow;
            if (hi > lo) acc += dot4(dyrow + lo, xrow + lo + kw - d.pad, hi - lo);
          } else {
            for (int ow = 0; ow < d.ow; ++ow) {
              const int iw = ow * d.stride + kw - d.pad;
              if (iw < 0 || iw >= d.w) continue;
              acc += dyrow[ow] * xrow[iw];
            }
          }
        }
      }
      dkslice[kh * d.kw + kw] = acc;
    }
  }
}

inline void dense_row(const float* xrow, const float* w, const float* b,
                      float* yrow, int in, int out) {
  for (int o = 0; o < out; ++o)
    yrow[o] = b[o] + dot4(xrow, w + static_cast<int64_t>(o) * in, in);
}

inline void dense_dx_row(const float* dyrow, const float* w, float* dxrow,
                         int in, int out) {
  for (int o = 0; o < out; ++o) {
    const float g = dyrow[o];
    const float* wrow = w + static_cast<int64_t>(o) * in;
    for (int i = 0; i < in; ++i) dxrow[i] += g * wrow[i];
  }
}

// dw[o,:] += sum_n dy[n,o] * x[n,:]; fixed order over n.
inline void dense_dw_row(const float* dy, const float* x, float* dwrow,
                         int n, int in, int out, int o) {
  for (int s = 0; s < n; ++s) {
    const float g = dy[static_cast<int64_t>(s) * out + o];
    const float* xrow = x + static_cast<int64_t>(s) * in;
    for (int i = 0; i < in; ++i) dwrow[i] += g * xrow[i];
  }
}

inline void maxpool2_plane(const float* x, float* y, int32_t* argmax,
                           int n, int c, int h, int w, int plane) {
  const int oh = h / 2, ow = w / 2;
  const int64_t ibase = static_cast<int64_t>(plane) * h * w;
  const int64_t obase = static_cast<int64_t>(plane) * oh * ow;
  (void)n;
  (void)c;
  for (int py = 0; py < oh; ++py) {
    for (int px = 0; px < ow; ++px) {
      float best = x[ibase + (2 * py) * w + 2 * px];
      int32_t besti = static_cast<int32_t>((2 * py) * w + 2 * px);
      for (int ky = 0; ky < 2; ++ky) {
        for (int kx = 0; kx < 2; ++kx) {
          const int iy = 2 * py + ky, ix = 2 * px + kx;
          const float val = x[ibase + iy * w + ix];
          if (val > best) {
            best = val;
            besti = static_cast<int32_t>(iy * w + ix);
          }
        }
      }
      y[obase + py * ow + px] = best;
      argmax[obase + py * ow + px] = besti;
    }
  }
}

inline void gap_plane(const float* x, float* y, int h, int w, int plane) {
  const float* p = x + static_cast<int64_t>(plane) * h * w;
  const int hw = h * w;
  float s = 0.f;
  for (int i = 0; i < hw; ++i) s += p[i];
  y[plane] = s / static_cast<float>(hw);
}

inline void sce_row(const float* logits, int32_t label, int k, float* probs,
                    float* row_loss) {
  float m = logits[0];
  for (int j = 1; j < k; ++j)
    if (logits[j] > m) m = logits[j];
  float denom = 0.f;
  for (int j = 0; j < k; ++j) {
    probs[j] = std::exp(logits[j] - m);
    denom += probs[j];
  }
  for (int j = 0; j < k; ++j) probs[j] /= denom;
  *row_loss = std::log(denom) - (logits[label] - m);
}

}  // namespace mulab::kernels::inner
