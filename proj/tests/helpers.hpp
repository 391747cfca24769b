#pragma once

// Shared test utilities: random fills and independent double-precision
// reference implementations used as oracles against the float kernels.

#include <cmath>
#include <cstdint>
#include <vector>

#include "mulab/kernels.hpp"
#include "mulab/rng.hpp"

namespace testutil {

inline void fill_uniform(std::vector<float>& v, mulab::rng::Stream& s,
                         double lo = -1.0, double hi = 1.0) {
  for (auto& x : v) x = static_cast<float>(s.next_uniform(lo, hi));
}

inline bool close(double got, double want, double rtol = 1e-4,
                  double atol = 1e-6) {
  return std::abs(got - want) <= atol + rtol * std::abs(want);
}

inline double ref_at(const std::vector<float>& v, int64_t i) {
  return static_cast<double>(v[static_cast<size_t>(i)]);
}

// Direct cross-correlation in double precision, naive loop order.
inline std::vector<double> ref_conv2d(const std::vector<float>& x,
                                      const std::vector<float>& k,
                                      const mulab::kernels::Conv2dDims& d) {
  std::vector<double> y(static_cast<size_t>(d.n) * d.f * d.oh * d.ow, 0.0);
  for (int n = 0; n < d.n; ++n)
    for (int f = 0; f < d.f; ++f)
      for (int oh = 0; oh < d.oh; ++oh)
        for (int ow = 0; ow < d.ow; ++ow) {
          double acc = 0.0;
          for (int c = 0; c < d.c; ++c)
            for (int kh = 0; kh < d.kh; ++kh)
              for (int kw = 0; kw < d.kw; ++kw) {
                const int ih = oh * d.stride + kh - d.pad;
                const int iw = ow * d.stride + kw - d.pad;
                if (ih < 0 || ih >= d.h || iw < 0 || iw >= d.w) continue;
                acc += ref_at(x, ((static_cast<int64_t>(n) * d.c + c) * d.h + ih) * d.w + iw) *
                       ref_at(k, ((static_cast<int64_t>(f) * d.c + c) * d.kh + kh) * d.kw + kw);
              }
          y[((static_cast<int64_t>(n) * d.f + f) * d.oh + oh) * d.ow + ow] = acc;
        }
  return y;
}

inline std::vector<double> ref_dense(const std::vector<float>& x,
                                     const std::vector<float>& w,
                                     const std::vector<float>& b, int n, int in,
                                     int out) {
  std::vector<double> y(static_cast<size_t>(n) * out, 0.0);
  for (int s = 0; s < n; ++s)
    for (int o = 0; o < out; ++o) {
      double acc = ref_at(b, o);
      for (int i = 0; i < in; ++i)
        acc += ref_at(x, static_cast<int64_t>(s) * in + i) *
               ref_at(w, static_cast<int64_t>(o) * in + i);
      y[static_cast<int64_t>(s) * out + o] = acc;
    }
  return y;
}

// Mean softmax cross-entropy in double precision.
inline double ref_sce(const std::vector<float>& logits,
                      const std::vector<int32_t>& labels, int n, int k) {
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    const float* row = logits.data() + static_cast<int64_t>(s) * k;
    double m = row[0];
    for (int j = 1; j < k; ++j) m = std::max(m, static_cast<double>(row[j]));
    double denom = 0.0;
    for (int j = 0; j < k; ++j) denom += std::exp(static_cast<double>(row[j]) - m);
    total += std::log(denom) - (static_cast<double>(row[labels[static_cast<size_t>(s)]]) - m);
  }
  return total / n;
}

}  // namespace testutil
