// OpenMP backend. Parallel loops range only over independent output regions;
// each region's reduction runs serially inside the inner routine, so output
// bits match the serial backend for any thread count.

#include <vector>

#include "kernels_backends.hpp"
#include "kernels_inner.hpp"

namespace mulab::kernels::omp_backend {

using namespace mulab::kernels::inner;

void conv2d_forward(const float* x, const float* k, float* y, const Conv2dDims& d) {
#pragma omp parallel for collapse(3) schedule(static)
  for (int n = 0; n < d.n; ++n)
    for (int f = 0; f < d.f; ++f)
      for (int oh = 0; oh < d.oh; ++oh)
        conv2d_row(x, k, y + idx4(n, f, oh, 0, d.f, d.oh, d.ow), d, n, f, oh);
}

void conv2d_backward_input(const float* dy, const float* k, float* dx,
                           const Conv2dDims& d) {
#pragma omp parallel for collapse(3) schedule(static)
  for (int n = 0; n < d.n; ++n)
    for (int c = 0; c < d.c; ++c)
      for (int ih = 0; ih < d.h; ++ih)
        conv2d_dx_row(dy, k, dx + idx4(n, c, ih, 0, d.c, d.h, d.w), d, n, c, ih);
}

void conv2d_backward_kernel(const float* dy, const float* x, float* dk,
                            const Conv2dDims& d) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int f = 0; f < d.f; ++f)
    for (int c = 0; c < d.c; ++c)
      conv2d_dk_slice(dy, x, dk + idx4(f, c, 0, 0, d.c, d.kh, d.kw), d, f, c);
}

void dense_forward(const float* x, const float* w, const float* b, float* y,
                   int n, int in, int out) {
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s)
    dense_row(x + static_cast<int64_t>(s) * in, w, b,
              y + static_cast<int64_t>(s) * out, in, out);
}

void dense_backward(const float* dy, const float* x, const float* w, float* dx,
                    float* dw, float* db, int n, int in, int out) {
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s)
    dense_dx_row(dy + static_cast<int64_t>(s) * out, w,
                 dx + static_cast<int64_t>(s) * in, in, out);
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out; ++o)
    dense_dw_row(dy, x, dw + static_cast<int64_t>(o) * in, n, in, out, o);
#pragma omp parallel for schedule(static)
  for (int o = 0; o < out; ++o) {
    float acc = db[o];
    for (int s = 0; s < n; ++s) acc += dy[static_cast<int64_t>(s) * out + o];
    db[o] = acc;
  }
}

void relu_forward(const float* x, float* y, int64_t count) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < count; ++i) y[i] = x[i] > 0.f ? x[i] : 0.f;
}

void relu_backward(const float* x, const float* dy, float* dx, int64_t count) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < count; ++i)
    if (x[i] > 0.f) dx[i] += dy[i];
}

void add_forward(const float* a, const float* b, float* y, int64_t count) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < count; ++i) y[i] = a[i] + b[i];
}

void add_backward(const float* dy, float* da, float* db, int64_t count) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < count; ++i) {
    da[i] += dy[i];
    db[i] += dy[i];
  }
}

void maxpool2_forward(const float* x, float* y, int32_t* argmax, int n, int c,
                      int h, int w) {
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n * c; ++p) maxpool2_plane(x, y, argmax, n, c, h, w, p);
}

void maxpool2_backward(const float* dy, const int32_t* argmax, float* dx,
                       int n, int c, int h, int w) {
  const int oh = h / 2, ow = w / 2;
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n * c; ++p) {
    const int64_t obase = static_cast<int64_t>(p) * oh * ow;
    const int64_t ibase = static_cast<int64_t>(p) * h * w;
    for (int i = 0; i < oh * ow; ++i) dx[ibase + argmax[obase + i]] += dy[obase + i];
  }
}

void global_avg_pool_forward(const float* x, float* y, int n, int c, int h, int w) {
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n * c; ++p) gap_plane(x, y, h, w, p);
}

void global_avg_pool_backward(const float* dy, float* dx, int n, int c, int h,
                              int w) {
  const float inv = 1.f / static_cast<float>(h * w);
#pragma omp parallel for schedule(static)
  for (int p = 0; p < n * c; ++p) {
    const float g = dy[p] * inv;
    float* row = dx + static_cast<int64_t>(p) * h * w;
    for (int i = 0; i < h * w; ++i) row[i] += g;
  }
}

void softmax_cross_entropy_forward(const float* logits, const int32_t* labels,
                                   int n, int k, float* probs, float* loss) {
  std::vector<float> row(n);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s)
    sce_row(logits + static_cast<int64_t>(s) * k, labels[s], k,
            probs + static_cast<int64_t>(s) * k, &row[s]);
  // Mean stays serial so the sum order never depends on thread count.
  float total = 0.f;
  for (int s = 0; s < n; ++s) total += row[s];
  *loss = total / static_cast<float>(n);
}

void softmax_cross_entropy_backward(const float* probs, const int32_t* labels,
                                    int n, int k, float dloss, float* dlogits) {
  const float scale = dloss / static_cast<float>(n);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < n; ++s) {
    const float* p = probs + static_cast<int64_t>(s) * k;
    float* d = dlogits + static_cast<int64_t>(s) * k;
    for (int j = 0; j < k; ++j) d[j] += scale * (p[j] - (j == labels[s] ? 1.f : 0.f));
  }
}

}  // namespace mulab::kernels::omp_backend
