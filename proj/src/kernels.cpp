#include "mulab/kernels.hpp"

#include <cstdlib>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kernels_backends.hpp"
#include "mulab/errors.hpp"

namespace mulab::kernels {

namespace {

Backend default_backend() {
  const char* env = std::getenv("MULAB_BACKEND");
  if (env != nullptr) {
    const std::string s(env);
    if (s == "serial") return Backend::serial;
    if (s == "openmp") return Backend::openmp;
  }
  return Backend::openmp;
}

Backend& backend_state() {
  static Backend b = default_backend();
  return b;
}

}  // namespace

Backend active_backend() { return backend_state(); }

void set_backend(Backend b) { backend_state() = b; }

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Conv2dDims conv2d_dims(int n, int c, int h, int w, int f, int kc, int kh, int kw,
                       int stride, int pad) {
  auto fail = [&](const std::string& why) {
    std::ostringstream os;
    os << "conv2d: " << why << " (input [" << n << "," << c << "," << h << ","
       << w << "], kernel [" << f << "," << kc << "," << kh << "," << kw
       << "], stride " << stride << ", pad " << pad << ")";
    throw DimensionError(os.str());
  };
  if (n < 1 || c < 1 || h < 1 || w < 1) fail("input dims must be positive");
  if (f < 1 || kc < 1 || kh < 1 || kw < 1) fail("kernel dims must be positive");
  if (kc != c) fail("kernel channels must match input channels");
  if (stride < 1) fail("stride must be positive");
  if (pad < 0) fail("pad must be non-negative");
  const int eh = h + 2 * pad, ew = w + 2 * pad;
  if (kh > eh || kw > ew) fail("kernel larger than padded input");
  Conv2dDims d{n, c, h, w, f, kh, kw, stride, pad, 0, 0};
  d.oh = (eh - kh) / stride + 1;
  d.ow = (ew - kw) / stride + 1;
  return d;
}

#define MULAB_DISPATCH(fn, ...)                       \
  do {                                                \
    if (active_backend() == Backend::serial)          \
      serial_backend::fn(__VA_ARGS__);                \
    else                                              \
      omp_backend::fn(__VA_ARGS__);                   \
  } while (0)

void conv2d_forward(const float* x, const float* k, float* y, const Conv2dDims& d) {
  MULAB_DISPATCH(conv2d_forward, x, k, y, d);
}

void conv2d_backward_input(const float* dy, const float* k, float* dx,
                           const Conv2dDims& d) {
  MULAB_DISPATCH(conv2d_backward_input, dy, k, dx, d);
}

void conv2d_backward_kernel(const float* dy, const float* x, float* dk,
                            const Conv2dDims& d) {
  MULAB_DISPATCH(conv2d_backward_kernel, dy, x, dk, d);
}

void dense_forward(const float* x, const float* w, const float* b, float* y,
                   int n, int in, int out) {
  MULAB_DISPATCH(dense_forward, x, w, b, y, n, in, out);
}

void dense_backward(const float* dy, const float* x, const float* w, float* dx,
                    float* dw, float* db, int n, int in, int out) {
  MULAB_DISPATCH(dense_backward, dy, x, w, dx, dw, db, n, in, out);
}

void relu_forward(const float* x, float* y, int64_t count) {
  MULAB_DISPATCH(relu_forward, x, y, count);
}

void relu_backward(const float* x, const float* dy, float* dx, int64_t count) {
  MULAB_DISPATCH(relu_backward, x, dy, dx, count);
}

void add_forward(const float* a, const float* b, float* y, int64_t count) {
  MULAB_DISPATCH(add_forward, a, b, y, count);
}

void add_backward(const float* dy, float* da, float* db, int64_t count) {
  MULAB_DISPATCH(add_backward, dy, da, db, count);
}

void maxpool2_forward(const float* x, float* y, int32_t* argmax, int n, int c,
                      int h, int w) {
  MULAB_DISPATCH(maxpool2_forward, x, y, argmax, n, c, h, w);
}

void maxpool2_backward(const float* dy, const int32_t* argmax, float* dx, int n,
                       int c, int h, int w) {
  MULAB_DISPATCH(maxpool2_backward, dy, argmax, dx, n, c, h, w);
}

void global_avg_pool_forward(const float* x, float* y, int n, int c, int h, int w) {
  MULAB_DISPATCH(global_avg_pool_forward, x, y, n, c, h, w);
}

void global_avg_pool_backward(const float* dy, float* dx, int n, int c, int h,
                              int w) {
  MULAB_DISPATCH(global_avg_pool_backward, dy, dx, n, c, h, w);
}

void softmax_cross_entropy_forward(const float* logits, const int32_t* labels,
                                   int n, int k, float* probs, float* loss) {
  MULAB_DISPATCH(softmax_cross_entropy_forward, logits, labels, n, k, probs, loss);
}

void softmax_cross_entropy_backward(const float* probs, const int32_t* labels,
                                    int n, int k, float dloss, float* dlogits) {
  MULAB_DISPATCH(softmax_cross_entropy_backward, probs, labels, n, k, dloss,
                 dlogits);
}

#undef MULAB_DISPATCH

}  // namespace mulab::kernels
