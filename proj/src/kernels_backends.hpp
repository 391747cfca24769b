#pragma once

// Internal declarations for the two kernel backends. Both implement the same
// signatures; dispatch.cpp picks one at runtime.

#include "mulab/kernels.hpp"

namespace mulab::kernels {

#define MULAB_DECLARE_BACKEND(ns)                                              \
  namespace ns {                                                               \
  void conv2d_forward(const float* x, const float* k, float* y,                \
                      const Conv2dDims& d);                                    \
  void conv2d_backward_input(const float* dy, const float* k, float* dx,       \
                             const Conv2dDims& d);                             \
  void conv2d_backward_kernel(const float* dy, const float* x, float* dk,      \
                              const Conv2dDims& d);                            \
  void dense_forward(const float* x, const float* w, const float* b, float* y, \
                     int n, int in, int out);                                  \
  void dense_backward(const float* dy, const float* x, const float* w,         \
                      float* dx, float* dw, float* db, int n, int in,          \
                      int out);                                                \
  void relu_forward(const float* x, float* y, int64_t count);                  \
  void relu_backward(const float* x, const float* dy, float* dx,               \
                     int64_t count);                                           \
  void add_forward(const float* a, const float* b, float* y, int64_t count);   \
  void add_backward(const float* dy, float* da, float* db, int64_t count);     \
  void maxpool2_forward(const float* x, float* y, int32_t* argmax, int n,      \
                        int c, int h, int w);                                  \
  void maxpool2_backward(const float* dy, const int32_t* argmax, float* dx,    \
                         int n, int c, int h, int w);                          \
  void global_avg_pool_forward(const float* x, float* y, int n, int c, int h,  \
                               int w);                                         \
  void global_avg_pool_backward(const float* dy, float* dx, int n, int c,      \
                                int h, int w);                                 \
  void softmax_cross_entropy_forward(const float* logits,                      \
                                     const int32_t* labels, int n, int k,      \
                                     float* probs, float* loss);               \
  void softmax_cross_entropy_backward(const float* probs,                      \
                                      const int32_t* labels, int n, int k,     \
                                      float dloss, float* dlogits);            \
  }

MULAB_DECLARE_BACKEND(serial_backend)
MULAB_DECLARE_BACKEND(omp_backend)

#undef MULAB_DECLARE_BACKEND

}  // namespace mulab::kernels
