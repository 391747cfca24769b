#pragma once

#include <cstdint>

namespace mulab::kernels {

// Serial and OpenMP backends run identical per-element arithmetic in identical
// order; parallelism is only ever across independent output elements, so the
// two backends are bit-identical and results do not depend on thread count.
enum class Backend { serial, openmp };

Backend active_backend();
void set_backend(Backend b);
bool openmp_compiled();
int thread_count();

struct Conv2dDims {
  int n, c, h, w;    // input  [N,C,H,W]
  int f, kh, kw;     // kernel [F,C,KH,KW]
  int stride, pad;
  int oh, ow;        // output [N,F,OH,OW]
};

// Validates shapes and fills oh/ow. Throws DimensionError on mismatch.
Conv2dDims conv2d_dims(int n, int c, int h, int w, int f, int kc, int kh, int kw,
                       int stride, int pad);

// Every backward kernel accumulates into its gradient outputs (+=); callers
// zero them first. Accumulation lets one buffer collect from several consumers.
void conv2d_forward(const float* x, const float* k, float* y, const Conv2dDims& d);
void conv2d_backward_input(const float* dy, const float* k, float* dx, const Conv2dDims& d);
void conv2d_backward_kernel(const float* dy, const float* x, float* dk, const Conv2dDims& d);

// y[n,o] = b[o] + dot(x[n,:], w[o,:])   x:[N,IN] w:[OUT,IN] b:[OUT]
void dense_forward(const float* x, const float* w, const float* b, float* y,
                   int n, int in, int out);
void dense_backward(const float* dy, const float* x, const float* w,
                    float* dx, float* dw, float* db, int n, int in, int out);

void relu_forward(const float* x, float* y, int64_t count);
void relu_backward(const float* x, const float* dy, float* dx, int64_t count);

void add_forward(const float* a, const float* b, float* y, int64_t count);
void add_backward(const float* dy, float* da, float* db, int64_t count);

// 2x2 max pooling, stride 2, floor semantics; ties take the first element in
// (kh, kw) scan order. argmax stores flat input offsets for the backward pass.
void maxpool2_forward(const float* x, float* y, int32_t* argmax,
                      int n, int c, int h, int w);
void maxpool2_backward(const float* dy, const int32_t* argmax, float* dx,
                       int n, int c, int h, int w);

// [N,C,H,W] -> [N,C]
void global_avg_pool_forward(const float* x, float* y, int n, int c, int h, int w);
void global_avg_pool_backward(const float* dy, float* dx, int n, int c, int h, int w);

// Stabilized softmax cross-entropy, mean over the batch. probs is an [N,K]
// scratch buffer the backward pass reuses.
void softmax_cross_entropy_forward(const float* logits, const int32_t* labels,
                                   int n, int k, float* probs, float* loss);
void softmax_cross_entropy_backward(const float* probs, const int32_t* labels,
                                    int n, int k, float dloss, float* dlogits);

}  // namespace mulab::kernels
