#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "helpers.hpp"
#include "mulab/errors.hpp"
#include "mulab/kernels.hpp"
#include "mulab/rng.hpp"

using namespace mulab;
namespace K = mulab::kernels;
using rng::Stream;
using testutil::close;
using testutil::fill_uniform;

namespace {

struct BackendGuard {
  K::Backend saved;
  explicit BackendGuard(K::Backend b) : saved(K::active_backend()) {
    K::set_backend(b);
  }
  ~BackendGuard() { K::set_backend(saved); }
};

}  // namespace

TEST_CASE("conv2d_dims computes output size and validates") {
  const auto d = K::conv2d_dims(1, 3, 32, 32, 8, 3, 3, 3, 1, 1);
  CHECK(d.oh == 32);
  CHECK(d.ow == 32);
  const auto s2 = K::conv2d_dims(2, 1, 7, 7, 1, 1, 3, 3, 2, 0);
  CHECK(s2.oh == 3);
  CHECK(s2.ow == 3);
  CHECK_THROWS_AS(K::conv2d_dims(1, 3, 8, 8, 4, 2, 3, 3, 1, 1), DimensionError);
  CHECK_THROWS_AS(K::conv2d_dims(1, 1, 2, 2, 1, 1, 5, 5, 1, 0), DimensionError);
  CHECK_THROWS_AS(K::conv2d_dims(0, 1, 2, 2, 1, 1, 1, 1, 1, 0), DimensionError);
  CHECK_THROWS_AS(K::conv2d_dims(1, 1, 2, 2, 1, 1, 1, 1, 0, 0), DimensionError);
  CHECK_THROWS_AS(K::conv2d_dims(1, 1, 2, 2, 1, 1, 1, 1, 1, -1), DimensionError);
}

TEST_CASE("conv2d identity kernel reproduces the input") {
  const auto d = K::conv2d_dims(1, 1, 3, 3, 1, 1, 1, 1, 1, 0);
  const std::vector<float> x(9, 1.f), k{1.f};
  std::vector<float> y(9, -1.f);
  K::conv2d_forward(x.data(), k.data(), y.data(), d);
  for (float v : y) CHECK(v == 1.f);
}

TEST_CASE("conv2d all-zero kernel annihilates any input") {
  const auto d = K::conv2d_dims(2, 3, 5, 4, 2, 3, 3, 3, 1, 1);
  std::vector<float> x(2 * 3 * 5 * 4);
  Stream s(21);
  fill_uniform(x, s);
  const std::vector<float> k(2 * 3 * 3 * 3, 0.f);
  std::vector<float> y(static_cast<size_t>(d.n) * d.f * d.oh * d.ow, 9.f);
  K::conv2d_forward(x.data(), k.data(), y.data(), d);
  for (float v : y) CHECK(v == 0.f);
}

TEST_CASE("conv2d 2x2 ones kernel matches explicit four-term sums") {
  const auto d = K::conv2d_dims(1, 1, 3, 3, 1, 1, 2, 2, 1, 0);
  const std::vector<float> x{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const std::vector<float> k(4, 1.f);
  std::vector<float> y(4);
  K::conv2d_forward(x.data(), k.data(), y.data(), d);
  CHECK(y[0] == 1 + 2 + 4 + 5);
  CHECK(y[1] == 2 + 3 + 5 + 6);
  CHECK(y[2] == 4 + 5 + 7 + 8);
  CHECK(y[3] == 5 + 6 + 8 + 9);
}

TEST_CASE("conv2d forward matches the double-precision oracle") {
  struct Case {
    int n, c, h, w, f, kh, kw, stride, pad;
  };
  const Case cases[] = {
      {2, 3, 8, 8, 4, 3, 3, 1, 1}, {1, 1, 5, 7, 2, 3, 3, 1, 0},
      {3, 2, 6, 6, 3, 1, 1, 1, 0}, {1, 4, 9, 9, 2, 3, 3, 2, 1},
      {2, 2, 7, 5, 3, 2, 4, 1, 2}, {1, 3, 12, 12, 5, 5, 5, 2, 2},
  };
  int idx = 0;
  for (const auto& tc : cases) {
    const auto d = K::conv2d_dims(tc.n, tc.c, tc.h, tc.w, tc.f, tc.c, tc.kh,
                                  tc.kw, tc.stride, tc.pad);
    std::vector<float> x(static_cast<size_t>(d.n) * d.c * d.h * d.w);
    std::vector<float> k(static_cast<size_t>(d.f) * d.c * d.kh * d.kw);
    Stream s(rng::stream_key(77, "conv-oracle", static_cast<uint64_t>(idx++)));
    fill_uniform(x, s);
    fill_uniform(k, s);
    std::vector<float> y(static_cast<size_t>(d.n) * d.f * d.oh * d.ow);
    K::conv2d_forward(x.data(), k.data(), y.data(), d);
    const auto want = testutil::ref_conv2d(x, k, d);
    for (size_t i = 0; i < y.size(); ++i)
      REQUIRE(close(y[i], want[i], 1e-5, 1e-6));
  }
}

TEST_CASE("dense forward matches the double-precision oracle") {
  const int n = 4, in = 37, out = 9;
  std::vector<float> x(static_cast<size_t>(n) * in), w(static_cast<size_t>(out) * in), b(out);
  Stream s(rng::stream_key(78, "dense-oracle"));
  fill_uniform(x, s);
  fill_uniform(w, s);
  fill_uniform(b, s);
  std::vector<float> y(static_cast<size_t>(n) * out);
  K::dense_forward(x.data(), w.data(), b.data(), y.data(), n, in, out);
  const auto want = testutil::ref_dense(x, w, b, n, in, out);
  for (size_t i = 0; i < y.size(); ++i) REQUIRE(close(y[i], want[i], 1e-5, 1e-6));
}

TEST_CASE("relu clamps negatives and gates gradients") {
  const std::vector<float> x{-2.f, -0.f, 0.5f, 3.f};
  std::vector<float> y(4);
  K::relu_forward(x.data(), y.data(), 4);
  CHECK(y[0] == 0.f);
  CHECK(y[1] == 0.f);
  CHECK(y[2] == 0.5f);
  CHECK(y[3] == 3.f);

  const std::vector<float> dy{1.f, 1.f, 1.f, 1.f};
  std::vector<float> dx(4, 0.f);
  K::relu_backward(x.data(), dy.data(), dx.data(), 4);
  CHECK(dx[0] == 0.f);
  CHECK(dx[1] == 0.f);
  CHECK(dx[2] == 1.f);
  CHECK(dx[3] == 1.f);
}

TEST_CASE("add forward sums, backward fans the gradient out") {
  const std::vector<float> a{1.f, 2.f}, b{10.f, 20.f};
  std::vector<float> y(2);
  K::add_forward(a.data(), b.data(), y.data(), 2);
  CHECK(y[0] == 11.f);
  CHECK(y[1] == 22.f);

  const std::vector<float> dy{0.5f, 0.25f};
  std::vector<float> da(2, 1.f), db(2, 0.f);
  K::add_backward(dy.data(), da.data(), db.data(), 2);
  CHECK(da[0] == 1.5f);
  CHECK(db[1] == 0.25f);
}

TEST_CASE("maxpool2 picks maxima with first-scan tie-breaking") {
  // One 4x4 plane; the top-left window ties at 5 (positions (0,1) and (1,0)).
  const std::vector<float> x{
      1, 5, 2, 2,
      5, 0, 2, 2,
      3, 1, 9, 8,
      0, 2, 7, 6,
  };
  std::vector<float> y(4);
  std::vector<int32_t> arg(4);
  K::maxpool2_forward(x.data(), y.data(), arg.data(), 1, 1, 4, 4);
  CHECK(y[0] == 5.f);
  CHECK(arg[0] == 1);  // (0,1) precedes (1,0) in (kh,kw) scan order
  CHECK(y[1] == 2.f);
  CHECK(arg[1] == 2);
  CHECK(y[2] == 3.f);
  CHECK(y[3] == 9.f);
  CHECK(arg[3] == 10);

  std::vector<float> dx(16, 0.f);
  const std::vector<float> dy{1.f, 2.f, 3.f, 4.f};
  K::maxpool2_backward(dy.data(), arg.data(), dx.data(), 1, 1, 4, 4);
  CHECK(dx[1] == 1.f);
  CHECK(dx[2] == 2.f);
  CHECK(dx[8] == 3.f);
  CHECK(dx[10] == 4.f);
  float total = 0.f;
  for (float v : dx) total += v;
  CHECK(total == 10.f);
}

TEST_CASE("maxpool2 floors odd spatial dims") {
  const std::vector<float> x{1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<float> y(1);
  std::vector<int32_t> arg(1);
  K::maxpool2_forward(x.data(), y.data(), arg.data(), 1, 1, 3, 3);
  CHECK(y[0] == 5.f);
  CHECK(arg[0] == 4);
}

TEST_CASE("global average pool averages planes and spreads gradient") {
  const std::vector<float> x{1, 2, 3, 4, 10, 20, 30, 40};
  std::vector<float> y(2);
  K::global_avg_pool_forward(x.data(), y.data(), 1, 2, 2, 2);
  CHECK(y[0] == doctest::Approx(2.5));
  CHECK(y[1] == doctest::Approx(25.0));

  const std::vector<float> dy{4.f, 8.f};
  std::vector<float> dx(8, 0.f);
  K::global_avg_pool_backward(dy.data(), dx.data(), 1, 2, 2, 2);
  for (int i = 0; i < 4; ++i) CHECK(dx[i] == 1.f);
  for (int i = 4; i < 8; ++i) CHECK(dx[i] == 2.f);
}

TEST_CASE("softmax cross-entropy known values") {
  SUBCASE("uniform logits give ln(K)") {
    const int n = 1, k = 10;
    const std::vector<float> logits(10, 3.f);
    const std::vector<int32_t> labels{7};
    std::vector<float> probs(10);
    float loss = 0.f;
    K::softmax_cross_entropy_forward(logits.data(), labels.data(), n, k,
                                     probs.data(), &loss);
    CHECK(loss == doctest::Approx(2.302585092994046).epsilon(1e-6));
    for (float p : probs) CHECK(p == doctest::Approx(0.1).epsilon(1e-6));
  }
  SUBCASE("saturated correct logit gives ~0 loss") {
    const std::vector<float> logits{1000.f, 0.f, 0.f};
    const std::vector<int32_t> labels{0};
    std::vector<float> probs(3);
    float loss = -1.f;
    K::softmax_cross_entropy_forward(logits.data(), labels.data(), 1, 3,
                                     probs.data(), &loss);
    CHECK(loss == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(std::isfinite(loss));
  }
  SUBCASE("hand-expanded two-class case") {
    const std::vector<float> logits{1.f, 2.f};
    const std::vector<int32_t> labels{0};
    std::vector<float> probs(2);
    float loss = 0.f;
    K::softmax_cross_entropy_forward(logits.data(), labels.data(), 1, 2,
                                     probs.data(), &loss);
    CHECK(loss == doctest::Approx(1.3132616875182228).epsilon(1e-6));
  }
}

TEST_CASE("softmax cross-entropy matches oracle and gradient formula") {
  const int n = 5, k = 7;
  std::vector<float> logits(static_cast<size_t>(n) * k);
  Stream s(rng::stream_key(79, "sce-oracle"));
  fill_uniform(logits, s, -4.0, 4.0);
  std::vector<int32_t> labels(n);
  for (auto& l : labels) l = static_cast<int32_t>(s.next_below(k));

  std::vector<float> probs(static_cast<size_t>(n) * k);
  float loss = 0.f;
  K::softmax_cross_entropy_forward(logits.data(), labels.data(), n, k,
                                   probs.data(), &loss);
  CHECK(close(loss, testutil::ref_sce(logits, labels, n, k), 1e-5, 1e-7));

  std::vector<float> dlogits(static_cast<size_t>(n) * k, 0.f);
  K::softmax_cross_entropy_backward(probs.data(), labels.data(), n, k, 1.f,
                                    dlogits.data());
  for (int ss = 0; ss < n; ++ss) {
    float row = 0.f;
    for (int j = 0; j < k; ++j) {
      const float want =
          (probs[ss * k + j] - (j == labels[ss] ? 1.f : 0.f)) / n;
      CHECK(dlogits[ss * k + j] == doctest::Approx(want).epsilon(1e-6));
      row += dlogits[ss * k + j];
    }
    CHECK(std::abs(row) < 1e-6);  // softmax gradient rows sum to zero
  }
}

TEST_CASE("serial and openmp backends are bit-identical") {
  struct Case {
    int n, c, h, w, f, kh, kw, stride, pad;
  };
  const Case cases[] = {
      {2, 3, 8, 8, 4, 3, 3, 1, 1},
      {1, 4, 9, 9, 2, 3, 3, 2, 1},
      {3, 2, 6, 6, 3, 1, 1, 1, 0},
      {2, 2, 12, 10, 3, 5, 3, 1, 2},
  };
  int idx = 0;
  for (const auto& tc : cases) {
    const auto d = K::conv2d_dims(tc.n, tc.c, tc.h, tc.w, tc.f, tc.c, tc.kh,
                                  tc.kw, tc.stride, tc.pad);
    const size_t xs = static_cast<size_t>(d.n) * d.c * d.h * d.w;
    const size_t ks = static_cast<size_t>(d.f) * d.c * d.kh * d.kw;
    const size_t ys = static_cast<size_t>(d.n) * d.f * d.oh * d.ow;
    std::vector<float> x(xs), k(ks), dy(ys);
    Stream s(rng::stream_key(80, "parity", static_cast<uint64_t>(idx++)));
    fill_uniform(x, s);
    fill_uniform(k, s);
    fill_uniform(dy, s);

    auto run = [&](K::Backend backend) {
      BackendGuard guard(backend);
      std::vector<float> y(ys), dx(xs, 0.f), dk(ks, 0.f);
      K::conv2d_forward(x.data(), k.data(), y.data(), d);
      K::conv2d_backward_input(dy.data(), k.data(), dx.data(), d);
      K::conv2d_backward_kernel(dy.data(), x.data(), dk.data(), d);
      return std::tuple{y, dx, dk};
    };
    CHECK(run(K::Backend::serial) == run(K::Backend::openmp));
  }

  // Dense, pooling, elementwise, and loss kernels.
  const int n = 3, in = 33, out = 11;
  std::vector<float> x(static_cast<size_t>(n) * in), w(static_cast<size_t>(out) * in),
      b(out), dy(static_cast<size_t>(n) * out);
  Stream s(rng::stream_key(80, "parity-dense"));
  fill_uniform(x, s);
  fill_uniform(w, s);
  fill_uniform(b, s);
  fill_uniform(dy, s);
  auto run_dense = [&](K::Backend backend) {
    BackendGuard guard(backend);
    std::vector<float> y(static_cast<size_t>(n) * out);
    std::vector<float> dx(x.size(), 0.f), dw(w.size(), 0.f), db(b.size(), 0.f);
    K::dense_forward(x.data(), w.data(), b.data(), y.data(), n, in, out);
    K::dense_backward(dy.data(), x.data(), w.data(), dx.data(), dw.data(),
                      db.data(), n, in, out);
    return std::tuple{y, dx, dw, db};
  };
  CHECK(run_dense(K::Backend::serial) == run_dense(K::Backend::openmp));

  std::vector<float> img(2 * 3 * 8 * 8);
  fill_uniform(img, s);
  auto run_pool = [&](K::Backend backend) {
    BackendGuard guard(backend);
    std::vector<float> y(2 * 3 * 4 * 4), dx(img.size(), 0.f);
    std::vector<int32_t> arg(2 * 3 * 4 * 4);
    std::vector<float> gy(y.size(), 1.f);
    K::maxpool2_forward(img.data(), y.data(), arg.data(), 2, 3, 8, 8);
    K::maxpool2_backward(gy.data(), arg.data(), dx.data(), 2, 3, 8, 8);
    std::vector<float> gap(2 * 3), gdx(img.size(), 0.f);
    K::global_avg_pool_forward(img.data(), gap.data(), 2, 3, 8, 8);
    K::global_avg_pool_backward(gap.data(), gdx.data(), 2, 3, 8, 8);
    std::vector<float> r(img.size()), rdx(img.size(), 0.f);
    K::relu_forward(img.data(), r.data(), static_cast<int64_t>(img.size()));
    K::relu_backward(img.data(), r.data(), rdx.data(),
                     static_cast<int64_t>(img.size()));
    return std::tuple{y, arg, dx, gap, gdx, r, rdx};
  };
  CHECK(run_pool(K::Backend::serial) == run_pool(K::Backend::openmp));

  const int kn = 6, kk = 5;
  std::vector<float> logits(static_cast<size_t>(kn) * kk);
  fill_uniform(logits, s, -3.0, 3.0);
  std::vector<int32_t> labels(kn);
  for (auto& l : labels) l = static_cast<int32_t>(s.next_below(kk));
  auto run_sce = [&](K::Backend backend) {
    BackendGuard guard(backend);
    std::vector<float> probs(logits.size()), dlog(logits.size(), 0.f);
    float loss = 0.f;
    K::softmax_cross_entropy_forward(logits.data(), labels.data(), kn, kk,
                                     probs.data(), &loss);
    K::softmax_cross_entropy_backward(probs.data(), labels.data(), kn, kk, 1.f,
                                      dlog.data());
    return std::tuple{probs, loss, dlog};
  };
  CHECK(run_sce(K::Backend::serial) == run_sce(K::Backend::openmp));
}

TEST_CASE("conv2d backward gradients match finite differences of the kernel") {
  // Scalar objective: sum(conv(x, k)); check d/dx and d/dk elementwise.
  const auto d = K::conv2d_dims(1, 2, 5, 5, 2, 2, 3, 3, 1, 1);
  const size_t xs = static_cast<size_t>(d.n) * d.c * d.h * d.w;
  const size_t ks = static_cast<size_t>(d.f) * d.c * d.kh * d.kw;
  const size_t ys = static_cast<size_t>(d.n) * d.f * d.oh * d.ow;
  std::vector<float> x(xs), k(ks);
  Stream s(rng::stream_key(81, "conv-fd"));
  fill_uniform(x, s);
  fill_uniform(k, s);

  auto objective = [&](const std::vector<float>& xv, const std::vector<float>& kv) {
    const auto y = testutil::ref_conv2d(xv, kv, d);
    double total = 0.0;
    for (double v : y) total += v;
    return total;
  };

  const std::vector<float> dy(ys, 1.f);
  std::vector<float> dx(xs, 0.f), dk(ks, 0.f);
  K::conv2d_backward_input(dy.data(), k.data(), dx.data(), d);
  K::conv2d_backward_kernel(dy.data(), x.data(), dk.data(), d);

  const float eps = 1e-3f;
  for (size_t i = 0; i < xs; i += 7) {
    auto xp = x, xm = x;
    xp[i] += eps;
    xm[i] -= eps;
    const double fd = (objective(xp, k) - objective(xm, k)) / (2.0 * eps);
    REQUIRE(close(dx[i], fd, 1e-3, 1e-4));
  }
  for (size_t i = 0; i < ks; ++i) {
    auto kp = k, km = k;
    kp[i] += eps;
    km[i] -= eps;
    const double fd = (objective(x, kp) - objective(x, km)) / (2.0 * eps);
    REQUIRE(close(dk[i], fd, 1e-3, 1e-4));
  }
}
