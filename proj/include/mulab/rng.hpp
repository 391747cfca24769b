#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mulab::rng {

// splitmix64 finalizer; also used to combine keys.
uint64_t mix(uint64_t x);
uint64_t combine(uint64_t a, uint64_t b);
uint64_t hash_name(std::string_view name);

// Derives the key of a named stream. Streams for different purposes (init,
// shuffle, augment, forget, relabel, mia) must never share a key, so every
// call site passes its own name plus whatever indices scope the draw.
uint64_t stream_key(uint64_t seed, std::string_view name);
uint64_t stream_key(uint64_t seed, std::string_view name, uint64_t a);
uint64_t stream_key(uint64_t seed, std::string_view name, uint64_t a, uint64_t b);

// Deterministic sequential generator over a derived key (splitmix64 state).
class Stream {
 public:
  explicit Stream(uint64_t key) : state_(key) {}

  uint64_t next_u64();
  // Uniform in [0,1) with 53 random bits.
  double next_unit();
  // Uniform integer in [0, n), n >= 1. Rejection sampling, no modulo bias.
  uint64_t next_below(uint64_t n);
  // Uniform integer in [lo, hi] inclusive.
  int64_t next_int(int64_t lo, int64_t hi);
  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi);
  // Standard normal via Box-Muller with a cached spare.
  double next_gaussian();
  // Gamma(alpha, 1), alpha > 0. Marsaglia-Tsang, with the standard boost
  // for alpha < 1.
  double next_gamma(double alpha);
  // Beta(a, b) from two gammas.
  double next_beta(double a, double b);
  // Dirichlet(alpha, ..., alpha) over k components; sums to 1.
  std::vector<double> next_dirichlet(double alpha, int k);
  // Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mulab::rng
