#include "mulab/rng.hpp"

#include <cmath>

#include "mulab/errors.hpp"

namespace mulab::rng {

uint64_t mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t combine(uint64_t a, uint64_t b) { return mix(a ^ mix(b)); }

uint64_t hash_name(std::string_view name) {
  // FNV-1a 64.
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t stream_key(uint64_t seed, std::string_view name) {
  return combine(seed, hash_name(name));
}
uint64_t stream_key(uint64_t seed, std::string_view name, uint64_t a) {
  return combine(stream_key(seed, name), a);
}
uint64_t stream_key(uint64_t seed, std::string_view name, uint64_t a, uint64_t b) {
  return combine(stream_key(seed, name, a), b);
}

uint64_t Stream::next_u64() {
  state_ += 0x9e3779b97f4a7c15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Stream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Stream::next_below(uint64_t n) {
  if (n == 0) throw UsageError("next_below: n must be >= 1");
  if (n == 1) return 0;
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t r;
  do {
    r = next_u64();
  } while (r >= limit);
  return r % n;
}

int64_t Stream::next_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw UsageError("next_int: empty range");
  return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo) + 1));
}

double Stream::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double Stream::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_unit() - 1.0;
    v = 2.0 * next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Stream::next_gamma(double alpha) {
  if (!(alpha > 0.0)) throw UsageError("next_gamma: alpha must be > 0");
  if (alpha < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = next_gamma(alpha + 1.0);
    double u;
    do {
      u = next_unit();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / alpha);
  }
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_unit();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Stream::next_beta(double a, double b) {
  const double x = next_gamma(a);
  const double y = next_gamma(b);
  return x / (x + y);
}

std::vector<double> Stream::next_dirichlet(double alpha, int k) {
  if (k < 1) throw UsageError("next_dirichlet: k must be >= 1");
  std::vector<double> w(static_cast<size_t>(k));
  double total = 0.0;
  for (auto& x : w) {
    x = next_gamma(alpha);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace mulab::rng
