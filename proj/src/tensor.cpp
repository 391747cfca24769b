#include "mulab/tensor.hpp"

namespace mulab {

int64_t shape_numel(std::span<const int> shape) {
  int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw DimensionError("tensor dimensions must be positive");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> s, std::vector<float> values)
    : shape(std::move(s)), v(std::move(values)) {
  if (shape_numel(shape) != static_cast<int64_t>(v.size()))
    throw DimensionError("tensor value count does not match shape");
}

Tensor Tensor::zeros(std::vector<int> s) {
  const int64_t n = shape_numel(s);
  Tensor t;
  t.shape = std::move(s);
  t.v.assign(static_cast<size_t>(n), 0.f);
  return t;
}

void Tensor::ensure_grad() {
  if (g.size() != v.size()) g.assign(v.size(), 0.f);
}

bool Tensor::all_finite() const {
  for (float x : v)
    if (!std::isfinite(x)) return false;
  for (float x : g)
    if (!std::isfinite(x)) return false;
  return true;
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape == b.shape; }

}  // namespace mulab
