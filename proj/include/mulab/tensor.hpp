#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mulab/errors.hpp"

namespace mulab {

int64_t shape_numel(std::span<const int> shape);

// Dense row-major float tensor with an optional gradient buffer.
// Invariants: numel(shape) == v.size(); g is empty or the same size as v.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> v;
  std::vector<float> g;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<float> values);

  static Tensor zeros(std::vector<int> s);

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }

  bool has_grad() const { return !g.empty(); }
  void ensure_grad();
  void clear_grad() { g.clear(); }

  bool all_finite() const;
};

bool same_shape(const Tensor& a, const Tensor& b);

}  // namespace mulab
