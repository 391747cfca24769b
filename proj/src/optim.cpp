#include "mulab/optim.hpp"

#include "mulab/errors.hpp"

namespace mulab {

void Sgd::step(const std::vector<Tensor*>& params) {
  if (velocity_.empty()) {
    velocity_.resize(params.size());
    for (size_t p = 0; p < params.size(); ++p)
      velocity_[p].assign(params[p]->v.size(), 0.f);
  }
  if (velocity_.size() != params.size())
    throw UsageError("sgd: parameter list size changed between steps");

  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    if (!t.has_grad()) throw UsageError("sgd: parameter has no grad");
    auto& v = velocity_[p];
    if (v.size() != t.v.size())
      throw UsageError("sgd: parameter shape changed between steps");
    for (size_t i = 0; i < t.v.size(); ++i) {
      v[i] = momentum_ * v[i] + t.g[i] + wd_ * t.v[i];
      t.v[i] -= lr_ * v[i];
    }
    t.clear_grad();
  }
}

void Sgd::reset_unselected(const std::vector<Tensor*>& params,
                           const std::vector<std::vector<uint8_t>>& mask,
                           const std::vector<std::vector<float>>& origin) {
  if (mask.size() != params.size() || origin.size() != params.size())
    throw UsageError("sgd: mask/origin list does not match parameters");
  if (velocity_.empty()) {
    velocity_.resize(params.size());
    for (size_t p = 0; p < params.size(); ++p)
      velocity_[p].assign(params[p]->v.size(), 0.f);
  }
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    if (mask[p].size() != t.v.size() || origin[p].size() != t.v.size())
      throw UsageError("sgd: mask/origin shape does not match parameter");
    for (size_t i = 0; i < t.v.size(); ++i) {
      if (mask[p][i] == 0) {
        t.v[i] = origin[p][i];
        velocity_[p][i] = 0.f;
      }
    }
  }
}

}  // namespace mulab
