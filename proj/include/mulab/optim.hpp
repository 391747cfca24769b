#pragma once

#include <cstdint>
#include <vector>

#include "mulab/tensor.hpp"

namespace mulab {

// SGD with momentum and weight decay. Velocity is lazily sized to the first
// parameter list and must see the same shapes every step.
class Sgd {
 public:
  Sgd(float lr, float momentum, float weight_decay)
      : lr_(lr), momentum_(momentum), wd_(weight_decay) {}

  // v <- momentum*v + g + weight_decay*w; w <- w - lr*v. Grads are cleared.
  // Any parameter without a grad -> usage error.
  void step(const std::vector<Tensor*>& params);

  // Where mask is 0: w <- origin and v <- 0, so masked-out parameters stay
  // bit-exactly at origin even with momentum active.
  void reset_unselected(const std::vector<Tensor*>& params,
                        const std::vector<std::vector<uint8_t>>& mask,
                        const std::vector<std::vector<float>>& origin);

  const std::vector<std::vector<float>>& velocity() const { return velocity_; }

 private:
  float lr_, momentum_, wd_;
  std::vector<std::vector<float>> velocity_;
};

}  // namespace mulab
