#pragma once

#include <cstdint>
#include <vector>

#include "inrsep/tensor.hpp"

namespace inrsep::ad {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Bias-corrected Adam. Moment buffers are allocated on the first step and
// keep the parameter shapes; the step counter increases by one per update.
class Adam {
 public:
  explicit Adam(AdamConfig cfg);

  void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);

  std::uint64_t step_count() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::uint64_t step_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace inrsep::ad
