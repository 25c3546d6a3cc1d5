#include "inrsep/adam.hpp"

#include <cmath>

namespace inrsep::ad {

Adam::Adam(AdamConfig cfg) : cfg_(cfg) {
  if (cfg_.lr < 0.0) throw std::invalid_argument("Adam: lr must be >= 0");
}

void Adam::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
  if (params.size() != grads.size()) throw ShapeError("Adam::step: param/grad count mismatch");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
      m_.push_back(Tensor::zeros(p->shape));
      v_.push_back(Tensor::zeros(p->shape));
    }
  }
  if (m_.size() != params.size()) throw ShapeError("Adam::step: parameter set changed");

  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t);

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& param = *params[p];
    const Tensor& grad = *grads[p];
    if (!param.same_shape(grad) || !param.same_shape(m_[p])) {
      throw ShapeError("Adam::step: shape mismatch");
    }
    for (std::size_t i = 0; i < param.numel(); ++i) {
      const double g = grad.v[i];
      m_[p].v[i] = cfg_.beta1 * m_[p].v[i] + (1.0 - cfg_.beta1) * g;
      v_[p].v[i] = cfg_.beta2 * v_[p].v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m_[p].v[i] / bc1;
      const double vhat = v_[p].v[i] / bc2;
      param.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace inrsep::ad
