#include "xmvae/optimizer.hpp"

#include <cmath>

namespace xmvae {

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    p->step_count += 1;
    const double t = static_cast<double>(p->step_count);
    const double m_corr = 1.0 - std::pow(cfg.beta1, t);
    const double v_corr = 1.0 - std::pow(cfg.beta2, t);
    double* value = p->value.data();
    double* grad = p->grad.data();
    double* m = p->m.data();
    double* v = p->v.data();
    const std::size_t n = p->value.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double g = grad[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i] / m_corr;
      const double v_hat = v[i] / v_corr;
      value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
      grad[i] = 0.0;
    }
  }
}

}  // namespace xmvae
