#include "wiretap/optimizer.h"

#include <cmath>

namespace wiretap {

void AdamStep(ParamStore& store, const AdamConfig& config) {
  for (const auto& [name, e] : store) {
    if (!e.grad.AllFinite()) {
      throw NumericError("non-finite gradient in parameter '" + name + "'");
    }
  }
  store.AdvanceStep();
  const double t = static_cast<double>(store.step_count());
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);

  for (auto& [_, e] : store) {
    auto w = e.weights.values();
    auto g = e.grad.values();
    auto m = e.first_moment.values();
    auto v = e.second_moment.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
      g[i] = 0.0;
    }
  }
}

}  // namespace wiretap
