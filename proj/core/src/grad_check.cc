#include "wiretap/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wiretap {

GradCheckReport GradCheckStores(std::span<ParamStore* const> stores,
                                const std::function<double()>& value,
                                const std::function<void()>& gradient,
                                const GradCheckOptions& options) {
  for (ParamStore* s : stores) s->ZeroGrad();
  gradient();

  std::vector<std::pair<std::string, Tensor>> analytic;
  for (ParamStore* s : stores) {
    for (auto& [name, e] : *s) analytic.emplace_back(name, e.grad);
  }

  GradCheckReport report;
  report.tolerance = options.tolerance;
  std::size_t k = 0;
  for (ParamStore* s : stores) {
    for (auto& [name, e] : *s) {
      const Tensor& a = analytic[k++].second;
      auto w = e.weights.values();
      const std::size_t n = w.size();
      const std::size_t stride =
          options.max_per_entry == 0 || n <= options.max_per_entry
              ? 1
              : n / options.max_per_entry;
      for (std::size_t i = 0; i < n; i += stride) {
        const double saved = w[i];
        w[i] = saved + options.step;
        const double up = value();
        w[i] = saved - options.step;
        const double down = value();
        w[i] = saved;
        const double numeric = (up - down) / (2.0 * options.step);
        const double denom =
            std::max({std::abs(a[i]), std::abs(numeric), options.floor});
        const double rel = std::abs(a[i] - numeric) / denom;
        ++report.coordinates_checked;
        if (rel > report.max_relative_error || !std::isfinite(rel)) {
          report.max_relative_error = rel;
          report.worst_parameter = name + "[" + std::to_string(i) + "]";
        }
      }
    }
  }
  for (ParamStore* s : stores) s->ZeroGrad();
  report.passed = std::isfinite(report.max_relative_error) &&
                  report.max_relative_error < options.tolerance;
  return report;
}

GradCheckReport GradCheck(Network& net, const Tensor& input,
                          const OutputLoss& loss,
                          const GradCheckOptions& options) {
  auto value = [&] {
    Tensor out = net.Forward(input, false);
    Tensor g(out.shape());
    return loss(out, g);
  };
  auto gradient = [&] {
    Tensor out = net.Forward(input, true);
    Tensor g(out.shape());
    loss(out, g);
    net.Backward(g);
  };
  ParamStore* stores[] = {&net.params()};
  return GradCheckStores(stores, value, gradient, options);
}

}  // namespace wiretap
