#ifndef WIRETAP_GRAD_CHECK_H_
#define WIRETAP_GRAD_CHECK_H_

#include <functional>
#include <span>
#include <string>

#include "wiretap/network.h"

namespace wiretap {

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t coordinates_checked = 0;
  double tolerance = 0.0;
  bool passed = true;
};

// Loss on a network output. Returns the loss and writes d(loss)/d(output).
using OutputLoss = std::function<double(const Tensor& output, Tensor& output_grad)>;

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Coordinates probed per parameter tensor (evenly strided); 0 = all.
  std::size_t max_per_entry = 0;
  // Denominator floor for |a - n| / max(|a|, |n|).
  double floor = 1e-7;
};

// Compares Network::Backward against central differences of `loss`.
GradCheckReport GradCheck(Network& net, const Tensor& input,
                          const OutputLoss& loss,
                          const GradCheckOptions& options = {});

// Same comparison for an arbitrary objective over several stores.
// `value` evaluates the objective at the current weights; `gradient`
// writes its analytic gradient into the stores' grad slots (zeroed first).
GradCheckReport GradCheckStores(std::span<ParamStore* const> stores,
                                const std::function<double()>& value,
                                const std::function<void()>& gradient,
                                const GradCheckOptions& options = {});

}  // namespace wiretap

#endif  // WIRETAP_GRAD_CHECK_H_
