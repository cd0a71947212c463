#ifndef WIRETAP_OPTIMIZER_H_
#define WIRETAP_OPTIMIZER_H_

#include "wiretap/network.h"

namespace wiretap {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update over every entry of `store`, then zeroes
// the gradients. Throws NumericError (naming the entry) on a non-finite
// gradient before touching any weight.
void AdamStep(ParamStore& store, const AdamConfig& config);

}  // namespace wiretap

#endif  // WIRETAP_OPTIMIZER_H_
