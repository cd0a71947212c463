#ifndef WIRETAP_APP_GRADCHECK_SUITE_H_
#define WIRETAP_APP_GRADCHECK_SUITE_H_

#include <string>
#include <vector>

#include "wiretap/grad_check.h"

namespace wiretap::app {

struct NamedCheck {
  std::string name;
  GradCheckReport report;
};

// Finite-difference checks of every activation's dense layer, the relaxed
// channel flip, the straight-through estimator contract and the full
// training loss (relaxed sampling). `corrupt` perturbs every backward pass
// so each network check must fail.
std::vector<NamedCheck> RunGradCheckSuite(bool corrupt = false, double tolerance = 1e-4);

}  // namespace wiretap::app

#endif  // WIRETAP_APP_GRADCHECK_SUITE_H_
