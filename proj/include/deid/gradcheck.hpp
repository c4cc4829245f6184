#pragma once

#include <functional>
#include <vector>

#include "deid/autodiff.hpp"

namespace deid {

// Compares reverse-mode gradients against central finite differences.
// `build` must construct the scalar loss on the given tape from the current
// parameter values (it is re-run with perturbed values). Returns the maximum
// over all parameter coordinates of |analytic - numeric| / max(1e-8,
// |analytic| + |numeric|).
double finite_difference_check(
    const std::function<ag::Var(ag::Tape&)>& build,
    const std::vector<Parameter*>& params, double eps = 1e-5);

}  // namespace deid
