#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gluco/tensor.hpp"

namespace gluco {

// Test hook: when enabled, the relu backward rule is deliberately scaled so
// finite-difference checks must flag it. Never enable outside of tests or the
// gradcheck CLI's negative control.
void set_backward_fault_injection(bool on);
bool backward_fault_injection();

struct CoordResult {
    std::size_t input_index = 0;
    std::size_t coord = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckResult {
    bool ok = true;
    double max_rel_err = 0.0;
    CoordResult worst;
    std::size_t coords_checked = 0;
};

// Compares reverse-mode gradients of a scalar-valued function against central
// differences. `fn` must rebuild its graph on every call and return a scalar.
//
// Each call evaluates fn once with gradients on to collect analytic values,
// then twice per probed coordinate with gradients off. `sample` limits how
// many coordinates of each input are probed (0 = all), chosen on an evenly
// spaced deterministic stride so every call probes the same coordinates.
GradCheckResult grad_check(const std::function<Tensor()>& fn, const std::vector<Tensor>& inputs,
                           double tol = 1e-4, double step = 1e-5, std::size_t sample = 0);

}  // namespace gluco
