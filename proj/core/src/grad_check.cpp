#include "gluco/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace gluco {

namespace {
bool g_fault_injection = false;
}

void set_backward_fault_injection(bool on) { g_fault_injection = on; }
bool backward_fault_injection() { return g_fault_injection; }

GradCheckResult grad_check(const std::function<Tensor()>& fn, const std::vector<Tensor>& inputs,
                           double tol, double step, std::size_t sample) {
    for (const Tensor& t : inputs) {
        t.impl()->requires_grad = true;
        t.impl()->grad.assign(t.size(), 0.0);
    }

    Tensor loss = fn();
    if (loss.size() != 1) {
        throw ContractError("grad_check: function must return a scalar, got " + shape_str(loss.shape()));
    }
    loss.backward();

    std::vector<std::vector<double>> analytic;
    analytic.reserve(inputs.size());
    for (const Tensor& t : inputs) analytic.push_back(t.grad());

    GradCheckResult res;
    NoGradGuard guard;
    for (std::size_t ii = 0; ii < inputs.size(); ++ii) {
        const Tensor& t = inputs[ii];
        double* x = t.impl()->values.data();
        const std::size_t n = t.size();
        const std::size_t probes = (sample == 0 || sample >= n) ? n : sample;
        for (std::size_t k = 0; k < probes; ++k) {
            const std::size_t j = (probes == n) ? k : (k * n) / probes;
            const double saved = x[j];
            x[j] = saved + step;
            const double fp = fn().value();
            x[j] = saved - step;
            const double fm = fn().value();
            x[j] = saved;
            const double numeric = (fp - fm) / (2.0 * step);
            const double a = analytic[ii][j];
            const double rel = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
            ++res.coords_checked;
            if (rel > res.max_rel_err) {
                res.max_rel_err = rel;
                res.worst = {ii, j, a, numeric, rel};
            }
        }
    }
    res.ok = res.max_rel_err <= tol;
    return res;
}

}  // namespace gluco
