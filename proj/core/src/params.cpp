#include "gluco/params.hpp"

#include <cmath>

namespace gluco {

std::size_t total_params(const ParamList& params) {
    std::size_t n = 0;
    for (const NamedParam& p : params) n += p.tensor.size();
    return n;
}

void zero_grads(ParamList& params) {
    for (NamedParam& p : params) p.tensor.impl()->grad.assign(p.tensor.size(), 0.0);
}

Tensor init_uniform(Rng& rng, Shape shape, int fan_in) {
    const double bound = std::sqrt(1.0 / fan_in);
    Tensor t(std::move(shape));
    double* d = t.data();
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) d[i] = rng.uniform(-bound, bound);
    t.set_requires_grad(true);
    return t;
}

}  // namespace gluco
