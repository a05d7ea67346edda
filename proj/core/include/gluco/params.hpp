#pragma once

#include <string>
#include <vector>

#include "gluco/rng.hpp"
#include "gluco/tensor.hpp"

namespace gluco {

struct NamedParam {
    std::string name;
    Tensor tensor;
};

using ParamList = std::vector<NamedParam>;

std::size_t total_params(const ParamList& params);
void zero_grads(ParamList& params);

// Uniform(-b, b) with b = sqrt(1 / fan_in); requires_grad is set.
Tensor init_uniform(Rng& rng, Shape shape, int fan_in);

}  // namespace gluco
