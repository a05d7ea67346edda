#pragma once

#include <memory>
#include <string>

#include "gluco/baseline.hpp"
#include "gluco/checkpoint.hpp"
#include "gluco/model.hpp"

namespace gluco {

// Uniform handle over both model families for training and evaluation.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual Tensor predict(const Tensor& glucose, const Tensor& steps,
                           const Tensor& intervals) const = 0;
    virtual ParamList& params() = 0;
    virtual const std::string& name() const = 0;
    virtual int window() const = 0;
    virtual int horizon() const = 0;

    virtual Checkpoint to_checkpoint() const = 0;
    virtual std::unique_ptr<Forecaster> fresh(std::uint64_t seed) const = 0;
};

std::unique_ptr<Forecaster> make_attengluco(const ModelConfig& cfg, std::uint64_t seed);
std::unique_ptr<Forecaster> make_baseline(const BaselineConfig& cfg, std::uint64_t seed);
std::unique_ptr<Forecaster> from_checkpoint(const Checkpoint& ckpt);

}  // namespace gluco
