#pragma once

#include <cstdint>
#include <vector>

#include "gluco/data.hpp"
#include "gluco/forecaster.hpp"
#include "gluco/params.hpp"

namespace gluco {

struct TrainConfig {
    int epochs = 300;
    double learning_rate = 0.001;
    int batch_size = 32;
    std::uint64_t seed = 1;
    int repetitions = 5;
    int finetune_epochs = 0;  // 0 means: reuse epochs
    double clip_norm = 0.0;   // 0 disables clipping

    int effective_finetune_epochs() const { return finetune_epochs > 0 ? finetune_epochs : epochs; }
};

// Per-tensor first/second moment buffers plus the shared step counter.
struct AdamState {
    std::vector<std::vector<double>> m, v;
    std::size_t step = 0;

    static AdamState for_params(const ParamList& params);
};

// One Adam update from the gradients currently stored on the params.
// beta1 0.9, beta2 0.999, eps 1e-8, with bias correction.
void adam_step(ParamList& params, AdamState& state, double lr);

// Scales all gradients so their global L2 norm is at most max_norm.
// No-op when max_norm <= 0 or the norm is already within bounds.
void clip_gradients(ParamList& params, double max_norm);

// Minibatch MSE training over normalized windows for a fixed epoch count; the
// loss compares normalized outputs against targets normalized with `stats`.
// Optimizer state is created fresh inside the call; the shuffle order for
// epoch e comes from Rng(shuffle_seed).split("epoch", e). Returns the mean
// per-window MSE of each epoch (computed from the pre-update forward passes).
std::vector<double> train_model(Forecaster& model, const std::vector<WindowSample>& windows,
                                const NormStats& stats, const TrainConfig& cfg, int epochs,
                                std::uint64_t shuffle_seed);

}  // namespace gluco
