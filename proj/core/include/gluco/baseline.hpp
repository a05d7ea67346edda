#pragma once

#include <string>

#include "gluco/params.hpp"
#include "gluco/rng.hpp"
#include "gluco/tensor.hpp"

namespace gluco {

struct BaselineConfig {
    int t = 24;        // input window length (samples)
    int horizon = 6;   // forecast steps
};

struct LstmLayer {
    Tensor wx;  // [4h x in]
    Tensor wh;  // [4h x h]
    Tensor b;   // [4h x 1], gates packed input, forget, cell, output
};

// Convolutional front end over the stacked channels followed by a two-layer
// LSTM and a small MLP head. Channel widths are fixed: conv 64 -> 128,
// LSTM 128 -> 64, MLP 64 -> 32 -> horizon.
class CnnLstmBaseline {
public:
    CnnLstmBaseline(BaselineConfig cfg, const Rng& rng);

    // Inputs are normalized channels of length cfg.t; returns [horizon].
    Tensor forward(const Tensor& glucose, const Tensor& steps, const Tensor& intervals) const;

    ParamList& params() { return params_; }
    const ParamList& params() const { return params_; }
    const BaselineConfig& config() const { return cfg_; }

    void load_block(const std::string& name, const Tensor& block);

    static constexpr int kConv1 = 64;
    static constexpr int kConv2 = 128;
    static constexpr int kHidden1 = 128;
    static constexpr int kHidden2 = 64;
    static constexpr int kMlpHidden = 32;

private:
    BaselineConfig cfg_;

    Tensor conv1_w_, conv1_b_, conv2_w_, conv2_b_;
    LstmLayer lstm1_, lstm2_;
    Tensor mlp_w1_, mlp_b1_, mlp_w2_, mlp_b2_, mlp_w3_, mlp_b3_;

    ParamList params_;
};

// One LSTM step: x [in x 1], h [h x 1], c [h x 1]; returns updated (h, c).
std::pair<Tensor, Tensor> lstm_cell(const LstmLayer& layer, const Tensor& x, const Tensor& h,
                                    const Tensor& c);

}  // namespace gluco
