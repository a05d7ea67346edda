#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gluco/params.hpp"
#include "gluco/rng.hpp"
#include "gluco/tensor.hpp"

namespace gluco {

struct ModelConfig {
    int t = 24;        // input window length (samples)
    int d_model = 32;  // embedding width
    int heads = 4;     // attention heads per block
    int horizon = 6;   // forecast steps
    int d_ff = 64;     // feed-forward hidden width
    std::vector<int> scales{1, 2, 4};
};

// Captures attention weight matrices from a forward pass, keyed by block
// label ("ca.ws.h0", "ms.s2.h1", ...).
struct AttnTrace {
    std::vector<std::pair<std::string, Tensor>> weights;
};

// Fixed sinusoidal table, [t x d]. Row p: sin(p / 10000^(2i/d)) in even
// columns, cos of the same angle in odd columns.
Tensor positional_table(int t, int d);

struct AttnHead {
    Tensor wq, wk, wv;  // each [d x d]
};

struct AttnBlock {
    std::vector<AttnHead> heads;
    Tensor wh;  // [heads*d x d]
};

struct FeedForward {
    Tensor w1, b1, w2, b2;
};

struct NormAffine {
    Tensor gain, bias;
};

// Softmax(Q Kᵀ / √d) V with d = the shared projection width; optionally hands
// back the attention weight matrix.
Tensor scaled_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                        Tensor* weights_out = nullptr);

// Per head: scaled_attention(q_src·W_Q, kv_src·W_K, kv_src·W_V); heads are
// concatenated along the width and projected by W_H.
Tensor multi_head_attention(const Tensor& query_src, const Tensor& kv_src, const AttnBlock& blk,
                            AttnTrace* trace = nullptr, const std::string& label = {});

// Multimodal forecaster: CGM queries attend over each activity channel, the
// fused sequence is refined by self-attention at several temporal scales, and
// a flattened affine head emits the forecast.
class AttenGluco {
public:
    AttenGluco(ModelConfig cfg, const Rng& rng);

    // Each input is a normalized channel of length cfg.t; returns [horizon].
    Tensor forward(const Tensor& glucose, const Tensor& steps, const Tensor& intervals,
                   AttnTrace* trace = nullptr) const;

    ParamList& params() { return params_; }
    const ParamList& params() const { return params_; }
    const ModelConfig& config() const { return cfg_; }
    const Tensor& positional() const { return pos_; }

    // Overwrites the named parameter's values; shape must match.
    void load_block(const std::string& name, const Tensor& block);

private:
    Tensor feed(const Tensor& x, const FeedForward& ff) const;

    ModelConfig cfg_;
    Tensor pos_;

    Tensor embed_w_[3], embed_b_[3];  // glucose, steps, intervals
    AttnBlock ca_ws_, ca_wi_;
    FeedForward ff1_, ff2_;
    NormAffine norm1_, norm2_;
    std::vector<AttnBlock> ms_;  // one per scale
    Tensor head_w_, head_b_;

    ParamList params_;
};

}  // namespace gluco
