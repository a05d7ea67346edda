#include "gluco/model.hpp"

#include <cmath>

#include "gluco/ops.hpp"

namespace gluco {

Tensor positional_table(int t, int d) {
    Tensor pos(Shape{t, d});
    double* v = pos.data();
    for (int p = 0; p < t; ++p) {
        double* row = v + static_cast<std::size_t>(p) * d;
        for (int i = 0; i < d; i += 2) {
            const double angle = p / std::pow(10000.0, static_cast<double>(i) / d);
            row[i] = std::sin(angle);
            if (i + 1 < d) row[i + 1] = std::cos(angle);
        }
    }
    return pos;
}

namespace {

Tensor named_init(const Rng& rng, const std::string& name, Shape shape, int fan_in) {
    Rng stream = rng.split(name);
    return init_uniform(stream, std::move(shape), fan_in);
}

void check_config(const ModelConfig& cfg) {
    if (cfg.t < 1 || cfg.d_model < 2 || cfg.heads < 1 || cfg.horizon < 1 || cfg.d_ff < 1) {
        throw ContractError("model config out of range: t=" + std::to_string(cfg.t) +
                            " d_model=" + std::to_string(cfg.d_model) +
                            " heads=" + std::to_string(cfg.heads) +
                            " horizon=" + std::to_string(cfg.horizon) +
                            " d_ff=" + std::to_string(cfg.d_ff));
    }
    if (cfg.scales.empty()) throw ContractError("model config needs at least one scale");
    for (int s : cfg.scales) {
        if (s < 1 || s > cfg.t) {
            throw ContractError("scale " + std::to_string(s) + " out of range for t=" +
                                std::to_string(cfg.t));
        }
    }
}

}  // namespace

AttenGluco::AttenGluco(ModelConfig cfg, const Rng& rng) : cfg_(std::move(cfg)) {
    check_config(cfg_);
    const int d = cfg_.d_model;
    pos_ = positional_table(cfg_.t, d);

    auto reg = [this](std::string name, Tensor t) {
        params_.push_back({std::move(name), t});
        return t;
    };

    const char* chan[3] = {"g", "ws", "wi"};
    for (int c = 0; c < 3; ++c) {
        const std::string base = std::string("embed.") + chan[c];
        embed_w_[c] = reg(base + ".w", named_init(rng, base + ".w", Shape{d}, 1));
        embed_b_[c] = reg(base + ".b", named_init(rng, base + ".b", Shape{d}, 1));
    }

    auto make_block = [&](const std::string& base) {
        AttnBlock blk;
        for (int h = 0; h < cfg_.heads; ++h) {
            const std::string hb = base + ".h" + std::to_string(h);
            AttnHead head;
            head.wq = reg(hb + ".wq", named_init(rng, hb + ".wq", Shape{d, d}, d));
            head.wk = reg(hb + ".wk", named_init(rng, hb + ".wk", Shape{d, d}, d));
            head.wv = reg(hb + ".wv", named_init(rng, hb + ".wv", Shape{d, d}, d));
            blk.heads.push_back(head);
        }
        blk.wh = reg(base + ".wh", named_init(rng, base + ".wh", Shape{cfg_.heads * d, d}, cfg_.heads * d));
        return blk;
    };

    ca_ws_ = make_block("ca.ws");
    ca_wi_ = make_block("ca.wi");

    auto make_ff = [&](const std::string& base) {
        FeedForward ff;
        ff.w1 = reg(base + ".w1", named_init(rng, base + ".w1", Shape{d, cfg_.d_ff}, d));
        ff.b1 = reg(base + ".b1", named_init(rng, base + ".b1", Shape{cfg_.d_ff}, d));
        ff.w2 = reg(base + ".w2", named_init(rng, base + ".w2", Shape{cfg_.d_ff, d}, cfg_.d_ff));
        ff.b2 = reg(base + ".b2", named_init(rng, base + ".b2", Shape{d}, cfg_.d_ff));
        return ff;
    };
    auto make_norm = [&](const std::string& base) {
        NormAffine n;
        n.gain = reg(base + ".gain", Tensor(Shape{d}, 1.0).set_requires_grad(true));
        n.bias = reg(base + ".bias", Tensor(Shape{d}, 0.0).set_requires_grad(true));
        return n;
    };

    ff1_ = make_ff("ff1");
    norm1_ = make_norm("norm1");

    for (int s : cfg_.scales) ms_.push_back(make_block("ms.s" + std::to_string(s)));

    ff2_ = make_ff("ff2");
    norm2_ = make_norm("norm2");

    const int flat = cfg_.t * d;
    head_w_ = reg("head.w", named_init(rng, "head.w", Shape{flat, cfg_.horizon}, flat));
    head_b_ = reg("head.b", named_init(rng, "head.b", Shape{cfg_.horizon}, flat));
}

Tensor scaled_attention(const Tensor& q, const Tensor& k, const Tensor& v, Tensor* weights_out) {
    if (q.ndim() != 2 || k.ndim() != 2 || v.ndim() != 2 || q.dim(1) != k.dim(1) ||
        k.dim(0) != v.dim(0)) {
        throw ShapeError("scaled_attention: incompatible Q " + shape_str(q.shape()) + ", K " +
                         shape_str(k.shape()) + ", V " + shape_str(v.shape()));
    }
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(q.dim(1)));
    Tensor weights = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt_d));
    if (weights_out) *weights_out = weights;
    return matmul(weights, v);
}

Tensor multi_head_attention(const Tensor& query_src, const Tensor& kv_src, const AttnBlock& blk,
                            AttnTrace* trace, const std::string& label) {
    std::vector<Tensor> heads;
    heads.reserve(blk.heads.size());
    for (std::size_t h = 0; h < blk.heads.size(); ++h) {
        const AttnHead& hd = blk.heads[h];
        Tensor weights;
        Tensor out = scaled_attention(matmul(query_src, hd.wq), matmul(kv_src, hd.wk),
                                      matmul(kv_src, hd.wv), &weights);
        if (trace) trace->weights.emplace_back(label + ".h" + std::to_string(h), weights);
        heads.push_back(out);
    }
    return matmul(concat(heads, 1), blk.wh);
}

Tensor AttenGluco::feed(const Tensor& x, const FeedForward& ff) const {
    Tensor hidden = relu(add_rowwise(matmul(x, ff.w1), ff.b1));
    return add_rowwise(matmul(hidden, ff.w2), ff.b2);
}

Tensor AttenGluco::forward(const Tensor& glucose, const Tensor& steps, const Tensor& intervals,
                           AttnTrace* trace) const {
    const Tensor* chans[3] = {&glucose, &steps, &intervals};
    for (const Tensor* c : chans) {
        if (c->ndim() != 1 || c->dim(0) != cfg_.t) {
            throw ShapeError("forward: channel of shape " + shape_str(c->shape()) +
                             " does not match window length " + std::to_string(cfg_.t));
        }
    }

    Tensor enc[3];
    for (int c = 0; c < 3; ++c) {
        enc[c] = add(embedding_affine(*chans[c], embed_w_[c], embed_b_[c]), pos_);
    }

    Tensor fused = add(multi_head_attention(enc[0], enc[1], ca_ws_, trace, "ca.ws"),
                       multi_head_attention(enc[0], enc[2], ca_wi_, trace, "ca.wi"));
    Tensor x_ca = layer_norm(add(fused, feed(fused, ff1_)), norm1_.gain, norm1_.bias);

    Tensor multi;
    for (std::size_t i = 0; i < cfg_.scales.size(); ++i) {
        const int s = cfg_.scales[i];
        Tensor down = s == 1 ? x_ca : mean_pool_rows(x_ca, s);
        Tensor att = multi_head_attention(down, down, ms_[i], trace, "ms.s" + std::to_string(s));
        Tensor up = s == 1 ? att : repeat_rows(att, s, cfg_.t);
        multi = i == 0 ? up : add(multi, up);
    }
    Tensor x_ms = layer_norm(add(multi, feed(multi, ff2_)), norm2_.gain, norm2_.bias);

    Tensor flat = reshape(x_ms, Shape{1, cfg_.t * cfg_.d_model});
    return reshape(add_rowwise(matmul(flat, head_w_), head_b_), Shape{cfg_.horizon});
}

void AttenGluco::load_block(const std::string& name, const Tensor& block) {
    for (NamedParam& p : params_) {
        if (p.name == name) {
            if (p.tensor.shape() != block.shape()) {
                throw ContractError("block " + name + " has shape " + shape_str(block.shape()) +
                                    ", expected " + shape_str(p.tensor.shape()));
            }
            p.tensor.impl()->values = block.values();
            return;
        }
    }
    throw ContractError("unknown parameter block: " + name);
}

}  // namespace gluco
