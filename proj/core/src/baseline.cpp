#include "gluco/baseline.hpp"

#include "gluco/ops.hpp"

namespace gluco {

namespace {

Tensor named_init(const Rng& rng, const std::string& name, Shape shape, int fan_in) {
    Rng stream = rng.split(name);
    return init_uniform(stream, std::move(shape), fan_in);
}

}  // namespace

std::pair<Tensor, Tensor> lstm_cell(const LstmLayer& layer, const Tensor& x, const Tensor& h,
                                    const Tensor& c) {
    const int hs = layer.wh.dim(1);
    Tensor gates = add(add(matmul(layer.wx, x), matmul(layer.wh, h)), layer.b);
    Tensor gi = sigmoid(slice(gates, 0, 0, hs));
    Tensor gf = sigmoid(slice(gates, 0, hs, 2 * hs));
    Tensor gg = tanh(slice(gates, 0, 2 * hs, 3 * hs));
    Tensor go = sigmoid(slice(gates, 0, 3 * hs, 4 * hs));
    Tensor c_new = add(mul(gf, c), mul(gi, gg));
    Tensor h_new = mul(go, tanh(c_new));
    return {h_new, c_new};
}

CnnLstmBaseline::CnnLstmBaseline(BaselineConfig cfg, const Rng& rng) : cfg_(cfg) {
    if (cfg_.t < 1 || cfg_.horizon < 1) {
        throw ContractError("baseline config out of range: t=" + std::to_string(cfg_.t) +
                            " horizon=" + std::to_string(cfg_.horizon));
    }

    auto reg = [this](std::string name, Tensor t) {
        params_.push_back({std::move(name), t});
        return t;
    };

    conv1_w_ = reg("conv1.w", named_init(rng, "conv1.w", Shape{kConv1, 3, 3}, 3 * 3));
    conv1_b_ = reg("conv1.b", named_init(rng, "conv1.b", Shape{kConv1}, 3 * 3));
    conv2_w_ = reg("conv2.w", named_init(rng, "conv2.w", Shape{kConv2, kConv1, 3}, kConv1 * 3));
    conv2_b_ = reg("conv2.b", named_init(rng, "conv2.b", Shape{kConv2}, kConv1 * 3));

    auto make_lstm = [&](const std::string& base, int in, int hs) {
        LstmLayer l;
        l.wx = reg(base + ".wx", named_init(rng, base + ".wx", Shape{4 * hs, in}, in));
        l.wh = reg(base + ".wh", named_init(rng, base + ".wh", Shape{4 * hs, hs}, hs));
        l.b = reg(base + ".b", named_init(rng, base + ".b", Shape{4 * hs, 1}, hs));
        return l;
    };
    lstm1_ = make_lstm("lstm1", kConv2, kHidden1);
    lstm2_ = make_lstm("lstm2", kHidden1, kHidden2);

    mlp_w1_ = reg("mlp.w1", named_init(rng, "mlp.w1", Shape{kHidden2, kHidden2}, kHidden2));
    mlp_b1_ = reg("mlp.b1", named_init(rng, "mlp.b1", Shape{kHidden2, 1}, kHidden2));
    mlp_w2_ = reg("mlp.w2", named_init(rng, "mlp.w2", Shape{kMlpHidden, kHidden2}, kHidden2));
    mlp_b2_ = reg("mlp.b2", named_init(rng, "mlp.b2", Shape{kMlpHidden, 1}, kHidden2));
    mlp_w3_ = reg("mlp.w3", named_init(rng, "mlp.w3", Shape{cfg_.horizon, kMlpHidden}, kMlpHidden));
    mlp_b3_ = reg("mlp.b3", named_init(rng, "mlp.b3", Shape{cfg_.horizon, 1}, kMlpHidden));
}

Tensor CnnLstmBaseline::forward(const Tensor& glucose, const Tensor& steps,
                                const Tensor& intervals) const {
    const Tensor* chans[3] = {&glucose, &steps, &intervals};
    for (const Tensor* c : chans) {
        if (c->ndim() != 1 || c->dim(0) != cfg_.t) {
            throw ShapeError("forward: channel of shape " + shape_str(c->shape()) +
                             " does not match window length " + std::to_string(cfg_.t));
        }
    }

    Tensor stacked = concat({reshape(glucose, Shape{1, cfg_.t}), reshape(steps, Shape{1, cfg_.t}),
                             reshape(intervals, Shape{1, cfg_.t})},
                            0);
    Tensor features = relu(conv1d(relu(conv1d(stacked, conv1_w_, conv1_b_)), conv2_w_, conv2_b_));

    Tensor h1(Shape{kHidden1, 1}, 0.0), c1(Shape{kHidden1, 1}, 0.0);
    Tensor h2(Shape{kHidden2, 1}, 0.0), c2(Shape{kHidden2, 1}, 0.0);
    for (int s = 0; s < cfg_.t; ++s) {
        Tensor x = slice(features, 1, s, s + 1);
        std::tie(h1, c1) = lstm_cell(lstm1_, x, h1, c1);
        std::tie(h2, c2) = lstm_cell(lstm2_, h1, h2, c2);
    }

    Tensor z = relu(add(matmul(mlp_w1_, h2), mlp_b1_));
    z = relu(add(matmul(mlp_w2_, z), mlp_b2_));
    Tensor y = add(matmul(mlp_w3_, z), mlp_b3_);
    return reshape(y, Shape{cfg_.horizon});
}

void CnnLstmBaseline::load_block(const std::string& name, const Tensor& block) {
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
