#include "gluco/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gluco/ops.hpp"
#include "gluco/rng.hpp"

namespace gluco {

AdamState AdamState::for_params(const ParamList& params) {
    AdamState st;
    st.m.reserve(params.size());
    st.v.reserve(params.size());
    for (const NamedParam& p : params) {
        st.m.emplace_back(p.tensor.size(), 0.0);
        st.v.emplace_back(p.tensor.size(), 0.0);
    }
    return st;
}

void adam_step(ParamList& params, AdamState& state, double lr) {
    if (state.m.size() != params.size()) {
        throw ContractError("adam state holds " + std::to_string(state.m.size()) +
                            " buffers for " + std::to_string(params.size()) + " params");
    }
    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& t = params[i].tensor;
        const std::vector<double>& g = t.impl()->grad;  // may be empty: treated as zero
        std::vector<double>& m = state.m[i];
        std::vector<double>& v = state.v[i];
        double* x = t.impl()->values.data();
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double gj = j < g.size() ? g[j] : 0.0;
            m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * gj;
            v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * gj * gj;
            x[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + kEps);
        }
    }
}

void clip_gradients(ParamList& params, double max_norm) {
    if (max_norm <= 0.0) return;
    double sq = 0.0;
    for (const NamedParam& p : params) {
        for (double g : p.tensor.impl()->grad) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double s = max_norm / norm;
    for (NamedParam& p : params) {
        for (double& g : p.tensor.impl()->grad) g *= s;
    }
}

std::vector<double> train_model(Forecaster& model, const std::vector<WindowSample>& windows,
                                const NormStats& stats, const TrainConfig& cfg, int epochs,
                                std::uint64_t shuffle_seed) {
    if (windows.empty()) throw ContractError("train_model called with an empty training set");
    if (epochs < 1) throw ContractError("train_model needs epochs >= 1");
    if (cfg.batch_size < 1) throw ContractError("train_model needs batch_size >= 1");

    const int t = model.window(), m = model.horizon();
    ParamList& params = model.params();
    AdamState state = AdamState::for_params(params);

    std::vector<std::vector<double>> ztargets(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        ztargets[i].resize(windows[i].target.size());
        for (std::size_t s = 0; s < windows[i].target.size(); ++s) {
            ztargets[i][s] = normalize_glucose(windows[i].target[s], stats);
        }
    }

    std::vector<std::size_t> order(windows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(epochs));
    const Rng root(shuffle_seed);
    for (int e = 0; e < epochs; ++e) {
        Rng rng = root.split("epoch", static_cast<std::uint64_t>(e));
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }

        double epoch_sse = 0.0;
        for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t bn = std::min(order.size() - b, static_cast<std::size_t>(cfg.batch_size));
            zero_grads(params);
            Tensor total;
            for (std::size_t k = 0; k < bn; ++k) {
                const std::size_t idx = order[b + k];
                const WindowSample& w = windows[idx];
                Tensor g(Shape{t}, w.x_g), ws(Shape{t}, w.x_ws), wi(Shape{t}, w.x_wi);
                Tensor loss = mse(model.predict(g, ws, wi), Tensor(Shape{m}, ztargets[idx]));
                epoch_sse += loss.data()[0];
                total = (k == 0) ? loss : add(total, loss);
            }
            Tensor batch_loss = scale(total, 1.0 / static_cast<double>(bn));
            batch_loss.backward();
            clip_gradients(params, cfg.clip_norm);
            adam_step(params, state, cfg.learning_rate);
        }
        curve.push_back(epoch_sse / static_cast<double>(windows.size()));
    }
    return curve;
}

}  // namespace gluco
