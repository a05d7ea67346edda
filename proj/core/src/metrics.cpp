#include "gluco/metrics.hpp"

#include <cmath>

#include "gluco/ops.hpp"

namespace gluco {

void MetricsAccum::add(const std::vector<double>& pred, const std::vector<double>& target) {
    if (pred.size() != target.size() || pred.empty()) {
        throw ContractError("metrics: prediction/target length mismatch (" +
                            std::to_string(pred.size()) + " vs " + std::to_string(target.size()) + ")");
    }
    if (sse_step_.size() < pred.size()) {
        sse_step_.resize(pred.size(), 0.0);
        n_step_.resize(pred.size(), 0);
    }
    ++n_windows_;
    for (std::size_t s = 0; s < pred.size(); ++s) {
        const double p = pred[s], t = target[s], d = p - t;
        sse_ += d * d;
        sae_ += std::abs(d);
        sp_ += p;
        st_ += t;
        spp_ += p * p;
        stt_ += t * t;
        spt_ += p * t;
        sse_step_[s] += d * d;
        ++n_step_[s];
        ++n_;
    }
}

void MetricsAccum::merge(const MetricsAccum& other) {
    if (sse_step_.size() < other.sse_step_.size()) {
        sse_step_.resize(other.sse_step_.size(), 0.0);
        n_step_.resize(other.n_step_.size(), 0);
    }
    n_windows_ += other.n_windows_;
    n_ += other.n_;
    sse_ += other.sse_;
    sae_ += other.sae_;
    sp_ += other.sp_;
    st_ += other.st_;
    spp_ += other.spp_;
    stt_ += other.stt_;
    spt_ += other.spt_;
    for (std::size_t s = 0; s < other.sse_step_.size(); ++s) {
        sse_step_[s] += other.sse_step_[s];
        n_step_[s] += other.n_step_[s];
    }
}

MetricsReport MetricsAccum::report() const {
    if (n_ == 0) throw ContractError("metrics requested over zero pooled pairs");
    MetricsReport r;
    r.n_windows = n_windows_;
    r.n_pairs = n_;
    const double n = static_cast<double>(n_);
    r.rmse = std::sqrt(sse_ / n);
    r.mae = sae_ / n;

    const double var_p = spp_ / n - (sp_ / n) * (sp_ / n);
    const double var_t = stt_ / n - (st_ / n) * (st_ / n);
    const double cov = spt_ / n - (sp_ / n) * (st_ / n);
    const double floor_p = 1e-12 * std::max(1.0, spp_ / n);
    const double floor_t = 1e-12 * std::max(1.0, stt_ / n);
    if (var_p <= floor_p || var_t <= floor_t) {
        r.pearson = 0.0;
        r.pearson_degenerate = true;
    } else {
        r.pearson = cov / (std::sqrt(var_p) * std::sqrt(var_t));
    }

    r.rmse_per_step.resize(sse_step_.size());
    for (std::size_t s = 0; s < sse_step_.size(); ++s) {
        r.rmse_per_step[s] = n_step_[s] ? std::sqrt(sse_step_[s] / n_step_[s]) : 0.0;
    }
    return r;
}

void accumulate_evaluation(MetricsAccum& accum, const Forecaster& model,
                           const std::vector<WindowSample>& windows, const NormStats& stats) {
    NoGradGuard guard;
    const int t = model.window();
    for (const WindowSample& w : windows) {
        Tensor g(Shape{t}, w.x_g), ws(Shape{t}, w.x_ws), wi(Shape{t}, w.x_wi);
        Tensor pred = model.predict(g, ws, wi);
        std::vector<double> mgdl(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) {
            mgdl[i] = denormalize_glucose(pred.data()[i], stats);
        }
        accum.add(mgdl, w.target);
    }
}

MetricsReport evaluate(const Forecaster& model, const std::vector<WindowSample>& windows,
                       const NormStats& stats) {
    if (windows.empty()) throw ContractError("evaluate called with an empty window set");
    MetricsAccum accum;
    accumulate_evaluation(accum, model, windows, stats);
    return accum.report();
}

}  // namespace gluco
