#pragma once

#include <cstddef>
#include <vector>

#include "gluco/data.hpp"
#include "gluco/forecaster.hpp"

namespace gluco {

struct MetricsReport {
    double rmse = 0.0;     // mg/dL
    double mae = 0.0;      // mg/dL
    double pearson = 0.0;  // 0 when degenerate
    bool pearson_degenerate = false;
    std::size_t n_windows = 0;
    std::size_t n_pairs = 0;                // (window, horizon-step) pairs
    std::vector<double> rmse_per_step;      // index s covers (s+1)*5 minutes ahead
};

// Pools (prediction, target) pairs in mg/dL; mergeable so cohort-level
// metrics can be assembled exactly from per-subject passes.
class MetricsAccum {
public:
    void add(const std::vector<double>& pred, const std::vector<double>& target);
    void merge(const MetricsAccum& other);
    MetricsReport report() const;
    bool empty() const { return n_ == 0; }

private:
    std::size_t n_windows_ = 0, n_ = 0;
    double sse_ = 0, sae_ = 0, sp_ = 0, st_ = 0, spp_ = 0, stt_ = 0, spt_ = 0;
    std::vector<double> sse_step_;
    std::vector<std::size_t> n_step_;
};

// Runs the forecaster over every window, de-normalizes predictions to mg/dL
// and pools them into the accumulator.
void accumulate_evaluation(MetricsAccum& accum, const Forecaster& model,
                           const std::vector<WindowSample>& windows, const NormStats& stats);

// Single-set evaluation; throws ContractError on an empty window list.
MetricsReport evaluate(const Forecaster& model, const std::vector<WindowSample>& windows,
                       const NormStats& stats);

}  // namespace gluco
