#include "gluco/data.hpp"

#include <algorithm>
#include <cmath>

#include "gluco/tensor.hpp"

namespace gluco {

const std::string& cohort_name(Cohort c) {
    static const std::string names[4] = {"Healthy", "PreT2DM", "Oral", "Insulin"};
    return names[static_cast<int>(c)];
}

Cohort parse_cohort(const std::string& name) {
    for (Cohort c : kCohorts) {
        if (cohort_name(c) == name) return c;
    }
    throw ParseError("unknown cohort '" + name + "'; expected Healthy, PreT2DM, Oral or Insulin");
}

GriddedChannels align_to_grid(const SubjectRecord& record) {
    if (record.cgm.empty()) throw ContractError("subject " + record.id + " has no CGM samples");

    GriddedChannels grid;
    grid.start = record.cgm.front().first;
    const std::int64_t span = record.cgm.back().first - grid.start;
    const std::size_t n = static_cast<std::size_t>(span / kGridSeconds) + 1;
    grid.glucose.assign(n, std::nan(""));
    grid.steps.assign(n, 0.0);

    for (const auto& [ts, value] : record.cgm) {
        const double offset = static_cast<double>(ts - grid.start) / kGridSeconds;
        const auto idx = static_cast<std::int64_t>(std::llround(offset));
        if (idx < 0 || idx >= static_cast<std::int64_t>(n)) continue;
        grid.glucose[static_cast<std::size_t>(idx)] = value;  // nearest point, last wins
    }
    for (const auto& [ts, count] : record.steps) {
        if (ts < grid.start) continue;
        const auto idx = (ts - grid.start) / kGridSeconds;  // floor bin
        if (idx >= static_cast<std::int64_t>(n)) continue;
        grid.steps[static_cast<std::size_t>(idx)] += count;
    }
    return grid;
}

std::vector<double> derive_walking_intervals(const std::vector<double>& steps, double cap_minutes) {
    std::vector<double> out(steps.size(), cap_minutes);
    double since = cap_minutes;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i] > 0.0) {
            since = 0.0;
        } else if (since < cap_minutes) {
            since = std::min(cap_minutes, since + 5.0);
        }
        out[i] = since;
    }
    return out;
}

InterpolationResult interpolate_missing(const std::vector<double>& glucose, double max_gap_minutes) {
    InterpolationResult res;
    res.glucose = glucose;
    const int n = static_cast<int>(glucose.size());
    const int max_gap_samples = static_cast<int>(max_gap_minutes / 5.0);

    int i = 0;
    while (i < n) {
        if (!std::isnan(res.glucose[i])) {
            ++i;
            continue;
        }
        int j = i;
        while (j < n && std::isnan(res.glucose[j])) ++j;
        const int gap = j - i;
        const bool interior = i > 0 && j < n;
        if (interior && gap <= max_gap_samples) {
            const double lo = res.glucose[i - 1], hi = res.glucose[j];
            for (int k = i; k < j; ++k) {
                const double frac = static_cast<double>(k - i + 1) / (gap + 1);
                res.glucose[k] = lo + (hi - lo) * frac;
            }
            res.filled += gap;
        } else if (interior) {
            ++res.splits;
        }
        i = j;
    }

    int lo = 0;
    while (lo < n) {
        while (lo < n && std::isnan(res.glucose[lo])) ++lo;
        if (lo >= n) break;
        int hi = lo;
        while (hi < n && !std::isnan(res.glucose[hi])) ++hi;
        res.segments.emplace_back(lo, hi);
        lo = hi;
    }
    return res;
}

std::vector<WindowSample> make_windows(const GriddedChannels& grid,
                                       const std::vector<double>& glucose_filled,
                                       const std::vector<double>& intervals,
                                       const std::vector<std::pair<int, int>>& segments, int t,
                                       int m, int stride, const std::string& subject_id) {
    if (t < 1 || m < 1 || stride < 1) {
        throw ContractError("window parameters out of range: t=" + std::to_string(t) +
                            " m=" + std::to_string(m) + " stride=" + std::to_string(stride));
    }
    std::vector<WindowSample> out;
    for (const auto& [lo, hi] : segments) {
        for (int s = lo; s + t + m <= hi; s += stride) {
            WindowSample w;
            w.subject_id = subject_id;
            w.start_ts = grid.time_at(static_cast<std::size_t>(s));
            w.x_g.assign(glucose_filled.begin() + s, glucose_filled.begin() + s + t);
            w.x_ws.assign(grid.steps.begin() + s, grid.steps.begin() + s + t);
            w.x_wi.assign(intervals.begin() + s, intervals.begin() + s + t);
            w.target.assign(glucose_filled.begin() + s + t, glucose_filled.begin() + s + t + m);
            out.push_back(std::move(w));
        }
    }
    return out;
}

std::pair<std::vector<WindowSample>, std::vector<WindowSample>> split_train_test(
    std::vector<WindowSample> windows, double fraction) {
    const std::size_t n = windows.size();
    if (n < 2) {
        throw ContractError("cannot split " + std::to_string(n) + " window(s); need at least 2");
    }
    auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<WindowSample> test(std::make_move_iterator(windows.begin() + n_train),
                                   std::make_move_iterator(windows.end()));
    windows.resize(n_train);
    return {std::move(windows), std::move(test)};
}

namespace {

struct Moments {
    double sum = 0, sumsq = 0;
    std::size_t n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    void finish(double& mean, double& sd, bool& degenerate) const {
        mean = n ? sum / n : 0.0;
        const double var = n ? std::max(0.0, sumsq / n - mean * mean) : 0.0;
        sd = std::sqrt(var);
        degenerate = sd < 1e-12;
        if (degenerate) sd = 1.0;
    }
};

}  // namespace

NormStats compute_norm_stats(const std::vector<WindowSample>& train) {
    if (train.empty()) throw ContractError("cannot fit normalization on an empty training set");
    Moments g, ws, wi;
    for (const WindowSample& w : train) {
        for (double v : w.x_g) g.add(v);
        for (double v : w.x_ws) ws.add(v);
        for (double v : w.x_wi) wi.add(v);
    }
    NormStats s;
    g.finish(s.mean_g, s.sd_g, s.degenerate_g);
    ws.finish(s.mean_ws, s.sd_ws, s.degenerate_ws);
    wi.finish(s.mean_wi, s.sd_wi, s.degenerate_wi);
    return s;
}

void apply_normalization(std::vector<WindowSample>& windows, const NormStats& s) {
    for (WindowSample& w : windows) {
        for (double& v : w.x_g) v = (v - s.mean_g) / s.sd_g;
        for (double& v : w.x_ws) v = (v - s.mean_ws) / s.sd_ws;
        for (double& v : w.x_wi) v = (v - s.mean_wi) / s.sd_wi;
    }
}

PreparedSubject prepare_subject(const SubjectRecord& record, const PipelineOptions& opt) {
    const GriddedChannels grid = align_to_grid(record);
    const std::vector<double> intervals =
        derive_walking_intervals(grid.steps, opt.interval_cap_minutes);
    const InterpolationResult interp = interpolate_missing(grid.glucose, opt.max_gap_minutes);

    std::vector<WindowSample> windows = make_windows(grid, interp.glucose, intervals,
                                                     interp.segments, opt.t, opt.m, opt.stride,
                                                     record.id);
    auto [train, test] = split_train_test(std::move(windows), opt.split_fraction);

    PreparedSubject subject;
    subject.id = record.id;
    subject.cohort = record.cohort;
    subject.stats = compute_norm_stats(train);
    apply_normalization(train, subject.stats);
    apply_normalization(test, subject.stats);
    subject.train = std::move(train);
    subject.test = std::move(test);
    return subject;
}

}  // namespace gluco
