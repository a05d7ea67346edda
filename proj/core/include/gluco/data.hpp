#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gluco/timeutil.hpp"

namespace gluco {

enum class Cohort { Healthy, PreT2DM, Oral, Insulin };

inline constexpr std::array<Cohort, 4> kCohorts{Cohort::Healthy, Cohort::PreT2DM, Cohort::Oral,
                                                Cohort::Insulin};

const std::string& cohort_name(Cohort c);
Cohort parse_cohort(const std::string& name);

struct SubjectRecord {
    std::string id;
    Cohort cohort = Cohort::Healthy;
    std::vector<std::pair<std::int64_t, double>> cgm;    // (UTC seconds, mg/dL)
    std::vector<std::pair<std::int64_t, double>> steps;  // (UTC seconds, count in interval)
};

// Channels on the uniform 5-minute grid; missing glucose is NaN.
struct GriddedChannels {
    std::int64_t start = 0;  // timestamp of grid index 0
    std::vector<double> glucose;
    std::vector<double> steps;

    std::int64_t time_at(std::size_t idx) const {
        return start + static_cast<std::int64_t>(idx) * kGridSeconds;
    }
};

GriddedChannels align_to_grid(const SubjectRecord& record);

// Minutes since the most recent bin with steps > 0; 0 at a walking bin and
// `cap_minutes` before the first one.
std::vector<double> derive_walking_intervals(const std::vector<double>& steps,
                                             double cap_minutes = 720.0);

struct InterpolationResult {
    std::vector<double> glucose;                    // NaN only inside unusable gaps
    std::vector<std::pair<int, int>> segments;      // usable [lo, hi) index ranges
    int filled = 0;                                 // interpolated samples
    int splits = 0;                                 // gaps too long to bridge
};

InterpolationResult interpolate_missing(const std::vector<double>& glucose,
                                        double max_gap_minutes = 60.0);

struct WindowSample {
    std::vector<double> x_g, x_ws, x_wi;  // length t, normalized once stats are applied
    std::vector<double> target;           // length m, always mg/dL
    std::string subject_id;
    std::int64_t start_ts = 0;
};

// Slides a (t inputs, m targets) window at the given stride inside each
// usable segment; channels are left raw for a later normalization pass.
std::vector<WindowSample> make_windows(const GriddedChannels& grid,
                                       const std::vector<double>& glucose_filled,
                                       const std::vector<double>& intervals,
                                       const std::vector<std::pair<int, int>>& segments, int t,
                                       int m, int stride, const std::string& subject_id);

// Chronological split; throws ContractError when fewer than 2 windows exist.
std::pair<std::vector<WindowSample>, std::vector<WindowSample>> split_train_test(
    std::vector<WindowSample> windows, double fraction = 0.85);

struct NormStats {
    double mean_g = 0, sd_g = 1, mean_ws = 0, sd_ws = 1, mean_wi = 0, sd_wi = 1;
    bool degenerate_g = false, degenerate_ws = false, degenerate_wi = false;
};

NormStats compute_norm_stats(const std::vector<WindowSample>& train);
void apply_normalization(std::vector<WindowSample>& windows, const NormStats& stats);

inline double denormalize_glucose(double z, const NormStats& s) { return z * s.sd_g + s.mean_g; }
inline double normalize_glucose(double mgdl, const NormStats& s) { return (mgdl - s.mean_g) / s.sd_g; }

struct PipelineOptions {
    int t = 80;
    int m = 6;
    int stride = 1;
    double split_fraction = 0.85;
    double interval_cap_minutes = 720.0;
    double max_gap_minutes = 60.0;
};

struct PreparedSubject {
    std::string id;
    Cohort cohort = Cohort::Healthy;
    std::vector<WindowSample> train, test;  // normalized
    NormStats stats;
};

// Full per-subject pipeline: align, derive intervals, interpolate, window,
// split, fit stats on the train portion, and normalize both splits.
PreparedSubject prepare_subject(const SubjectRecord& record, const PipelineOptions& opt);

}  // namespace gluco
