#pragma once

#include <string>
#include <vector>

#include "gluco/checkpoint.hpp"
#include "gluco/data.hpp"
#include "gluco/forecaster.hpp"
#include "gluco/metrics.hpp"
#include "gluco/train.hpp"

namespace gluco {

enum class Scenario { Isolated, CohortFinetune, Forgetting };

const std::string& scenario_name(Scenario s);
Scenario parse_scenario(const std::string& name);

// Mean and sample standard deviation over the repetition runs; sd is 0 for a
// single repetition. rmse_per_step_mean is the per-horizon-step pooled RMSE
// averaged the same way.
struct AggMetrics {
    double rmse_mean = 0, rmse_sd = 0;
    double mae_mean = 0, mae_sd = 0;
    double pearson_mean = 0, pearson_sd = 0;
    std::vector<double> rmse_per_step_mean;
};

struct CohortRow {
    Cohort cohort = Cohort::Healthy;
    AggMetrics agg;
};

struct SubjectRow {
    Cohort cohort = Cohort::Healthy;
    int index_in_cohort = 0;  // position inside its cohort, 0-based
    std::string id;
    double rmse_mean = 0;
};

struct ForgetRow {
    Cohort trained_through = Cohort::Healthy;
    Cohort evaluated_on = Cohort::Healthy;
    AggMetrics agg;
};

struct ScenarioOutput {
    std::vector<CohortRow> cohorts;      // one row per cohort present, fixed order
    std::vector<SubjectRow> subjects;    // fine-tune trendline rows
    std::vector<ForgetRow> forgetting;   // lower-triangular occupancy
    Checkpoint final_model;              // repetition 0, state after the last subject
};

// Runs the full pipeline per record; subjects that fail preparation or end up
// with an empty test split are skipped with a warning on stderr.
std::vector<PreparedSubject> prepare_subjects(const std::vector<SubjectRecord>& records,
                                              const PipelineOptions& opt);

// Executes one scenario for one model family. `prototype` supplies fresh
// models via Forecaster::fresh; repetition r uses root seed cfg.seed + r and
// runs repetitions in parallel when workers > 1 (merged by repetition index,
// so the output is independent of the worker count).
ScenarioOutput run_scenario(Scenario kind, const std::vector<PreparedSubject>& subjects,
                            const Forecaster& prototype, const TrainConfig& cfg, int workers = 1);

}  // namespace gluco
