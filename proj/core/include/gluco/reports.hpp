#pragma once

#include <string>
#include <vector>

#include "gluco/metrics.hpp"
#include "gluco/scenarios.hpp"

namespace gluco {

struct MetricsByCohortRow {
    std::string cohort, model;
    double rmse = 0, mae = 0, pearson = 0;
    double rmse_sd = 0, mae_sd = 0, pearson_sd = 0;
};

struct RmseBySubjectRow {
    std::string cohort, model;
    int subject_index = 0;
    double rmse = 0;
};

struct RmseByHorizonRow {
    std::string cohort, model;
    int ph_minutes = 0;
    double rmse = 0;
};

struct ForgettingRow {
    std::string model, trained_through, evaluated_on;
    double rmse = 0, mae = 0, pearson = 0;
};

// Rows for the four experiment reports. An experiment run always writes all
// four files; sections that do not apply to the scenario stay header-only.
struct ReportBundle {
    std::vector<MetricsByCohortRow> metrics_by_cohort;
    std::vector<RmseBySubjectRow> rmse_by_subject;
    std::vector<RmseByHorizonRow> rmse_by_horizon;
    std::vector<ForgettingRow> forgetting;

    void append(const ScenarioOutput& out, const std::string& model_name);
    void write_all(const std::string& dir) const;
};

void write_metrics_by_cohort(const std::string& path, const std::vector<MetricsByCohortRow>& rows);
void write_rmse_by_subject(const std::string& path, const std::vector<RmseBySubjectRow>& rows);
void write_rmse_by_horizon(const std::string& path, const std::vector<RmseByHorizonRow>& rows);
void write_forgetting_matrix(const std::string& path, const std::vector<ForgettingRow>& rows);

std::vector<MetricsByCohortRow> read_metrics_by_cohort(const std::string& path);
std::vector<RmseBySubjectRow> read_rmse_by_subject(const std::string& path);
std::vector<RmseByHorizonRow> read_rmse_by_horizon(const std::string& path);
std::vector<ForgettingRow> read_forgetting_matrix(const std::string& path);

// Single-row summary written by the eval command.
void write_eval_report(const std::string& path, const std::string& model,
                       const MetricsReport& report);
MetricsReport read_eval_report(const std::string& path, std::string* model = nullptr);

}  // namespace gluco
