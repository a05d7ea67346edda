#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gluco/data.hpp"

namespace gluco {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

struct CgmSeries {
    std::vector<std::pair<std::int64_t, double>> samples;  // sorted, deduplicated
    int dropped = 0;                                       // out-of-range readings
};

// Header `timestamp,glucose_mg_dl`; rows sorted, duplicate timestamps keep
// the last value, readings outside (20, 600) mg/dL are dropped and counted.
CgmSeries load_cgm_csv(const std::string& path);

// Header `timestamp,steps`; rows sorted, counts must be non-negative.
std::vector<std::pair<std::int64_t, double>> load_steps_csv(const std::string& path);

void write_cgm_csv(const std::string& path,
                   const std::vector<std::pair<std::int64_t, double>>& samples);
void write_steps_csv(const std::string& path,
                     const std::vector<std::pair<std::int64_t, double>>& samples);

struct ManifestRow {
    std::string subject_id;
    Cohort cohort = Cohort::Healthy;
    std::string cgm_path;       // relative to the manifest's directory
    std::string activity_path;
};

// Header `subject_id,cohort,cgm_path,activity_path`.
std::vector<ManifestRow> load_manifest(const std::string& path);
void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows);

// Reads one subject's series, resolving the row's paths against manifest_dir.
SubjectRecord load_subject(const ManifestRow& row, const std::string& manifest_dir);

// Convenience: load every subject listed in a manifest file.
std::vector<SubjectRecord> load_dataset(const std::string& manifest_path);

}  // namespace gluco
