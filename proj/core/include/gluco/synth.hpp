#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gluco/data.hpp"

namespace gluco {

// Deterministic synthetic cohort generator. Subjects get a cohort-dependent
// baseline (Healthy lowest, Insulin highest), three meal excursions per day,
// activity bouts that depress glucose after a short lag, AR(1) sensor noise,
// and interior dropout gaps; one gap per subject always exceeds the
// interpolation limit so segment splitting stays exercised.
std::vector<SubjectRecord> synth_generate(std::uint64_t seed, int n_per_cohort, int days);

// Writes per-subject CGM and activity CSVs plus manifest.csv into out_dir
// (created if missing); returns the manifest path.
std::string write_dataset(const std::vector<SubjectRecord>& records, const std::string& out_dir);

}  // namespace gluco
