#include "gluco/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "gluco/csv.hpp"
#include "gluco/rng.hpp"
#include "gluco/tensor.hpp"

namespace gluco {

namespace {

constexpr int kBinsPerDay = 288;
constexpr double kBinMinutes = 5.0;

struct CohortProfile {
    double base_mean;    // mg/dL central tendency
    double meal_amp;     // median meal excursion, mg/dL
    double meal_tau;     // excursion time constant, minutes
    double noise_sd;     // stationary AR(1) sd, mg/dL
};

const CohortProfile kProfiles[4] = {
    {95.0, 45.0, 35.0, 2.0},   // Healthy
    {110.0, 55.0, 45.0, 2.5},  // PreT2DM
    {135.0, 70.0, 60.0, 3.0},  // Oral
    {155.0, 80.0, 75.0, 3.5},  // Insulin
};

// A·(Δ/τ)·e^(1−Δ/τ): zero at onset, peak A at Δ=τ, smooth decay after.
double bump(double delta_min, double amp, double tau) {
    if (delta_min <= 0.0 || delta_min > 8.0 * tau) return 0.0;
    const double r = delta_min / tau;
    return amp * r * std::exp(1.0 - r);
}

SubjectRecord make_subject(std::uint64_t seed, Cohort cohort, int index_in_cohort,
                           int subject_index, int days, std::int64_t start_ts) {
    const CohortProfile& profile = kProfiles[static_cast<int>(cohort)];
    Rng rng = Rng(seed).split("subject", static_cast<std::uint64_t>(subject_index));

    const int n = days * kBinsPerDay;
    const double base = profile.base_mean + rng.normal(0.0, 4.0);

    std::vector<double> glucose(static_cast<std::size_t>(n), base);
    std::vector<double> steps(static_cast<std::size_t>(n), 0.0);

    Rng meal_rng = rng.split("meals");
    for (int day = 0; day < days; ++day) {
        for (double hour : {8.0, 13.0, 19.0}) {
            const double center = day * 1440.0 + hour * 60.0 + meal_rng.normal(0.0, 45.0);
            const double amp = profile.meal_amp * std::exp(meal_rng.normal(0.0, 0.35));
            for (int i = 0; i < n; ++i) {
                glucose[static_cast<std::size_t>(i)] +=
                    bump(i * kBinMinutes - center, amp, profile.meal_tau);
            }
        }
    }

    Rng bout_rng = rng.split("bouts");
    for (int day = 0; day < days; ++day) {
        const int bouts = static_cast<int>(bout_rng.uniform_int(2, 3));
        for (int b = 0; b < bouts; ++b) {
            const double start_min = day * 1440.0 + bout_rng.uniform(7.0 * 60.0, 21.0 * 60.0);
            const int dur_bins = static_cast<int>(bout_rng.uniform_int(4, 12));
            const int first_bin = static_cast<int>(start_min / kBinMinutes);
            for (int k = 0; k < dur_bins; ++k) {
                const int bin = first_bin + k;
                if (bin >= 0 && bin < n) {
                    steps[static_cast<std::size_t>(bin)] +=
                        static_cast<double>(bout_rng.uniform_int(50, 130));
                }
            }
            const double lag = bout_rng.uniform(20.0, 40.0);
            const double dip = bout_rng.uniform(15.0, 35.0);
            const double tau = dur_bins * kBinMinutes;
            for (int i = 0; i < n; ++i) {
                glucose[static_cast<std::size_t>(i)] -=
                    bump(i * kBinMinutes - (start_min + lag), dip, tau);
            }
        }
    }

    Rng noise_rng = rng.split("noise");
    const double phi = 0.8;
    const double innovation_sd = profile.noise_sd * std::sqrt(1.0 - phi * phi);
    double e = noise_rng.normal(0.0, profile.noise_sd);
    for (int i = 0; i < n; ++i) {
        glucose[static_cast<std::size_t>(i)] =
            std::clamp(glucose[static_cast<std::size_t>(i)] + e, 25.0, 590.0);
        e = phi * e + noise_rng.normal(0.0, innovation_sd);
    }

    // interior dropouts only, so the grid span is stable; the first gap always
    // exceeds the 60-minute interpolation limit
    std::vector<bool> dropped(static_cast<std::size_t>(n), false);
    Rng gap_rng = rng.split("gaps");
    const int gaps = std::max(1, (days * 4 + 5) / 10);
    for (int g = 0; g < gaps; ++g) {
        const int len = static_cast<int>(g == 0 ? gap_rng.uniform_int(13, 18)
                                                : gap_rng.uniform_int(2, 18));
        if (len + 2 >= n) continue;
        const int at = static_cast<int>(gap_rng.uniform_int(1, n - len - 2));
        for (int k = 0; k < len; ++k) dropped[static_cast<std::size_t>(at + k)] = true;
    }

    SubjectRecord record;
    record.id = cohort_name(cohort) + "_" + (index_in_cohort < 10 ? "0" : "") +
                std::to_string(index_in_cohort);
    record.cohort = cohort;
    for (int i = 0; i < n; ++i) {
        if (dropped[static_cast<std::size_t>(i)]) continue;
        record.cgm.emplace_back(start_ts + i * kGridSeconds, glucose[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n; ++i) {
        if (steps[static_cast<std::size_t>(i)] > 0.0) {
            record.steps.emplace_back(start_ts + i * kGridSeconds, steps[static_cast<std::size_t>(i)]);
        }
    }
    return record;
}

}  // namespace

std::vector<SubjectRecord> synth_generate(std::uint64_t seed, int n_per_cohort, int days) {
    if (n_per_cohort < 1 || days < 1) {
        throw ContractError("synth_generate needs n_per_cohort >= 1 and days >= 1, got " +
                            std::to_string(n_per_cohort) + " and " + std::to_string(days));
    }
    const std::int64_t start_ts = parse_iso8601_utc("2026-01-01T00:00:00Z");

    std::vector<SubjectRecord> records;
    int subject_index = 0;
    for (Cohort cohort : kCohorts) {
        for (int k = 0; k < n_per_cohort; ++k) {
            records.push_back(make_subject(seed, cohort, k, subject_index++, days, start_ts));
        }
    }
    return records;
}

std::string write_dataset(const std::vector<SubjectRecord>& records, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<ManifestRow> rows;
    for (const SubjectRecord& record : records) {
        ManifestRow row;
        row.subject_id = record.id;
        row.cohort = record.cohort;
        row.cgm_path = "cgm_" + record.id + ".csv";
        row.activity_path = "steps_" + record.id + ".csv";
        write_cgm_csv((fs::path(out_dir) / row.cgm_path).string(), record.cgm);
        write_steps_csv((fs::path(out_dir) / row.activity_path).string(), record.steps);
        rows.push_back(std::move(row));
    }
    const std::string manifest = (fs::path(out_dir) / "manifest.csv").string();
    write_manifest(manifest, rows);
    return manifest;
}

}  // namespace gluco
