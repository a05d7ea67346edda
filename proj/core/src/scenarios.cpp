#include "gluco/scenarios.hpp"

#include <cmath>
#include <future>
#include <iostream>
#include <utility>

#include "gluco/ops.hpp"
#include "gluco/rng.hpp"

namespace gluco {

namespace {

const std::string kScenarioNames[] = {"isolated", "cohort_finetune", "forgetting"};

// Subjects regrouped into the fixed cohort order. global_index is the
// position in the flattened grouping and keys all per-subject seed
// derivations, so a one-subject cohort fine-tunes exactly like an isolated
// run of that subject.
struct Grouped {
    std::vector<std::vector<const PreparedSubject*>> by_cohort;  // kCohorts order, possibly empty
    std::vector<std::pair<const PreparedSubject*, std::size_t>> flat;  // (subject, global_index)
};

Grouped group_subjects(const std::vector<PreparedSubject>& subjects) {
    Grouped g;
    g.by_cohort.resize(kCohorts.size());
    for (std::size_t c = 0; c < kCohorts.size(); ++c) {
        for (const PreparedSubject& s : subjects) {
            if (s.cohort == kCohorts[c]) g.by_cohort[c].push_back(&s);
        }
    }
    for (const auto& cohort : g.by_cohort) {
        for (const PreparedSubject* s : cohort) g.flat.emplace_back(s, g.flat.size());
    }
    return g;
}

std::uint64_t derive_seed(std::uint64_t rep_seed, std::string_view purpose, std::uint64_t idx) {
    return Rng(rep_seed).split(purpose, idx).next_u64();
}

// Raw per-repetition results, index-aligned with the row lists assembled in
// run_scenario so repetitions can merge deterministically.
struct RepResult {
    std::vector<MetricsReport> cohort_reports;
    std::vector<double> subject_rmse;
    std::vector<MetricsReport> forget_reports;
    Checkpoint final_model;  // kept from repetition 0 only
};

MetricsReport pooled_cohort_report(const Forecaster& model,
                                   const std::vector<const PreparedSubject*>& cohort) {
    MetricsAccum accum;
    for (const PreparedSubject* s : cohort) accumulate_evaluation(accum, model, s->test, s->stats);
    return accum.report();
}

RepResult run_rep(Scenario kind, const Grouped& g, const Forecaster& prototype,
                  const TrainConfig& cfg, std::uint64_t rep_seed, bool keep_model) {
    RepResult out;
    std::size_t gi = 0;  // global subject cursor, advanced in flat order

    auto train_subject = [&](Forecaster& model, const PreparedSubject& s, int epochs) {
        train_model(model, s.train, s.stats, cfg, epochs, derive_seed(rep_seed, "shuffle", gi));
    };

    switch (kind) {
        case Scenario::Isolated: {
            std::unique_ptr<Forecaster> last;
            for (const auto& cohort : g.by_cohort) {
                if (cohort.empty()) continue;
                MetricsAccum cohort_accum;
                for (const PreparedSubject* s : cohort) {
                    auto model = prototype.fresh(derive_seed(rep_seed, "init", gi));
                    train_subject(*model, *s, cfg.epochs);
                    MetricsAccum sub;
                    accumulate_evaluation(sub, *model, s->test, s->stats);
                    out.subject_rmse.push_back(sub.report().rmse);
                    cohort_accum.merge(sub);
                    last = std::move(model);
                    ++gi;
                }
                out.cohort_reports.push_back(cohort_accum.report());
            }
            if (keep_model) out.final_model = last->to_checkpoint();
            break;
        }
        case Scenario::CohortFinetune: {
            std::unique_ptr<Forecaster> last;
            for (const auto& cohort : g.by_cohort) {
                if (cohort.empty()) continue;
                auto model = prototype.fresh(derive_seed(rep_seed, "init", gi));
                MetricsAccum cohort_accum;
                for (std::size_t k = 0; k < cohort.size(); ++k) {
                    const PreparedSubject* s = cohort[k];
                    train_subject(*model, *s, k == 0 ? cfg.epochs : cfg.effective_finetune_epochs());
                    MetricsAccum sub;
                    accumulate_evaluation(sub, *model, s->test, s->stats);
                    out.subject_rmse.push_back(sub.report().rmse);
                    cohort_accum.merge(sub);
                    ++gi;
                }
                out.cohort_reports.push_back(cohort_accum.report());
                last = std::move(model);
            }
            if (keep_model) out.final_model = last->to_checkpoint();
            break;
        }
        case Scenario::Forgetting: {
            auto model = prototype.fresh(derive_seed(rep_seed, "init", 0));
            for (std::size_t j = 0; j < g.by_cohort.size(); ++j) {
                for (const PreparedSubject* s : g.by_cohort[j]) {
                    train_subject(*model, *s, gi == 0 ? cfg.epochs : cfg.effective_finetune_epochs());
                    ++gi;
                }
                for (std::size_t i = 0; i <= j; ++i) {
                    MetricsReport r = pooled_cohort_report(*model, g.by_cohort[i]);
                    out.forget_reports.push_back(r);
                    if (i == j) out.cohort_reports.push_back(r);
                }
            }
            if (keep_model) out.final_model = model->to_checkpoint();
            break;
        }
    }
    return out;
}

AggMetrics aggregate(const std::vector<MetricsReport>& reps) {
    AggMetrics agg;
    const double n = static_cast<double>(reps.size());
    std::size_t steps = 0;
    for (const MetricsReport& r : reps) {
        agg.rmse_mean += r.rmse;
        agg.mae_mean += r.mae;
        agg.pearson_mean += r.pearson;
        steps = std::max(steps, r.rmse_per_step.size());
    }
    agg.rmse_mean /= n;
    agg.mae_mean /= n;
    agg.pearson_mean /= n;
    agg.rmse_per_step_mean.assign(steps, 0.0);
    for (const MetricsReport& r : reps) {
        for (std::size_t s = 0; s < r.rmse_per_step.size(); ++s) {
            agg.rmse_per_step_mean[s] += r.rmse_per_step[s] / n;
        }
    }
    if (reps.size() > 1) {
        double vr = 0, vm = 0, vp = 0;
        for (const MetricsReport& r : reps) {
            vr += (r.rmse - agg.rmse_mean) * (r.rmse - agg.rmse_mean);
            vm += (r.mae - agg.mae_mean) * (r.mae - agg.mae_mean);
            vp += (r.pearson - agg.pearson_mean) * (r.pearson - agg.pearson_mean);
        }
        agg.rmse_sd = std::sqrt(vr / (n - 1));
        agg.mae_sd = std::sqrt(vm / (n - 1));
        agg.pearson_sd = std::sqrt(vp / (n - 1));
    }
    return agg;
}

}  // namespace

const std::string& scenario_name(Scenario s) {
    return kScenarioNames[static_cast<int>(s)];
}

Scenario parse_scenario(const std::string& name) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (name == kScenarioNames[i]) return static_cast<Scenario>(i);
    }
    throw ContractError("unknown scenario '" + name +
                        "' (expected isolated, cohort_finetune, or forgetting)");
}

std::vector<PreparedSubject> prepare_subjects(const std::vector<SubjectRecord>& records,
                                              const PipelineOptions& opt) {
    std::vector<PreparedSubject> out;
    out.reserve(records.size());
    for (const SubjectRecord& rec : records) {
        try {
            PreparedSubject p = prepare_subject(rec, opt);
            if (p.test.empty() || p.train.empty()) {
                std::cerr << "warning: subject " << rec.id << " has an empty split, skipping\n";
                continue;
            }
            out.push_back(std::move(p));
        } catch (const std::exception& e) {
            std::cerr << "warning: subject " << rec.id << " skipped: " << e.what() << "\n";
        }
    }
    return out;
}

ScenarioOutput run_scenario(Scenario kind, const std::vector<PreparedSubject>& subjects,
                            const Forecaster& prototype, const TrainConfig& cfg, int workers) {
    if (subjects.empty()) throw ContractError("scenario run needs at least one usable subject");
    if (cfg.repetitions < 1) throw ContractError("scenario run needs repetitions >= 1");

    const Grouped g = group_subjects(subjects);
    if (kind == Scenario::Forgetting) {
        for (std::size_t c = 0; c < kCohorts.size(); ++c) {
            if (g.by_cohort[c].empty()) {
                throw ContractError("forgetting scenario requires all four cohorts; missing " +
                                    cohort_name(kCohorts[c]));
            }
        }
    }

    const int reps = cfg.repetitions;
    std::vector<RepResult> results(static_cast<std::size_t>(reps));
    auto rep_task = [&](int r) {
        return run_rep(kind, g, prototype, cfg, cfg.seed + static_cast<std::uint64_t>(r), r == 0);
    };
    if (workers <= 1) {
        for (int r = 0; r < reps; ++r) results[static_cast<std::size_t>(r)] = rep_task(r);
    } else {
        for (int base = 0; base < reps; base += workers) {
            std::vector<std::future<RepResult>> futs;
            for (int r = base; r < std::min(reps, base + workers); ++r) {
                futs.push_back(std::async(std::launch::async, rep_task, r));
            }
            for (std::size_t k = 0; k < futs.size(); ++k) {
                results[static_cast<std::size_t>(base) + k] = futs[k].get();
            }
        }
    }

    ScenarioOutput out;
    out.final_model = std::move(results[0].final_model);

    std::vector<MetricsReport> slot(static_cast<std::size_t>(reps));
    for (std::size_t c = 0, row = 0; c < g.by_cohort.size(); ++c) {
        if (g.by_cohort[c].empty()) continue;
        for (int r = 0; r < reps; ++r) {
            slot[static_cast<std::size_t>(r)] = results[static_cast<std::size_t>(r)].cohort_reports[row];
        }
        out.cohorts.push_back({kCohorts[c], aggregate(slot)});
        ++row;
    }

    if (kind != Scenario::Forgetting) {
        std::size_t flat = 0;
        for (std::size_t c = 0; c < g.by_cohort.size(); ++c) {
            for (std::size_t k = 0; k < g.by_cohort[c].size(); ++k, ++flat) {
                double mean = 0;
                for (const RepResult& r : results) mean += r.subject_rmse[flat];
                out.subjects.push_back({kCohorts[c], static_cast<int>(k),
                                        g.by_cohort[c][k]->id,
                                        mean / static_cast<double>(reps)});
            }
        }
    }

    if (kind == Scenario::Forgetting) {
        std::size_t row = 0;
        for (std::size_t j = 0; j < kCohorts.size(); ++j) {
            for (std::size_t i = 0; i <= j; ++i, ++row) {
                for (int r = 0; r < reps; ++r) {
                    slot[static_cast<std::size_t>(r)] =
                        results[static_cast<std::size_t>(r)].forget_reports[row];
                }
                out.forgetting.push_back({kCohorts[j], kCohorts[i], aggregate(slot)});
            }
        }
    }
    return out;
}

}  // namespace gluco
