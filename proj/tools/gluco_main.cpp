#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "gluco/csv.hpp"
#include "gluco/forecaster.hpp"
#include "gluco/grad_check.hpp"
#include "gluco/gradcheck_suite.hpp"
#include "gluco/metrics.hpp"
#include "gluco/reports.hpp"
#include "gluco/runconfig.hpp"
#include "gluco/scenarios.hpp"
#include "gluco/synth.hpp"

namespace {

using namespace gluco;

int cmd_synth(std::uint64_t seed, int subjects, int days, const std::string& out) {
    const auto records = synth_generate(seed, subjects, days);
    const std::string manifest = write_dataset(records, out);
    std::cout << "wrote " << records.size() << " subjects, manifest " << manifest << "\n";
    return 0;
}

void print_summary(const ReportBundle& bundle) {
    if (!bundle.metrics_by_cohort.empty()) {
        std::printf("%-10s %-12s %10s %10s %10s\n", "cohort", "model", "rmse", "mae", "pearson");
        for (const MetricsByCohortRow& r : bundle.metrics_by_cohort) {
            std::printf("%-10s %-12s %10.4f %10.4f %10.4f\n", r.cohort.c_str(), r.model.c_str(),
                        r.rmse, r.mae, r.pearson);
        }
    }
    if (!bundle.forgetting.empty()) {
        std::printf("\n%-12s %-12s %-12s %10s\n", "model", "trained", "evaluated", "rmse");
        for (const ForgettingRow& r : bundle.forgetting) {
            std::printf("%-12s %-12s %-12s %10.4f\n", r.model.c_str(), r.trained_through.c_str(),
                        r.evaluated_on.c_str(), r.rmse);
        }
    }
}

int cmd_experiment(const std::string& config_path, const std::string& out, bool seed_set,
                   std::uint64_t seed) {
    RunConfig rc = load_run_config(config_path);
    if (seed_set) rc.train.seed = seed;
    if (rc.manifest.empty()) {
        throw ConfigError("data.manifest must point at a dataset manifest");
    }

    const auto records = load_dataset(rc.manifest);
    const auto subjects = prepare_subjects(records, rc.pipeline);
    if (subjects.empty()) throw ContractError("no usable subjects in " + rc.manifest);

    std::filesystem::create_directories(out);

    std::vector<std::unique_ptr<Forecaster>> prototypes;
    if (rc.models != ModelSelector::Baseline) {
        prototypes.push_back(make_attengluco(rc.model_config(), 0));
    }
    if (rc.models != ModelSelector::AttenGluco) {
        prototypes.push_back(make_baseline(rc.baseline_config(), 0));
    }

    ReportBundle bundle;
    for (const auto& proto : prototypes) {
        std::cout << "running " << scenario_name(rc.scenario) << " for " << proto->name() << " ("
                  << subjects.size() << " subjects, " << rc.train.repetitions << " reps)\n";
        ScenarioOutput so = run_scenario(rc.scenario, subjects, *proto, rc.train, rc.workers);
        bundle.append(so, proto->name());
        save_checkpoint(out + "/" + proto->name() + ".ckpt", so.final_model);
    }
    bundle.write_all(out);
    std::ofstream(out + "/run_config.txt", std::ios::binary) << describe_run_config(rc);

    print_summary(bundle);
    std::cout << "reports written to " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& manifest, const std::string& split,
             int ph_minutes, const std::string& out) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const auto model = from_checkpoint(ckpt);
    if (ph_minutes > 0 && ph_minutes != model->horizon() * 5) {
        throw ConfigError("checkpoint forecasts " + std::to_string(model->horizon() * 5) +
                          " minutes, not the requested " + std::to_string(ph_minutes));
    }

    PipelineOptions opt;
    opt.t = model->window();
    opt.m = model->horizon();
    const auto subjects = prepare_subjects(load_dataset(manifest), opt);
    if (subjects.empty()) throw ContractError("no usable subjects in " + manifest);

    MetricsAccum accum;
    for (const PreparedSubject& s : subjects) {
        accumulate_evaluation(accum, *model, split == "train" ? s.train : s.test, s.stats);
    }
    const MetricsReport report = accum.report();

    std::printf("%s on %s split: rmse %.4f mae %.4f pearson %.4f (%zu windows)\n",
                model->name().c_str(), split.c_str(), report.rmse, report.mae, report.pearson,
                report.n_windows);
    if (!out.empty()) {
        std::filesystem::create_directories(out);
        write_eval_report(out + "/eval_report.csv", model->name(), report);
    }
    return 0;
}

int cmd_gradcheck(std::uint64_t seed, bool inject_fault) {
    set_backward_fault_injection(inject_fault);
    const SuiteResult res = run_gradcheck_suite(seed);
    set_backward_fault_injection(false);
    for (const SuiteEntry& e : res.entries) {
        std::printf("%-28s %-4s max rel err %.3e over %zu coords\n", e.name.c_str(),
                    e.ok ? "ok" : "FAIL", e.max_rel_err, e.coords);
    }
    if (!res.all_ok()) {
        std::cout << "gradcheck FAILED\n";
        return 1;
    }
    std::cout << "gradcheck passed (" << res.entries.size() << " entries)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glucose forecasting laboratory"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out, config_path, ckpt_path, manifest, split = "test";
    int subjects = 8, days = 10, ph_minutes = 0;
    bool inject_fault = false;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort dataset");
    synth->add_option("--seed", seed, "root seed")->capture_default_str();
    synth->add_option("--subjects", subjects, "subjects per cohort")->capture_default_str();
    synth->add_option("--days", days, "days of monitoring per subject")->capture_default_str();
    synth->add_option("--out", out, "output directory")->required();

    CLI::App* experiment = app.add_subcommand("experiment", "run a training scenario");
    experiment->add_option("--config", config_path, "key=value run config")->required();
    experiment->add_option("--out", out, "report directory")->required();
    CLI::Option* seed_opt =
        experiment->add_option("--seed", seed, "override run.seed from the config");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
    eval->add_option("--manifest", manifest, "dataset manifest")->required();
    eval->add_option("--split", split, "train or test")
        ->check(CLI::IsMember({"train", "test"}))
        ->capture_default_str();
    eval->add_option("--ph", ph_minutes, "expected prediction horizon in minutes (sanity check)");
    eval->add_option("--out", out, "directory for eval_report.csv");

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gradcheck->add_option("--seed", seed, "root seed")->capture_default_str();
    gradcheck->add_flag("--inject-fault", inject_fault,
                        "corrupt one backward rule to prove the audit can fail");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(seed, subjects, days, out);
        if (experiment->parsed()) {
            return cmd_experiment(config_path, out, seed_opt->count() > 0, seed);
        }
        if (eval->parsed()) return cmd_eval(ckpt_path, manifest, split, ph_minutes, out);
        if (gradcheck->parsed()) return cmd_gradcheck(seed, inject_fault);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
