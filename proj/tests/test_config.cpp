#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gluco/runconfig.hpp"

using namespace gluco;

TEST_CASE("empty config yields the documented defaults") {
    const RunConfig cfg = parse_run_config_text("");
    CHECK(cfg.manifest.empty());
    CHECK(cfg.pipeline.t == 80);
    CHECK(cfg.ph_minutes == 30);
    CHECK(cfg.pipeline.m == 6);
    CHECK(cfg.pipeline.stride == 1);
    CHECK(cfg.pipeline.split_fraction == 0.85);
    CHECK(cfg.pipeline.interval_cap_minutes == 720.0);
    CHECK(cfg.pipeline.max_gap_minutes == 60.0);
    CHECK(cfg.models == ModelSelector::Both);
    CHECK(cfg.d_model == 64);
    CHECK(cfg.heads == 4);
    CHECK(cfg.d_ff == 256);
    CHECK(cfg.train.epochs == 300);
    CHECK(cfg.train.learning_rate == 0.001);
    CHECK(cfg.train.batch_size == 32);
    CHECK(cfg.train.repetitions == 5);
    CHECK(cfg.train.finetune_epochs == 0);
    CHECK(cfg.train.effective_finetune_epochs() == 300);
    CHECK(cfg.train.clip_norm == 0.0);
    CHECK(cfg.scenario == Scenario::Isolated);
    CHECK(cfg.train.seed == 1);
    CHECK(cfg.workers == 1);
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
    const RunConfig cfg = parse_run_config_text(
        "# experiment setup\n"
        "\n"
        "  window.t   =  40   # shorter history\n"
        "window.ph_minutes=10\n"
        "model.kind = baseline\n"
        "train.finetune_epochs = 25\n"
        "run.scenario = cohort_finetune\n"
        "run.seed = 99\n");
    CHECK(cfg.pipeline.t == 40);
    CHECK(cfg.ph_minutes == 10);
    CHECK(cfg.pipeline.m == 2);
    CHECK(cfg.models == ModelSelector::Baseline);
    CHECK(cfg.train.effective_finetune_epochs() == 25);
    CHECK(cfg.scenario == Scenario::CohortFinetune);
    CHECK(cfg.train.seed == 99);
}

TEST_CASE("every offending line is reported at once") {
    try {
        parse_run_config_text(
            "windw.t = 40\n"
            "model.d_model = fast\n"
            "run.scenario = mixed\n"
            "banana\n",
            "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("bad.cfg:1: unknown key 'windw.t'") != std::string::npos);
        CHECK(msg.find("bad.cfg:2: model.d_model: cannot parse 'fast'") != std::string::npos);
        CHECK(msg.find("bad.cfg:3: run.scenario") != std::string::npos);
        CHECK(msg.find("bad.cfg:4: expected key = value") != std::string::npos);
    }
}

TEST_CASE("semantic validation catches out-of-range values") {
    CHECK_THROWS_WITH_AS(parse_run_config_text("window.ph_minutes = 7\n"),
                         doctest::Contains("positive multiple of 5"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config_text("train.epochs = 0\n"),
                         doctest::Contains("train.epochs"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config_text("data.split_fraction = 1.5\n"),
                         doctest::Contains("split_fraction"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config_text("runtime.workers = 0\n"),
                         doctest::Contains("runtime.workers"), ConfigError);

    // several semantic problems surface together
    try {
        parse_run_config_text("train.epochs = 0\ntrain.batch_size = -3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("train.epochs") != std::string::npos);
        CHECK(msg.find("train.batch_size") != std::string::npos);
    }
}

TEST_CASE("prediction horizon maps onto model output counts") {
    for (const auto& [ph, m] : std::vector<std::pair<int, int>>{{5, 1}, {30, 6}, {60, 12}}) {
        const RunConfig cfg =
            parse_run_config_text("window.ph_minutes = " + std::to_string(ph) + "\n");
        CHECK(cfg.model_config().horizon == m);
        CHECK(cfg.baseline_config().horizon == m);
        CHECK(cfg.pipeline.m == m);
        CHECK(cfg.model_config().t == 80);
    }
}

TEST_CASE("describe/parse round-trips a customized config") {
    RunConfig cfg = parse_run_config_text(
        "data.manifest = /tmp/set/manifest.csv\n"
        "data.stride = 3\n"
        "window.t = 48\n"
        "window.ph_minutes = 15\n"
        "model.kind = attengluco\n"
        "model.d_model = 24\n"
        "model.heads = 3\n"
        "model.d_ff = 48\n"
        "train.epochs = 12\n"
        "train.learning_rate = 0.002\n"
        "train.clip_norm = 10\n"
        "run.scenario = forgetting\n"
        "run.seed = 1234\n"
        "runtime.workers = 4\n");
    const RunConfig back = parse_run_config_text(describe_run_config(cfg));
    CHECK(back.manifest == cfg.manifest);
    CHECK(back.pipeline.stride == 3);
    CHECK(back.pipeline.t == 48);
    CHECK(back.ph_minutes == 15);
    CHECK(back.models == ModelSelector::AttenGluco);
    CHECK(back.d_model == 24);
    CHECK(back.heads == 3);
    CHECK(back.d_ff == 48);
    CHECK(back.train.epochs == 12);
    CHECK(back.train.learning_rate == 0.002);
    CHECK(back.train.clip_norm == 10.0);
    CHECK(back.scenario == Scenario::Forgetting);
    CHECK(back.train.seed == 1234);
    CHECK(back.workers == 4);
}

TEST_CASE("missing config files are reported by path") {
    CHECK_THROWS_WITH_AS(load_run_config("/nonexistent/gluco.cfg"),
                         doctest::Contains("/nonexistent/gluco.cfg"), ConfigError);
}
