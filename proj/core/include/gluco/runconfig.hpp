#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gluco/data.hpp"
#include "gluco/model.hpp"
#include "gluco/scenarios.hpp"
#include "gluco/train.hpp"

namespace gluco {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelSelector { AttenGluco, Baseline, Both };

// Flat key=value run configuration. Every key has a default; unknown keys
// and unparsable values are all collected before the parse fails, so one
// round trip fixes every mistake in the file.
struct RunConfig {
    std::string manifest;                    // data.manifest
    PipelineOptions pipeline;                // data.stride, data.split_fraction,
                                             // data.interval_cap_minutes, data.max_gap_minutes,
                                             // window.t, window.ph_minutes (-> m)
    int ph_minutes = 30;
    ModelSelector models = ModelSelector::Both;  // model.kind
    int d_model = 64;                        // model.d_model
    int heads = 4;                           // model.heads
    int d_ff = 256;                          // model.d_ff
    TrainConfig train;                       // train.*, run.seed
    Scenario scenario = Scenario::Isolated;  // run.scenario
    int workers = 1;                         // runtime.workers

    ModelConfig model_config() const;
    BaselineConfig baseline_config() const;
};

// Parses `key = value` lines ('#' starts a comment, blank lines ignored).
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_run_config(const std::string& path);

// One "key = value" line per setting, parseable by parse_run_config_text.
std::string describe_run_config(const RunConfig& cfg);

}  // namespace gluco
