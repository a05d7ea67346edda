#include "gluco/runconfig.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "gluco/csv.hpp"

namespace gluco {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    RunConfig cfg;
    std::vector<std::string> errors;
    std::string origin;
    int line_no = 0;

    void fail(const std::string& msg) {
        errors.push_back(origin + ":" + std::to_string(line_no) + ": " + msg);
    }

    template <typename T>
    bool number(const std::string& key, const std::string& value, T& out) {
        T v{};
        const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || p != value.data() + value.size()) {
            fail(key + ": cannot parse '" + value + "'");
            return false;
        }
        out = v;
        return true;
    }

    void apply(const std::string& key, const std::string& value) {
        if (key == "data.manifest") {
            cfg.manifest = value;
        } else if (key == "data.stride") {
            number(key, value, cfg.pipeline.stride);
        } else if (key == "data.split_fraction") {
            number(key, value, cfg.pipeline.split_fraction);
        } else if (key == "data.interval_cap_minutes") {
            number(key, value, cfg.pipeline.interval_cap_minutes);
        } else if (key == "data.max_gap_minutes") {
            number(key, value, cfg.pipeline.max_gap_minutes);
        } else if (key == "window.t") {
            number(key, value, cfg.pipeline.t);
        } else if (key == "window.ph_minutes") {
            number(key, value, cfg.ph_minutes);
        } else if (key == "model.kind") {
            if (value == "attengluco") {
                cfg.models = ModelSelector::AttenGluco;
            } else if (value == "baseline") {
                cfg.models = ModelSelector::Baseline;
            } else if (value == "both") {
                cfg.models = ModelSelector::Both;
            } else {
                fail("model.kind: expected attengluco, baseline, or both; got '" + value + "'");
            }
        } else if (key == "model.d_model") {
            number(key, value, cfg.d_model);
        } else if (key == "model.heads") {
            number(key, value, cfg.heads);
        } else if (key == "model.d_ff") {
            number(key, value, cfg.d_ff);
        } else if (key == "train.epochs") {
            number(key, value, cfg.train.epochs);
        } else if (key == "train.learning_rate") {
            number(key, value, cfg.train.learning_rate);
        } else if (key == "train.batch_size") {
            number(key, value, cfg.train.batch_size);
        } else if (key == "train.repetitions") {
            number(key, value, cfg.train.repetitions);
        } else if (key == "train.finetune_epochs") {
            number(key, value, cfg.train.finetune_epochs);
        } else if (key == "train.clip_norm") {
            number(key, value, cfg.train.clip_norm);
        } else if (key == "run.scenario") {
            try {
                cfg.scenario = parse_scenario(value);
            } catch (const std::exception&) {
                fail("run.scenario: expected isolated, cohort_finetune, or forgetting; got '" +
                     value + "'");
            }
        } else if (key == "run.seed") {
            number(key, value, cfg.train.seed);
        } else if (key == "runtime.workers") {
            number(key, value, cfg.workers);
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    void validate() {
        line_no = 0;  // post-parse checks carry no useful line
        auto check = [&](bool ok, const std::string& msg) {
            if (!ok) errors.push_back(origin + ": " + msg);
        };
        check(cfg.pipeline.t >= 2, "window.t must be >= 2");
        check(cfg.ph_minutes >= 5 && cfg.ph_minutes % 5 == 0,
              "window.ph_minutes must be a positive multiple of 5");
        check(cfg.pipeline.stride >= 1, "data.stride must be >= 1");
        check(cfg.pipeline.split_fraction > 0.0 && cfg.pipeline.split_fraction < 1.0,
              "data.split_fraction must lie in (0, 1)");
        check(cfg.pipeline.interval_cap_minutes > 0, "data.interval_cap_minutes must be > 0");
        check(cfg.pipeline.max_gap_minutes >= 0, "data.max_gap_minutes must be >= 0");
        check(cfg.d_model >= 2, "model.d_model must be >= 2");
        check(cfg.heads >= 1, "model.heads must be >= 1");
        check(cfg.d_ff >= 1, "model.d_ff must be >= 1");
        check(cfg.train.epochs >= 1, "train.epochs must be >= 1");
        check(cfg.train.learning_rate > 0, "train.learning_rate must be > 0");
        check(cfg.train.batch_size >= 1, "train.batch_size must be >= 1");
        check(cfg.train.repetitions >= 1, "train.repetitions must be >= 1");
        check(cfg.train.finetune_epochs >= 0, "train.finetune_epochs must be >= 0");
        check(cfg.train.clip_norm >= 0, "train.clip_norm must be >= 0");
        check(cfg.workers >= 1, "runtime.workers must be >= 1");
        if (errors.empty()) cfg.pipeline.m = cfg.ph_minutes / 5;
    }
};

}  // namespace

ModelConfig RunConfig::model_config() const {
    ModelConfig mc;
    mc.t = pipeline.t;
    mc.d_model = d_model;
    mc.heads = heads;
    mc.horizon = ph_minutes / 5;
    mc.d_ff = d_ff;
    return mc;
}

BaselineConfig RunConfig::baseline_config() const {
    BaselineConfig bc;
    bc.t = pipeline.t;
    bc.horizon = ph_minutes / 5;
    return bc;
}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    Parser p;
    p.origin = origin;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++p.line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            p.fail("expected key = value, got '" + line + "'");
            continue;
        }
        p.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    p.validate();
    if (!p.errors.empty()) {
        std::string joined = "invalid config:";
        for (const std::string& e : p.errors) joined += "\n  " + e;
        throw ConfigError(joined);
    }
    return p.cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config_text(buf.str(), path);
}

std::string describe_run_config(const RunConfig& cfg) {
    static const char* kKinds[] = {"attengluco", "baseline", "both"};
    std::ostringstream out;
    out << "data.manifest = " << cfg.manifest << "\n"
        << "data.stride = " << cfg.pipeline.stride << "\n"
        << "data.split_fraction = " << format_double(cfg.pipeline.split_fraction) << "\n"
        << "data.interval_cap_minutes = " << format_double(cfg.pipeline.interval_cap_minutes) << "\n"
        << "data.max_gap_minutes = " << format_double(cfg.pipeline.max_gap_minutes) << "\n"
        << "window.t = " << cfg.pipeline.t << "\n"
        << "window.ph_minutes = " << cfg.ph_minutes << "\n"
        << "model.kind = " << kKinds[static_cast<int>(cfg.models)] << "\n"
        << "model.d_model = " << cfg.d_model << "\n"
        << "model.heads = " << cfg.heads << "\n"
        << "model.d_ff = " << cfg.d_ff << "\n"
        << "train.epochs = " << cfg.train.epochs << "\n"
        << "train.learning_rate = " << format_double(cfg.train.learning_rate) << "\n"
        << "train.batch_size = " << cfg.train.batch_size << "\n"
        << "train.repetitions = " << cfg.train.repetitions << "\n"
        << "train.finetune_epochs = " << cfg.train.finetune_epochs << "\n"
        << "train.clip_norm = " << format_double(cfg.train.clip_norm) << "\n"
        << "run.scenario = " << scenario_name(cfg.scenario) << "\n"
        << "run.seed = " << cfg.train.seed << "\n"
        << "runtime.workers = " << cfg.workers << "\n";
    return out.str();
}

}  // namespace gluco
