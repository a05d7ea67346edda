#include "gluco/forecaster.hpp"

#include <charconv>

namespace gluco {

namespace {

int config_int(const Checkpoint& ckpt, const std::string& key) {
    const std::string* v = ckpt.find_config(key);
    if (!v) throw CheckpointError("checkpoint config misses '" + key + "'");
    int out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
        throw CheckpointError("checkpoint config '" + key + "' is not an integer: " + *v);
    }
    return out;
}

std::vector<int> parse_scales(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string tok = csv.substr(pos, comma == std::string::npos ? csv.size() - pos : comma - pos);
        int v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw CheckpointError("bad scales list: " + csv);
        }
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string scales_csv(const std::vector<int>& scales) {
    std::string out;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(scales[i]);
    }
    return out;
}

class AttenGlucoForecaster final : public Forecaster {
public:
    AttenGlucoForecaster(const ModelConfig& cfg, std::uint64_t seed)
        : model_(cfg, Rng(seed)), name_("attengluco") {}

    Tensor predict(const Tensor& g, const Tensor& ws, const Tensor& wi) const override {
        return model_.forward(g, ws, wi);
    }
    ParamList& params() override { return model_.params(); }
    const std::string& name() const override { return name_; }
    int window() const override { return model_.config().t; }
    int horizon() const override { return model_.config().horizon; }

    Checkpoint to_checkpoint() const override {
        const ModelConfig& c = model_.config();
        Checkpoint ckpt;
        ckpt.model = name_;
        ckpt.config = {{"t", std::to_string(c.t)},
                       {"d_model", std::to_string(c.d_model)},
                       {"heads", std::to_string(c.heads)},
                       {"horizon", std::to_string(c.horizon)},
                       {"d_ff", std::to_string(c.d_ff)},
                       {"scales", scales_csv(c.scales)}};
        for (const NamedParam& p : model_.params()) ckpt.blocks.emplace_back(p.name, p.tensor);
        ckpt.blocks.emplace_back("pos", model_.positional());
        return ckpt;
    }

    std::unique_ptr<Forecaster> fresh(std::uint64_t seed) const override {
        return std::make_unique<AttenGlucoForecaster>(model_.config(), seed);
    }

    AttenGluco& model() { return model_; }

private:
    AttenGluco model_;
    std::string name_;
};

class BaselineForecaster final : public Forecaster {
public:
    BaselineForecaster(const BaselineConfig& cfg, std::uint64_t seed)
        : model_(cfg, Rng(seed)), name_("baseline") {}

    Tensor predict(const Tensor& g, const Tensor& ws, const Tensor& wi) const override {
        return model_.forward(g, ws, wi);
    }
    ParamList& params() override { return model_.params(); }
    const std::string& name() const override { return name_; }
    int window() const override { return model_.config().t; }
    int horizon() const override { return model_.config().horizon; }

    Checkpoint to_checkpoint() const override {
        const BaselineConfig& c = model_.config();
        Checkpoint ckpt;
        ckpt.model = name_;
        ckpt.config = {{"t", std::to_string(c.t)}, {"horizon", std::to_string(c.horizon)}};
        for (const NamedParam& p : model_.params()) ckpt.blocks.emplace_back(p.name, p.tensor);
        return ckpt;
    }

    std::unique_ptr<Forecaster> fresh(std::uint64_t seed) const override {
        return std::make_unique<BaselineForecaster>(model_.config(), seed);
    }

    CnnLstmBaseline& model() { return model_; }

private:
    CnnLstmBaseline model_;
    std::string name_;
};

}  // namespace

std::unique_ptr<Forecaster> make_attengluco(const ModelConfig& cfg, std::uint64_t seed) {
    return std::make_unique<AttenGlucoForecaster>(cfg, seed);
}

std::unique_ptr<Forecaster> make_baseline(const BaselineConfig& cfg, std::uint64_t seed) {
    return std::make_unique<BaselineForecaster>(cfg, seed);
}

std::unique_ptr<Forecaster> from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.model == "attengluco") {
        ModelConfig cfg;
        cfg.t = config_int(ckpt, "t");
        cfg.d_model = config_int(ckpt, "d_model");
        cfg.heads = config_int(ckpt, "heads");
        cfg.horizon = config_int(ckpt, "horizon");
        cfg.d_ff = config_int(ckpt, "d_ff");
        const std::string* scales = ckpt.find_config("scales");
        if (!scales) throw CheckpointError("checkpoint config misses 'scales'");
        cfg.scales = parse_scales(*scales);

        auto fc = std::make_unique<AttenGlucoForecaster>(cfg, 0);
        for (const auto& [name, block] : ckpt.blocks) {
            if (name == "pos") {
                if (block.shape() != fc->model().positional().shape()) {
                    throw CheckpointError("positional block has shape " + shape_str(block.shape()) +
                                          ", expected " + shape_str(fc->model().positional().shape()));
                }
                continue;  // recomputed from config
            }
            fc->model().load_block(name, block);
        }
        return fc;
    }
    if (ckpt.model == "baseline") {
        BaselineConfig cfg;
        cfg.t = config_int(ckpt, "t");
        cfg.horizon = config_int(ckpt, "horizon");
        auto fc = std::make_unique<BaselineForecaster>(cfg, 0);
        for (const auto& [name, block] : ckpt.blocks) fc->model().load_block(name, block);
        return fc;
    }
    throw CheckpointError("unknown model in checkpoint: " + ckpt.model);
}

}  // namespace gluco
