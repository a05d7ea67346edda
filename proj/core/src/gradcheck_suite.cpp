#include "gluco/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>

#include "gluco/baseline.hpp"
#include "gluco/grad_check.hpp"
#include "gluco/model.hpp"
#include "gluco/ops.hpp"
#include "gluco/rng.hpp"

namespace gluco {

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
    return t;
}

// keeps relu inputs away from the kink so central differences stay valid
Tensor random_off_kink(Rng& rng, Shape shape) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double mag = rng.uniform(0.05, 1.0);
        t.data()[i] = rng.uniform() < 0.5 ? -mag : mag;
    }
    return t;
}

struct Suite {
    std::vector<SuiteEntry> entries;

    void fold(const std::string& name, const GradCheckResult& res) {
        for (SuiteEntry& e : entries) {
            if (e.name == name) {
                e.max_rel_err = std::max(e.max_rel_err, res.max_rel_err);
                e.coords += res.coords_checked;
                e.ok = e.ok && res.ok;
                return;
            }
        }
        entries.push_back({name, res.max_rel_err, res.coords_checked, res.ok});
    }

    void check(const std::string& name, const std::function<Tensor()>& fn,
               const std::vector<Tensor>& inputs, std::size_t sample = 0) {
        fold(name, grad_check(fn, inputs, 1e-4, 1e-5, sample));
    }
};

void op_round(Suite& suite, Rng& rng) {
    const int p = static_cast<int>(rng.uniform_int(2, 5));
    const int q = static_cast<int>(rng.uniform_int(2, 5));
    const int r = static_cast<int>(rng.uniform_int(1, 4));

    {
        Tensor a = random_tensor(rng, Shape{p, q});
        Tensor b = random_tensor(rng, Shape{p, q});
        suite.check("add", [&] { return mean_all(add(a, b)); }, {a, b});
        suite.check("sub", [&] { return mean_all(sub(a, b)); }, {a, b});
        suite.check("mul", [&] { return mean_all(mul(a, b)); }, {a, b});
        suite.check("scale", [&] { return scale(mean_all(a), 2.5); }, {a});
    }
    {
        Tensor a = random_tensor(rng, Shape{p, q});
        Tensor b = random_tensor(rng, Shape{q, r});
        suite.check("matmul", [&] { return mean_all(matmul(a, b)); }, {a, b});
    }
    {
        Tensor x = random_tensor(rng, Shape{p, q});
        suite.check("softmax_rows", [&] { return sum_all(mul(softmax_rows(x), x)); }, {x});
    }
    {
        Tensor x = random_tensor(rng, Shape{p, q});
        Tensor g = random_tensor(rng, Shape{q}, 0.5, 1.5);
        Tensor b = random_tensor(rng, Shape{q});
        suite.check("layer_norm", [&] { return mean_all(mul(layer_norm(x, g, b), x)); }, {x, g, b});
    }
    {
        Tensor x = random_off_kink(rng, Shape{p, q});
        Tensor y = random_tensor(rng, Shape{p, q});
        suite.check("relu", [&] { return mean_all(relu(x)); }, {x});
        suite.check("sigmoid", [&] { return mean_all(sigmoid(y)); }, {y});
        suite.check("tanh", [&] { return mean_all(tanh(y)); }, {y});
    }
    {
        const int t = static_cast<int>(rng.uniform_int(3, 8));
        const int cin = static_cast<int>(rng.uniform_int(1, 3));
        const int cout = static_cast<int>(rng.uniform_int(1, 3));
        Tensor x = random_tensor(rng, Shape{cin, t});
        Tensor w = random_tensor(rng, Shape{cout, cin, 3});
        Tensor b = random_tensor(rng, Shape{cout});
        suite.check("conv1d", [&] { return mean_all(conv1d(x, w, b)); }, {x, w, b});
    }
    {
        Tensor x = random_tensor(rng, Shape{p});
        Tensor w = random_tensor(rng, Shape{q});
        Tensor b = random_tensor(rng, Shape{q});
        suite.check("embedding_affine", [&] { return mean_all(embedding_affine(x, w, b)); },
                    {x, w, b});
    }
    {
        const int t = static_cast<int>(rng.uniform_int(3, 9));
        const int k = static_cast<int>(rng.uniform_int(1, 4));
        Tensor x = random_tensor(rng, Shape{t, q});
        suite.check(
            "mean_pool/repeat_rows",
            [&] { return mean_all(mul(repeat_rows(mean_pool_rows(x, k), k, t), x)); }, {x});
    }
    {
        Tensor a = random_tensor(rng, Shape{p, q});
        Tensor b = random_tensor(rng, Shape{p, r});
        suite.check("concat", [&] { return mean_all(concat({a, b}, 1)); }, {a, b});
        suite.check("slice", [&] { return mean_all(slice(concat({a, b}, 1), 1, 1, q + r)); },
                    {a, b});
    }
    {
        Tensor x = random_tensor(rng, Shape{p, q});
        Tensor b = random_tensor(rng, Shape{q});
        suite.check("add_rowwise", [&] { return mean_all(add_rowwise(x, b)); }, {x, b});
        suite.check("transpose", [&] { return mean_all(mul(transpose(x), transpose(x))); }, {x});
        suite.check("reshape", [&] { return sum_all(reshape(x, Shape{q, p})); }, {x});
    }
    {
        Tensor pr = random_tensor(rng, Shape{p, q});
        Tensor tg = random_tensor(rng, Shape{p, q});
        suite.check("mse", [&] { return mse(pr, tg); }, {pr});
    }
}

}  // namespace

SuiteResult run_gradcheck_suite(std::uint64_t seed) {
    Suite suite;
    Rng rng(seed);
    for (int trial = 0; trial < 3; ++trial) op_round(suite, rng);

    {
        ModelConfig cfg;
        cfg.t = 8;
        cfg.d_model = 4;
        cfg.heads = 2;
        cfg.horizon = 2;
        cfg.d_ff = 16;
        AttenGluco model(cfg, rng.split("attengluco"));
        Rng data = rng.split("attengluco-data");
        Tensor g = random_tensor(data, Shape{8}), ws = random_tensor(data, Shape{8}),
               wi = random_tensor(data, Shape{8});
        Tensor target = random_tensor(data, Shape{2});
        std::vector<Tensor> inputs;
        for (const NamedParam& p : model.params()) inputs.push_back(p.tensor);
        suite.check("attengluco end-to-end",
                    [&] { return mse(model.forward(g, ws, wi), target); }, inputs);
    }
    {
        CnnLstmBaseline model({12, 2}, rng.split("baseline"));
        Rng data = rng.split("baseline-data");
        Tensor g = random_tensor(data, Shape{12}), ws = random_tensor(data, Shape{12}),
               wi = random_tensor(data, Shape{12});
        Tensor target = random_tensor(data, Shape{2});
        std::vector<Tensor> inputs;
        for (const NamedParam& p : model.params()) inputs.push_back(p.tensor);
        suite.check("baseline end-to-end (sampled)",
                    [&] { return mse(model.forward(g, ws, wi), target); }, inputs, 24);
    }
    return SuiteResult{std::move(suite.entries)};
}

}  // namespace gluco
