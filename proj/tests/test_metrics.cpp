#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gluco/forecaster.hpp"
#include "gluco/metrics.hpp"
#include "gluco/rng.hpp"

using namespace gluco;

namespace {

MetricsReport one_shot(const std::vector<double>& pred, const std::vector<double>& target) {
    MetricsAccum accum;
    accum.add(pred, target);
    return accum.report();
}

double reference_pearson(const std::vector<double>& p, const std::vector<double>& t) {
    const double n = static_cast<double>(p.size());
    double mp = 0, mt = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        mp += p[i];
        mt += t[i];
    }
    mp /= n;
    mt /= n;
    double cov = 0, vp = 0, vt = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cov += (p[i] - mp) * (t[i] - mt);
        vp += (p[i] - mp) * (p[i] - mp);
        vt += (t[i] - mt) * (t[i] - mt);
    }
    return cov / std::sqrt(vp * vt);
}

}  // namespace

TEST_CASE("hand-computed fixture: pred [0,0] vs target [3,4]") {
    const MetricsReport r = one_shot({0, 0}, {3, 4});
    CHECK(r.rmse == doctest::Approx(3.5355339059327378).epsilon(1e-15));
    CHECK(r.mae == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(r.n_windows == 1);
    CHECK(r.n_pairs == 2);
    REQUIRE(r.rmse_per_step.size() == 2);
    CHECK(r.rmse_per_step[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r.rmse_per_step[1] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("perfect predictions score zero error and full correlation") {
    const MetricsReport r = one_shot({100, 140, 180}, {100, 140, 180});
    CHECK(r.rmse == 0.0);
    CHECK(r.mae == 0.0);
    CHECK(r.pearson == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.pearson_degenerate);
}

TEST_CASE("constant shift gives mae == rmse == c and pearson 1") {
    const MetricsReport r = one_shot({105, 145, 185}, {100, 140, 180});
    CHECK(r.rmse == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(r.mae == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(r.pearson == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rmse dominates mae on random data") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> p(6), t(6);
        for (int i = 0; i < 6; ++i) {
            p[i] = rng.uniform(60, 300);
            t[i] = rng.uniform(60, 300);
        }
        const MetricsReport r = one_shot(p, t);
        CHECK(r.rmse >= r.mae - 1e-12);
        CHECK(r.pearson >= -1.0 - 1e-12);
        CHECK(r.pearson <= 1.0 + 1e-12);
    }
}

TEST_CASE("pearson is invariant under positive affine maps of predictions") {
    Rng rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p(8), t(8);
        for (int i = 0; i < 8; ++i) {
            p[i] = rng.uniform(-2, 2);
            t[i] = rng.uniform(-2, 2);
        }
        const double a = rng.uniform(0.1, 4.0), b = rng.uniform(-50, 50);
        std::vector<double> scaled(8);
        for (int i = 0; i < 8; ++i) scaled[i] = a * p[i] + b;
        const MetricsReport r1 = one_shot(p, t), r2 = one_shot(scaled, t);
        CHECK(std::abs(r1.pearson - r2.pearson) < 1e-12);
        CHECK(std::abs(r1.pearson - reference_pearson(p, t)) < 1e-12);
    }
}

TEST_CASE("constant series degrade pearson to a flagged zero") {
    const MetricsReport rp = one_shot({120, 120, 120}, {100, 140, 180});
    CHECK(rp.pearson == 0.0);
    CHECK(rp.pearson_degenerate);

    const MetricsReport rt = one_shot({100, 140, 180}, {120, 120, 120});
    CHECK(rt.pearson == 0.0);
    CHECK(rt.pearson_degenerate);
}

TEST_CASE("merge equals pooling everything into one accumulator") {
    Rng rng(43);
    std::vector<std::vector<double>> preds, targets;
    for (int w = 0; w < 10; ++w) {
        std::vector<double> p(4), t(4);
        for (int i = 0; i < 4; ++i) {
            p[i] = rng.uniform(60, 300);
            t[i] = rng.uniform(60, 300);
        }
        preds.push_back(p);
        targets.push_back(t);
    }

    MetricsAccum whole;
    for (int w = 0; w < 10; ++w) whole.add(preds[w], targets[w]);

    MetricsAccum left, right;
    for (int w = 0; w < 6; ++w) left.add(preds[w], targets[w]);
    for (int w = 6; w < 10; ++w) right.add(preds[w], targets[w]);
    left.merge(right);

    const MetricsReport a = whole.report(), b = left.report();
    CHECK(a.n_windows == b.n_windows);
    CHECK(a.n_pairs == b.n_pairs);
    CHECK(a.rmse == doctest::Approx(b.rmse).epsilon(1e-13));
    CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-13));
    CHECK(a.pearson == doctest::Approx(b.pearson).epsilon(1e-13));
    for (std::size_t s = 0; s < a.rmse_per_step.size(); ++s) {
        CHECK(a.rmse_per_step[s] == doctest::Approx(b.rmse_per_step[s]).epsilon(1e-13));
    }
}

TEST_CASE("empty accumulators and window sets are rejected") {
    MetricsAccum accum;
    CHECK(accum.empty());
    CHECK_THROWS_AS(accum.report(), ContractError);
    CHECK_THROWS_AS(accum.add({1.0}, {1.0, 2.0}), ContractError);

    ModelConfig cfg;
    cfg.t = 6;
    cfg.d_model = 4;
    cfg.heads = 1;
    cfg.horizon = 2;
    cfg.d_ff = 8;
    const auto model = make_attengluco(cfg, 3);
    CHECK_THROWS_AS(evaluate(*model, {}, NormStats{}), ContractError);
}

TEST_CASE("evaluation de-normalizes predictions before scoring") {
    ModelConfig cfg;
    cfg.t = 6;
    cfg.d_model = 4;
    cfg.heads = 1;
    cfg.horizon = 2;
    cfg.d_ff = 8;
    const auto model = make_attengluco(cfg, 5);

    NormStats stats;
    stats.mean_g = 120.0;
    stats.sd_g = 25.0;

    Rng rng(47);
    std::vector<WindowSample> windows(3);
    for (WindowSample& w : windows) {
        for (int i = 0; i < 6; ++i) {
            w.x_g.push_back(rng.uniform(-1, 1));
            w.x_ws.push_back(rng.uniform(-1, 1));
            w.x_wi.push_back(rng.uniform(-1, 1));
        }
        w.target = {rng.uniform(90, 200), rng.uniform(90, 200)};
    }

    // independent pass: raw predictions mapped to mg/dL by hand
    MetricsAccum expected;
    {
        NoGradGuard guard;
        for (const WindowSample& w : windows) {
            Tensor g(Shape{6}, w.x_g), ws(Shape{6}, w.x_ws), wi(Shape{6}, w.x_wi);
            const Tensor pred = model->predict(g, ws, wi);
            std::vector<double> mgdl(pred.size());
            for (std::size_t i = 0; i < pred.size(); ++i) {
                mgdl[i] = pred.data()[i] * stats.sd_g + stats.mean_g;
            }
            expected.add(mgdl, w.target);
        }
    }

    const MetricsReport want = expected.report();
    const MetricsReport got = evaluate(*model, windows, stats);
    CHECK(got.rmse == want.rmse);
    CHECK(got.mae == want.mae);
    CHECK(got.pearson == want.pearson);
    CHECK(got.n_windows == 3);
    CHECK(got.n_pairs == 6);
}
