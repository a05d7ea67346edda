#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "gluco/grad_check.hpp"
#include "gluco/model.hpp"
#include "gluco/ops.hpp"
#include "oracle.hpp"

using namespace gluco;

namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
    return t;
}

Tensor identity(int d) {
    Tensor t(Shape{d, d}, 0.0);
    for (int i = 0; i < d; ++i) t.at(i, i) = 1.0;
    return t;
}

oracle::Mat to_mat(const Tensor& t) {
    oracle::Mat out(t.dim(0), oracle::Vec(t.dim(1)));
    for (int i = 0; i < t.dim(0); ++i) {
        for (int j = 0; j < t.dim(1); ++j) out[i][j] = t.at(i, j);
    }
    return out;
}

oracle::Blocks to_blocks(const ParamList& params) {
    oracle::Blocks b;
    for (const NamedParam& p : params) {
        std::vector<int> dims(p.tensor.shape().begin(), p.tensor.shape().end());
        b.by_name[p.name] = {dims, p.tensor.values()};
    }
    return b;
}

std::size_t expected_param_count(const ModelConfig& c) {
    const std::size_t d = c.d_model, heads = c.heads, blocks = 2 + c.scales.size();
    std::size_t n = 6 * d;                                    // channel embeddings
    n += blocks * (3 * heads * d * d + heads * d * d);        // attention projections
    n += 2 * (2 * d * c.d_ff + c.d_ff + d);                   // feed-forwards
    n += 4 * d;                                               // norms
    n += static_cast<std::size_t>(c.t) * d * c.horizon + c.horizon;  // head
    return n;
}

}  // namespace

TEST_CASE("scaled_attention with a single row returns V") {
    Rng rng(1);
    Tensor q = random_tensor(rng, Shape{1, 4});
    Tensor k = random_tensor(rng, Shape{1, 4});
    Tensor v = random_tensor(rng, Shape{1, 4});
    Tensor out = scaled_attention(q, k, v);
    for (int j = 0; j < 4; ++j) CHECK(out.at(0, j) == doctest::Approx(v.at(0, j)).epsilon(1e-15));
}

TEST_CASE("scaled_attention with zero queries averages V rows") {
    Tensor q(Shape{2, 2}, 0.0);
    Tensor k(Shape{2, 2}, {0.3, -0.7, 1.1, 0.2});
    Tensor v(Shape{2, 2}, {2, 0, 0, 2});
    Tensor out = scaled_attention(q, k, v);
    for (int i = 0; i < 2; ++i) {
        CHECK(out.at(i, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(out.at(i, 1) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("scaled_attention matches the brute-force oracle") {
    Rng rng(77);
    Tensor q = random_tensor(rng, Shape{4, 8});
    Tensor k = random_tensor(rng, Shape{4, 8});
    Tensor v = random_tensor(rng, Shape{4, 8});
    Tensor out = scaled_attention(q, k, v);
    oracle::Mat ref = oracle::scaled_attention(to_mat(q), to_mat(k), to_mat(v));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 8; ++j) CHECK(out.at(i, j) == doctest::Approx(ref[i][j]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scaled_attention(q, random_tensor(rng, Shape{4, 7}), v), ShapeError);
    CHECK_THROWS_AS(scaled_attention(q, k, random_tensor(rng, Shape{3, 8})), ShapeError);
}

TEST_CASE("single identity head reduces to scaled_attention") {
    Rng rng(5);
    const int d = 4;
    Tensor xq = random_tensor(rng, Shape{6, d});
    Tensor xkv = random_tensor(rng, Shape{6, d});
    AttnBlock blk;
    blk.heads.push_back({identity(d), identity(d), identity(d)});
    blk.wh = identity(d);
    Tensor got = multi_head_attention(xq, xkv, blk);
    Tensor want = scaled_attention(xq, xkv, xkv);
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got.data()[i] == doctest::Approx(want.data()[i]).epsilon(1e-13));
    }
}

TEST_CASE("two-head cross attention matches the oracle") {
    Rng rng(13);
    const int d = 5, t = 4;
    Tensor xq = random_tensor(rng, Shape{t, d});
    Tensor xkv = random_tensor(rng, Shape{t, d});
    AttnBlock blk;
    std::vector<oracle::HeadWeights> ref_heads;
    for (int h = 0; h < 2; ++h) {
        AttnHead head{random_tensor(rng, Shape{d, d}), random_tensor(rng, Shape{d, d}),
                      random_tensor(rng, Shape{d, d})};
        blk.heads.push_back(head);
        ref_heads.push_back({to_mat(head.wq), to_mat(head.wk), to_mat(head.wv)});
    }
    blk.wh = random_tensor(rng, Shape{2 * d, d});
    Tensor got = multi_head_attention(xq, xkv, blk);
    oracle::Mat want = oracle::multi_head(to_mat(xq), to_mat(xkv), ref_heads, to_mat(blk.wh));
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < d; ++j) CHECK(got.at(i, j) == doctest::Approx(want[i][j]).epsilon(1e-12));
    }
}

TEST_CASE("zero W_Q makes attention linear in the key/value input") {
    Rng rng(21);
    const int d = 4;
    Tensor xq = random_tensor(rng, Shape{5, d});
    Tensor xkv = random_tensor(rng, Shape{5, d});
    AttnBlock blk;
    blk.heads.push_back({Tensor(Shape{d, d}, 0.0), random_tensor(rng, Shape{d, d}),
                         random_tensor(rng, Shape{d, d})});
    blk.wh = random_tensor(rng, Shape{d, d});

    const double c = 3.25;
    Tensor base = multi_head_attention(xq, xkv, blk);
    Tensor scaled_in = scale(xkv, c);
    Tensor scaled_out = multi_head_attention(xq, scaled_in, blk);
    for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(scaled_out.data()[i] == doctest::Approx(c * base.data()[i]).epsilon(1e-12));
    }
}

TEST_CASE("constant-in-time input yields constant-in-time attention output") {
    Rng rng(31);
    const int d = 4, t = 6;
    Tensor row = random_tensor(rng, Shape{1, d});
    std::vector<Tensor> rows(t, row);
    Tensor x = concat(rows, 0);
    AttnBlock blk;
    blk.heads.push_back({random_tensor(rng, Shape{d, d}), random_tensor(rng, Shape{d, d}),
                         random_tensor(rng, Shape{d, d})});
    blk.wh = random_tensor(rng, Shape{d, d});
    Tensor out = multi_head_attention(x, x, blk);
    for (int i = 1; i < t; ++i) {
        for (int j = 0; j < d; ++j) CHECK(out.at(i, j) == doctest::Approx(out.at(0, j)).epsilon(1e-12));
    }
}

TEST_CASE("positional table: frozen values and distinct rows") {
    Tensor pos = positional_table(4, 6);
    CHECK(pos.at(0, 0) == 0.0);
    CHECK(pos.at(0, 1) == 1.0);
    CHECK(pos.at(1, 0) == doctest::Approx(std::sin(1.0)).epsilon(1e-15));
    CHECK(pos.at(1, 1) == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
    CHECK(pos.at(2, 2) == doctest::Approx(std::sin(2.0 / std::pow(10000.0, 2.0 / 6.0))).epsilon(1e-15));
    for (int p = 1; p < 4; ++p) {
        bool differs = false;
        for (int j = 0; j < 6; ++j) differs = differs || pos.at(p, j) != pos.at(0, j);
        CHECK(differs);
    }
}

TEST_CASE("zero embedding weights leave exactly the positional table") {
    const int t = 5, d = 4;
    Tensor x(Shape{t}, {1.0, -2.0, 0.5, 3.0, 0.0});
    Tensor w(Shape{d}, 0.0), b(Shape{d}, 0.0);
    Tensor pos = positional_table(t, d);
    Tensor enc = add(embedding_affine(x, w, b), pos);
    for (std::size_t i = 0; i < enc.size(); ++i) CHECK(enc.data()[i] == pos.data()[i]);
}

TEST_CASE("forward emits the configured number of finite values") {
    Rng data_rng(3);
    for (int m : {1, 6, 12}) {
        ModelConfig cfg;
        cfg.t = 8;
        cfg.d_model = 4;
        cfg.heads = 2;
        cfg.horizon = m;
        cfg.d_ff = 8;
        AttenGluco model(cfg, Rng(17));
        Tensor g = random_tensor(data_rng, Shape{8});
        Tensor ws = random_tensor(data_rng, Shape{8});
        Tensor wi = random_tensor(data_rng, Shape{8});
        Tensor out = model.forward(g, ws, wi);
        REQUIRE(out.shape() == Shape{m});
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::isfinite(out.data()[i]));
        CHECK_THROWS_AS(model.forward(random_tensor(data_rng, Shape{7}), ws, wi), ShapeError);
    }
}

TEST_CASE("shape closure at awkward window lengths") {
    Rng data_rng(9);
    for (int t : {8, 80, 81}) {
        ModelConfig cfg;
        cfg.t = t;
        cfg.d_model = 4;
        cfg.heads = 1;
        cfg.horizon = 3;
        cfg.d_ff = 8;
        AttenGluco model(cfg, Rng(2));
        Tensor out = model.forward(random_tensor(data_rng, Shape{t}), random_tensor(data_rng, Shape{t}),
                                   random_tensor(data_rng, Shape{t}));
        REQUIRE(out.shape() == Shape{3});
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::isfinite(out.data()[i]));
    }
}

TEST_CASE("initialization is deterministic in the seed") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;

    AttenGluco a(cfg, Rng(100)), b(cfg, Rng(100)), c(cfg, Rng(101));
    bool any_diff = false;
    for (std::size_t p = 0; p < a.params().size(); ++p) {
        const auto &ta = a.params()[p].tensor, &tb = b.params()[p].tensor, &tc = c.params()[p].tensor;
        for (std::size_t i = 0; i < ta.size(); ++i) {
            CHECK(ta.data()[i] == tb.data()[i]);
            any_diff = any_diff || ta.data()[i] != tc.data()[i];
        }
    }
    CHECK(any_diff);

    Rng data_rng(4);
    Tensor g = random_tensor(data_rng, Shape{8}), ws = random_tensor(data_rng, Shape{8}),
           wi = random_tensor(data_rng, Shape{8});
    Tensor o1 = a.forward(g, ws, wi), o2 = b.forward(g, ws, wi);
    for (std::size_t i = 0; i < o1.size(); ++i) CHECK(o1.data()[i] == o2.data()[i]);
}

TEST_CASE("initialization respects the fan-in bound") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;
    AttenGluco model(cfg, Rng(5));
    for (const NamedParam& p : model.params()) {
        if (p.name.find("norm") != std::string::npos) continue;
        for (std::size_t i = 0; i < p.tensor.size(); ++i) {
            CHECK(std::abs(p.tensor.data()[i]) <= 1.0);  // loosest bound is fan_in = 1
        }
    }
}

TEST_CASE("parameter count matches the closed form") {
    ModelConfig small;
    small.t = 8;
    small.d_model = 4;
    small.heads = 2;
    small.horizon = 2;
    small.d_ff = 16;
    CHECK(total_params(AttenGluco(small, Rng(1)).params()) == 1042);
    CHECK(expected_param_count(small) == 1042);

    ModelConfig other;
    other.t = 12;
    other.d_model = 6;
    other.heads = 3;
    other.horizon = 4;
    other.d_ff = 24;
    CHECK(total_params(AttenGluco(other, Rng(1)).params()) == expected_param_count(other));
}

TEST_CASE("full forward matches the straight-line oracle") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;
    AttenGluco model(cfg, Rng(41));

    Rng data_rng(42);
    Tensor g = random_tensor(data_rng, Shape{8}), ws = random_tensor(data_rng, Shape{8}),
           wi = random_tensor(data_rng, Shape{8});
    Tensor out = model.forward(g, ws, wi);

    oracle::ForwardSpec spec{cfg.t, cfg.d_model, cfg.heads, cfg.horizon, cfg.d_ff, cfg.scales};
    oracle::Vec ref = oracle::attengluco_forward(spec, to_blocks(model.params()), g.values(),
                                                 ws.values(), wi.values());
    REQUIRE(ref.size() == out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out.data()[i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("attention rows sum to 1 across every block") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;
    AttenGluco model(cfg, Rng(8));

    Rng data_rng(15);
    AttnTrace trace;
    model.forward(random_tensor(data_rng, Shape{8}), random_tensor(data_rng, Shape{8}),
                  random_tensor(data_rng, Shape{8}), &trace);
    // 2 cross-attention blocks + 3 scales, 2 heads each
    CHECK(trace.weights.size() == 10);
    for (const auto& [label, w] : trace.weights) {
        CAPTURE(label);
        for (int i = 0; i < w.dim(0); ++i) {
            double s = 0.0;
            for (int j = 0; j < w.dim(1); ++j) s += w.at(i, j);
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("forward is sensitive to time permutation of the glucose channel") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;
    AttenGluco model(cfg, Rng(23));

    Rng data_rng(24);
    Tensor g = random_tensor(data_rng, Shape{8}), ws = random_tensor(data_rng, Shape{8}),
           wi = random_tensor(data_rng, Shape{8});
    std::vector<double> perm = g.values();
    std::reverse(perm.begin(), perm.end());
    Tensor g_perm(Shape{8}, perm);

    Tensor a = model.forward(g, ws, wi);
    Tensor b = model.forward(g_perm, ws, wi);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a.data()[i] != b.data()[i];
    CHECK(differs);
}

TEST_CASE("end-to-end gradient passes finite differences on the tiny config") {
    ModelConfig cfg;
    cfg.t = 8;
    cfg.d_model = 4;
    cfg.heads = 2;
    cfg.horizon = 2;
    cfg.d_ff = 16;
    AttenGluco model(cfg, Rng(55));

    Rng data_rng(56);
    Tensor g = random_tensor(data_rng, Shape{8}), ws = random_tensor(data_rng, Shape{8}),
           wi = random_tensor(data_rng, Shape{8});
    Tensor target = random_tensor(data_rng, Shape{2});

    std::vector<Tensor> inputs;
    for (const NamedParam& p : model.params()) inputs.push_back(p.tensor);
    auto fn = [&] { return mse(model.forward(g, ws, wi), target); };
    auto res = grad_check(fn, inputs, 1e-4);
    CAPTURE(res.max_rel_err);
    CHECK(res.ok);
    CHECK(res.coords_checked == 1042);
}
