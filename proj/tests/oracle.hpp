// Straight-line reference implementations used to cross-check the tensor
// engine. Everything here is plain nested vectors and hand-rolled loops on
// purpose; none of it touches the autodiff code paths.
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat out = zeros(a.size(), b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
        }
    }
    return out;
}

inline Mat transpose(const Mat& a) {
    Mat out = zeros(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
    }
    return out;
}

inline Mat add(const Mat& a, const Mat& b) {
    Mat out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[0].size(); ++j) out[i][j] += b[i][j];
    }
    return out;
}

inline Mat softmax_rows(const Mat& x) {
    Mat out = x;
    for (Vec& row : out) {
        double m = row[0];
        for (double v : row) m = std::max(m, v);
        double s = 0.0;
        for (double& v : row) {
            v = std::exp(v - m);
            s += v;
        }
        for (double& v : row) v /= s;
    }
    return out;
}

inline Mat scaled_attention(const Mat& q, const Mat& k, const Mat& v) {
    Mat scores = matmul(q, transpose(k));
    const double inv = 1.0 / std::sqrt(static_cast<double>(q[0].size()));
    for (Vec& row : scores) {
        for (double& s : row) s *= inv;
    }
    return matmul(softmax_rows(scores), v);
}

struct HeadWeights {
    Mat wq, wk, wv;
};

inline Mat multi_head(const Mat& q_src, const Mat& kv_src, const std::vector<HeadWeights>& heads,
                      const Mat& wh) {
    Mat cat(q_src.size());
    for (const HeadWeights& h : heads) {
        Mat out = scaled_attention(matmul(q_src, h.wq), matmul(kv_src, h.wk), matmul(kv_src, h.wv));
        for (std::size_t i = 0; i < out.size(); ++i) {
            cat[i].insert(cat[i].end(), out[i].begin(), out[i].end());
        }
    }
    return matmul(cat, wh);
}

inline Mat layer_norm(const Mat& x, const Vec& gain, const Vec& bias) {
    Mat out = x;
    const std::size_t q = x[0].size();
    for (Vec& row : out) {
        double mu = 0.0;
        for (double v : row) mu += v;
        mu /= q;
        double var = 0.0;
        for (double v : row) var += (v - mu) * (v - mu);
        var /= q;
        const double inv = 1.0 / std::sqrt(var + 1e-5);
        for (std::size_t j = 0; j < q; ++j) row[j] = gain[j] * (row[j] - mu) * inv + bias[j];
    }
    return out;
}

inline Mat feed_forward(const Mat& x, const Mat& w1, const Vec& b1, const Mat& w2, const Vec& b2) {
    Mat h = matmul(x, w1);
    for (Vec& row : h) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = std::max(0.0, row[j] + b1[j]);
    }
    Mat out = matmul(h, w2);
    for (Vec& row : out) {
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += b2[j];
    }
    return out;
}

inline Mat mean_pool(const Mat& x, int k) {
    const int t = static_cast<int>(x.size());
    const int groups = (t + k - 1) / k;
    Mat out = zeros(groups, x[0].size());
    for (int g = 0; g < groups; ++g) {
        const int lo = g * k, hi = std::min(t, lo + k);
        for (int r = lo; r < hi; ++r) {
            for (std::size_t j = 0; j < x[0].size(); ++j) out[g][j] += x[r][j];
        }
        for (double& v : out[g]) v /= (hi - lo);
    }
    return out;
}

inline Mat repeat(const Mat& x, int k, int t_target) {
    Mat out;
    for (int i = 0; i < t_target; ++i) out.push_back(x[i / k]);
    return out;
}

inline Mat positional(int t, int d) {
    Mat out = zeros(t, d);
    for (int p = 0; p < t; ++p) {
        for (int i = 0; i < d; i += 2) {
            const double angle = p / std::pow(10000.0, static_cast<double>(i) / d);
            out[p][i] = std::sin(angle);
            if (i + 1 < d) out[p][i + 1] = std::cos(angle);
        }
    }
    return out;
}

struct ForwardSpec {
    int t, d_model, heads, horizon, d_ff;
    std::vector<int> scales;
};

// Parameters keyed by block name, every block flattened row-major with its
// dims alongside, exactly as the engine registers them.
struct Blocks {
    std::map<std::string, std::pair<std::vector<int>, Vec>> by_name;

    Mat mat(const std::string& name) const {
        const auto& [dims, flat] = by_name.at(name);
        Mat out = zeros(dims[0], dims[1]);
        for (int i = 0; i < dims[0]; ++i) {
            for (int j = 0; j < dims[1]; ++j) out[i][j] = flat[static_cast<std::size_t>(i) * dims[1] + j];
        }
        return out;
    }
    Vec vec(const std::string& name) const { return by_name.at(name).second; }
};

inline std::vector<HeadWeights> block_heads(const Blocks& b, const std::string& base, int heads) {
    std::vector<HeadWeights> out;
    for (int h = 0; h < heads; ++h) {
        const std::string hb = base + ".h" + std::to_string(h);
        out.push_back({b.mat(hb + ".wq"), b.mat(hb + ".wk"), b.mat(hb + ".wv")});
    }
    return out;
}

// Full transcription of the forecaster: embed + positional, two cross
// attention branches, feed-forward + add&norm, three-scale self-attention,
// second feed-forward + add&norm, flatten, affine head.
inline Vec attengluco_forward(const ForwardSpec& spec, const Blocks& b, const Vec& xg,
                              const Vec& xws, const Vec& xwi) {
    const Mat pos = positional(spec.t, spec.d_model);

    auto embed = [&](const Vec& x, const std::string& chan) {
        const Vec w = b.vec("embed." + chan + ".w");
        const Vec bb = b.vec("embed." + chan + ".b");
        Mat out = zeros(spec.t, spec.d_model);
        for (int i = 0; i < spec.t; ++i) {
            for (int j = 0; j < spec.d_model; ++j) out[i][j] = x[i] * w[j] + bb[j] + pos[i][j];
        }
        return out;
    };

    const Mat xg_e = embed(xg, "g"), xws_e = embed(xws, "ws"), xwi_e = embed(xwi, "wi");

    const Mat ca = add(multi_head(xg_e, xws_e, block_heads(b, "ca.ws", spec.heads), b.mat("ca.ws.wh")),
                       multi_head(xg_e, xwi_e, block_heads(b, "ca.wi", spec.heads), b.mat("ca.wi.wh")));
    const Mat x_ca = layer_norm(
        add(ca, feed_forward(ca, b.mat("ff1.w1"), b.vec("ff1.b1"), b.mat("ff1.w2"), b.vec("ff1.b2"))),
        b.vec("norm1.gain"), b.vec("norm1.bias"));

    Mat ms = zeros(spec.t, spec.d_model);
    for (int s : spec.scales) {
        const std::string base = "ms.s" + std::to_string(s);
        const Mat down = s == 1 ? x_ca : mean_pool(x_ca, s);
        const Mat att = multi_head(down, down, block_heads(b, base, spec.heads), b.mat(base + ".wh"));
        ms = add(ms, s == 1 ? att : repeat(att, s, spec.t));
    }
    const Mat x_ms = layer_norm(
        add(ms, feed_forward(ms, b.mat("ff2.w1"), b.vec("ff2.b1"), b.mat("ff2.w2"), b.vec("ff2.b2"))),
        b.vec("norm2.gain"), b.vec("norm2.bias"));

    const Mat head_w = b.mat("head.w");
    const Vec head_b = b.vec("head.b");
    Vec out(spec.horizon, 0.0);
    for (int m = 0; m < spec.horizon; ++m) {
        double acc = head_b[m];
        int flat = 0;
        for (int i = 0; i < spec.t; ++i) {
            for (int j = 0; j < spec.d_model; ++j) acc += x_ms[i][j] * head_w[flat++][m];
        }
        out[m] = acc;
    }
    return out;
}

}  // namespace oracle
