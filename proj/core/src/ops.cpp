#include "gluco/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <utility>

#include "gluco/grad_check.hpp"

namespace gluco {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<RowMat>;
using MapC = Eigen::Map<const RowMat>;

bool wants_graph(std::initializer_list<const Tensor*> ins) {
    if (!grad_enabled()) return false;
    for (const Tensor* t : ins) {
        if (t->requires_grad()) return true;
    }
    return false;
}

Tensor& attach(Tensor& out, const char* op, std::initializer_list<const Tensor*> parents,
               std::function<void()> backprop) {
    auto node = std::make_shared<GraphNode>();
    node->op = op;
    for (const Tensor* p : parents) node->parents.push_back(p->impl());
    node->backprop = std::move(backprop);
    out.impl()->node = std::move(node);
    out.impl()->requires_grad = true;
    return out;
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shapes disagree: " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

void require_2d(const char* op, const Tensor& t) {
    if (t.ndim() != 2) {
        throw ShapeError(std::string(op) + ": expected a 2-d tensor, got " + shape_str(t.shape()));
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double *pa = a.data(), *pb = b.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = pa[i] + pb[i];
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a, &b})) {
        TensorImpl *ai = a.impl().get(), *bi = b.impl().get(), *oi = out.impl().get();
        attach(out, "add", {&a, &b}, [ai, bi, oi, n] {
            const double* g = oi->grad_data();
            if (ai->requires_grad) {
                double* d = ai->grad_data();
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i];
            }
            if (bi->requires_grad) {
                double* d = bi->grad_data();
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i];
            }
        });
    }
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double *pa = a.data(), *pb = b.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = pa[i] - pb[i];
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a, &b})) {
        TensorImpl *ai = a.impl().get(), *bi = b.impl().get(), *oi = out.impl().get();
        attach(out, "sub", {&a, &b}, [ai, bi, oi, n] {
            const double* g = oi->grad_data();
            if (ai->requires_grad) {
                double* d = ai->grad_data();
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i];
            }
            if (bi->requires_grad) {
                double* d = bi->grad_data();
                for (std::size_t i = 0; i < n; ++i) d[i] -= g[i];
            }
        });
    }
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape("mul", a, b);
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double *pa = a.data(), *pb = b.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = pa[i] * pb[i];
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a, &b})) {
        TensorImpl *ai = a.impl().get(), *bi = b.impl().get(), *oi = out.impl().get();
        attach(out, "mul", {&a, &b}, [ai, bi, oi, n] {
            const double* g = oi->grad_data();
            if (ai->requires_grad) {
                double* d = ai->grad_data();
                const double* other = bi->values.data();
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i] * other[i];
            }
            if (bi->requires_grad) {
                double* d = bi->grad_data();
                const double* other = ai->values.data();
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i] * other[i];
            }
        });
    }
    return out;
}

Tensor scale(const Tensor& a, double s) {
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = s * pa[i];
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "scale", {&a}, [ai, oi, s, n] {
            const double* g = oi->grad_data();
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += s * g[i];
        });
    }
    return out;
}

Tensor add_rowwise(const Tensor& x, const Tensor& b) {
    require_2d("add_rowwise", x);
    if (b.ndim() != 1 || b.dim(0) != x.dim(1)) {
        throw ShapeError("add_rowwise: bias " + shape_str(b.shape()) +
                         " does not match row width of " + shape_str(x.shape()));
    }
    const int p = x.dim(0), q = x.dim(1);
    std::vector<double> v(x.values());
    const double* pb = b.data();
    for (int i = 0; i < p; ++i) {
        double* row = v.data() + static_cast<std::size_t>(i) * q;
        for (int j = 0; j < q; ++j) row[j] += pb[j];
    }
    Tensor out(x.shape(), std::move(v));
    if (wants_graph({&x, &b})) {
        TensorImpl *xi = x.impl().get(), *bi = b.impl().get(), *oi = out.impl().get();
        attach(out, "add_rowwise", {&x, &b}, [xi, bi, oi, p, q] {
            const double* g = oi->grad_data();
            if (xi->requires_grad) {
                double* d = xi->grad_data();
                const std::size_t n = static_cast<std::size_t>(p) * q;
                for (std::size_t i = 0; i < n; ++i) d[i] += g[i];
            }
            if (bi->requires_grad) {
                double* d = bi->grad_data();
                for (int i = 0; i < p; ++i) {
                    const double* row = g + static_cast<std::size_t>(i) * q;
                    for (int j = 0; j < q; ++j) d[j] += row[j];
                }
            }
        });
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
        throw ShapeError("matmul: incompatible operands " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
    const int p = a.dim(0), q = a.dim(1), r = b.dim(1);
    Tensor out(Shape{p, r});
    {
        MapC A(a.data(), p, q), B(b.data(), q, r);
        MapM C(out.data(), p, r);
        C.noalias() = A * B;
    }
    if (wants_graph({&a, &b})) {
        TensorImpl *ai = a.impl().get(), *bi = b.impl().get(), *oi = out.impl().get();
        attach(out, "matmul", {&a, &b}, [ai, bi, oi, p, q, r] {
            MapC dC(oi->grad_data(), p, r);
            if (ai->requires_grad) {
                MapM dA(ai->grad_data(), p, q);
                MapC B(bi->values.data(), q, r);
                dA.noalias() += dC * B.transpose();
            }
            if (bi->requires_grad) {
                MapM dB(bi->grad_data(), q, r);
                MapC A(ai->values.data(), p, q);
                dB.noalias() += A.transpose() * dC;
            }
        });
    }
    return out;
}

Tensor transpose(const Tensor& a) {
    require_2d("transpose", a);
    const int p = a.dim(0), q = a.dim(1);
    std::vector<double> v(a.size());
    const double* pa = a.data();
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < q; ++j) v[static_cast<std::size_t>(j) * p + i] = pa[static_cast<std::size_t>(i) * q + j];
    }
    Tensor out(Shape{q, p}, std::move(v));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "transpose", {&a}, [ai, oi, p, q] {
            const double* g = oi->grad_data();
            double* d = ai->grad_data();
            for (int j = 0; j < q; ++j) {
                for (int i = 0; i < p; ++i) d[static_cast<std::size_t>(i) * q + j] += g[static_cast<std::size_t>(j) * p + i];
            }
        });
    }
    return out;
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (numel(shape) != a.size()) {
        throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
    }
    Tensor out(std::move(shape), a.values());
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        const std::size_t n = a.size();
        attach(out, "reshape", {&a}, [ai, oi, n] {
            const double* g = oi->grad_data();
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += g[i];
        });
    }
    return out;
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ContractError("concat: no parts given");
    const int nd = parts.front().ndim();
    if (nd != 1 && nd != 2) {
        throw ShapeError("concat: expected 1-d or 2-d parts, got " + shape_str(parts.front().shape()));
    }
    if (axis < 0 || axis >= nd) {
        throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(parts.front().shape()));
    }
    for (const Tensor& t : parts) {
        if (t.ndim() != nd) throw ShapeError("concat: mixed ranks");
        for (int d = 0; d < nd; ++d) {
            if (d != axis && t.dim(d) != parts.front().dim(d)) {
                throw ShapeError("concat: shapes disagree off-axis: " + shape_str(parts.front().shape()) +
                                 " vs " + shape_str(t.shape()));
            }
        }
    }

    Shape out_shape = parts.front().shape();
    out_shape[axis] = 0;
    for (const Tensor& t : parts) out_shape[axis] += t.dim(axis);

    Tensor out(out_shape);
    double* po = out.data();
    if (nd == 1 || axis == 0) {
        std::size_t off = 0;
        for (const Tensor& t : parts) {
            std::copy(t.data(), t.data() + t.size(), po + off);
            off += t.size();
        }
    } else {
        const int rows = out_shape[0], width = out_shape[1];
        int col = 0;
        for (const Tensor& t : parts) {
            const int w = t.dim(1);
            for (int i = 0; i < rows; ++i) {
                std::copy(t.data() + static_cast<std::size_t>(i) * w,
                          t.data() + static_cast<std::size_t>(i) * w + w,
                          po + static_cast<std::size_t>(i) * width + col);
            }
            col += w;
        }
    }

    bool track = grad_enabled();
    if (track) {
        track = false;
        for (const Tensor& t : parts) track = track || t.requires_grad();
    }
    if (track) {
        auto node = std::make_shared<GraphNode>();
        node->op = "concat";
        std::vector<TensorImpl*> raw;
        for (const Tensor& t : parts) {
            node->parents.push_back(t.impl());
            raw.push_back(t.impl().get());
        }
        TensorImpl* oi = out.impl().get();
        const Shape oshape = out_shape;
        node->backprop = [raw, oi, oshape, axis, nd] {
            const double* g = oi->grad_data();
            if (nd == 1 || axis == 0) {
                std::size_t off = 0;
                for (TensorImpl* t : raw) {
                    const std::size_t n = t->values.size();
                    if (t->requires_grad) {
                        double* d = t->grad_data();
                        for (std::size_t i = 0; i < n; ++i) d[i] += g[off + i];
                    }
                    off += n;
                }
            } else {
                const int rows = oshape[0], width = oshape[1];
                int col = 0;
                for (TensorImpl* t : raw) {
                    const int w = t->shape[1];
                    if (t->requires_grad) {
                        double* d = t->grad_data();
                        for (int i = 0; i < rows; ++i) {
                            const double* grow = g + static_cast<std::size_t>(i) * width + col;
                            double* drow = d + static_cast<std::size_t>(i) * w;
                            for (int j = 0; j < w; ++j) drow[j] += grow[j];
                        }
                    }
                    col += w;
                }
            }
        };
        out.impl()->node = std::move(node);
        out.impl()->requires_grad = true;
    }
    return out;
}

Tensor slice(const Tensor& a, int axis, int start, int end) {
    const int nd = a.ndim();
    if (nd != 1 && nd != 2) throw ShapeError("slice: expected 1-d or 2-d tensor, got " + shape_str(a.shape()));
    if (axis < 0 || axis >= nd) throw ShapeError("slice: axis " + std::to_string(axis) + " out of range");
    if (start < 0 || end > a.dim(axis) || start >= end) {
        throw ShapeError("slice: range [" + std::to_string(start) + "," + std::to_string(end) +
                         ") invalid for " + shape_str(a.shape()) + " on axis " + std::to_string(axis));
    }

    Shape out_shape = a.shape();
    out_shape[axis] = end - start;
    Tensor out(out_shape);
    double* po = out.data();
    const double* pa = a.data();

    if (nd == 1 || axis == 0) {
        const int width = (nd == 2) ? a.dim(1) : 1;
        std::copy(pa + static_cast<std::size_t>(start) * width,
                  pa + static_cast<std::size_t>(end) * width, po);
    } else {
        const int rows = a.dim(0), aw = a.dim(1), w = end - start;
        for (int i = 0; i < rows; ++i) {
            std::copy(pa + static_cast<std::size_t>(i) * aw + start,
                      pa + static_cast<std::size_t>(i) * aw + end,
                      po + static_cast<std::size_t>(i) * w);
        }
    }

    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        const Shape ashape = a.shape();
        attach(out, "slice", {&a}, [ai, oi, ashape, axis, start, end, nd] {
            const double* g = oi->grad_data();
            double* d = ai->grad_data();
            if (nd == 1 || axis == 0) {
                const int width = (nd == 2) ? ashape[1] : 1;
                const std::size_t n = static_cast<std::size_t>(end - start) * width;
                double* base = d + static_cast<std::size_t>(start) * width;
                for (std::size_t i = 0; i < n; ++i) base[i] += g[i];
            } else {
                const int rows = ashape[0], aw = ashape[1], w = end - start;
                for (int i = 0; i < rows; ++i) {
                    double* drow = d + static_cast<std::size_t>(i) * aw + start;
                    const double* grow = g + static_cast<std::size_t>(i) * w;
                    for (int j = 0; j < w; ++j) drow[j] += grow[j];
                }
            }
        });
    }
    return out;
}

Tensor sum_all(const Tensor& a) {
    double s = 0.0;
    const double* pa = a.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += pa[i];
    Tensor out = Tensor::scalar(s);
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "sum_all", {&a}, [ai, oi, n] {
            const double g = oi->grad_data()[0];
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += g;
        });
    }
    return out;
}

Tensor mean_all(const Tensor& a) {
    double s = 0.0;
    const double* pa = a.data();
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) s += pa[i];
    Tensor out = Tensor::scalar(s / static_cast<double>(n));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "mean_all", {&a}, [ai, oi, n] {
            const double g = oi->grad_data()[0] / static_cast<double>(n);
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += g;
        });
    }
    return out;
}

Tensor relu(const Tensor& a) {
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = pa[i] > 0.0 ? pa[i] : 0.0;
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "relu", {&a}, [ai, oi, n] {
            const double* g = oi->grad_data();
            const double* x = ai->values.data();
            double* d = ai->grad_data();
            // Test hook: an injected fault scales this rule so that
            // finite-difference checks must report it.
            const double k = backward_fault_injection() ? 1.05 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i] > 0.0) d[i] += k * g[i];
            }
        });
    }
    return out;
}

Tensor sigmoid(const Tensor& a) {
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = pa[i];
        v[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    }
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "sigmoid", {&a}, [ai, oi, n] {
            const double* g = oi->grad_data();
            const double* y = oi->values.data();
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
        });
    }
    return out;
}

Tensor tanh(const Tensor& a) {
    const std::size_t n = a.size();
    std::vector<double> v(n);
    const double* pa = a.data();
    for (std::size_t i = 0; i < n; ++i) v[i] = std::tanh(pa[i]);
    Tensor out(a.shape(), std::move(v));
    if (wants_graph({&a})) {
        TensorImpl *ai = a.impl().get(), *oi = out.impl().get();
        attach(out, "tanh", {&a}, [ai, oi, n] {
            const double* g = oi->grad_data();
            const double* y = oi->values.data();
            double* d = ai->grad_data();
            for (std::size_t i = 0; i < n; ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
        });
    }
    return out;
}

Tensor softmax_rows(const Tensor& x) {
    require_2d("softmax_rows", x);
    const int p = x.dim(0), q = x.dim(1);
    std::vector<double> v(x.size());
    const double* px = x.data();
    for (int i = 0; i < p; ++i) {
        const double* row = px + static_cast<std::size_t>(i) * q;
        double* vrow = v.data() + static_cast<std::size_t>(i) * q;
        double m = row[0];
        for (int j = 1; j < q; ++j) m = std::max(m, row[j]);
        double s = 0.0;
        for (int j = 0; j < q; ++j) {
            vrow[j] = std::exp(row[j] - m);
            s += vrow[j];
        }
        for (int j = 0; j < q; ++j) vrow[j] /= s;
    }
    Tensor out(x.shape(), std::move(v));
    if (wants_graph({&x})) {
        TensorImpl *xi = x.impl().get(), *oi = out.impl().get();
        attach(out, "softmax_rows", {&x}, [xi, oi, p, q] {
            const double* g = oi->grad_data();
            const double* y = oi->values.data();
            double* d = xi->grad_data();
            for (int i = 0; i < p; ++i) {
                const double* grow = g + static_cast<std::size_t>(i) * q;
                const double* yrow = y + static_cast<std::size_t>(i) * q;
                double* drow = d + static_cast<std::size_t>(i) * q;
                double dot = 0.0;
                for (int j = 0; j < q; ++j) dot += grow[j] * yrow[j];
                for (int j = 0; j < q; ++j) drow[j] += yrow[j] * (grow[j] - dot);
            }
        });
    }
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
    require_2d("layer_norm", x);
    const int p = x.dim(0), q = x.dim(1);
    if (q < 2) throw ContractError("layer_norm: rows need at least 2 entries, got " + shape_str(x.shape()));
    if (gain.ndim() != 1 || gain.dim(0) != q || bias.ndim() != 1 || bias.dim(0) != q) {
        throw ShapeError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " +
                         shape_str(bias.shape()) + " do not match row width of " + shape_str(x.shape()));
    }
    constexpr double kEps = 1e-5;

    std::vector<double> v(x.size());
    std::vector<double> xhat(x.size());
    std::vector<double> inv_std(static_cast<std::size_t>(p));
    const double *px = x.data(), *pg = gain.data(), *pb = bias.data();
    for (int i = 0; i < p; ++i) {
        const double* row = px + static_cast<std::size_t>(i) * q;
        double mu = 0.0;
        for (int j = 0; j < q; ++j) mu += row[j];
        mu /= q;
        double var = 0.0;
        for (int j = 0; j < q; ++j) {
            const double c = row[j] - mu;
            var += c * c;
        }
        var /= q;  // population variance
        const double inv = 1.0 / std::sqrt(var + kEps);
        inv_std[static_cast<std::size_t>(i)] = inv;
        double* hrow = xhat.data() + static_cast<std::size_t>(i) * q;
        double* vrow = v.data() + static_cast<std::size_t>(i) * q;
        for (int j = 0; j < q; ++j) {
            hrow[j] = (row[j] - mu) * inv;
            vrow[j] = pg[j] * hrow[j] + pb[j];
        }
    }
    Tensor out(x.shape(), std::move(v));
    if (wants_graph({&x, &gain, &bias})) {
        TensorImpl *xi = x.impl().get(), *gi = gain.impl().get(), *bi = bias.impl().get(),
                   *oi = out.impl().get();
        attach(out, "layer_norm", {&x, &gain, &bias},
               [xi, gi, bi, oi, p, q, xhat = std::move(xhat), inv_std = std::move(inv_std)] {
                   const double* g = oi->grad_data();
                   const double* pg = gi->values.data();
                   for (int i = 0; i < p; ++i) {
                       const double* grow = g + static_cast<std::size_t>(i) * q;
                       const double* hrow = xhat.data() + static_cast<std::size_t>(i) * q;
                       if (xi->requires_grad) {
                           double* drow = xi->grad_data() + static_cast<std::size_t>(i) * q;
                           double m1 = 0.0, m2 = 0.0;
                           for (int j = 0; j < q; ++j) {
                               const double dh = grow[j] * pg[j];
                               m1 += dh;
                               m2 += dh * hrow[j];
                           }
                           m1 /= q;
                           m2 /= q;
                           const double inv = inv_std[static_cast<std::size_t>(i)];
                           for (int j = 0; j < q; ++j) {
                               const double dh = grow[j] * pg[j];
                               drow[j] += inv * (dh - m1 - hrow[j] * m2);
                           }
                       }
                       if (gi->requires_grad) {
                           double* dg = gi->grad_data();
                           for (int j = 0; j < q; ++j) dg[j] += grow[j] * hrow[j];
                       }
                       if (bi->requires_grad) {
                           double* db = bi->grad_data();
                           for (int j = 0; j < q; ++j) db[j] += grow[j];
                       }
                   }
               });
    }
    return out;
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (x.ndim() != 2) throw ShapeError("conv1d: input must be [channels x time], got " + shape_str(x.shape()));
    if (w.ndim() != 3) throw ShapeError("conv1d: weights must be [out x in x kernel], got " + shape_str(w.shape()));
    const int cin = x.dim(0), t = x.dim(1);
    const int cout = w.dim(0), k = w.dim(2);
    if (w.dim(1) != cin) {
        throw ShapeError("conv1d: weight " + shape_str(w.shape()) + " does not match input " + shape_str(x.shape()));
    }
    if (b.ndim() != 1 || b.dim(0) != cout) {
        throw ShapeError("conv1d: bias " + shape_str(b.shape()) + " must have " + std::to_string(cout) + " entries");
    }
    if (k % 2 == 0) throw ContractError("conv1d: same padding needs an odd kernel, got " + std::to_string(k));
    const int pad = (k - 1) / 2;

    std::vector<double> v(static_cast<std::size_t>(cout) * t);
    const double *px = x.data(), *pw = w.data(), *pb = b.data();
    for (int o = 0; o < cout; ++o) {
        double* vrow = v.data() + static_cast<std::size_t>(o) * t;
        for (int s = 0; s < t; ++s) vrow[s] = pb[o];
        for (int c = 0; c < cin; ++c) {
            const double* xrow = px + static_cast<std::size_t>(c) * t;
            const double* wrow = pw + (static_cast<std::size_t>(o) * cin + c) * k;
            for (int j = 0; j < k; ++j) {
                const double wj = wrow[j];
                const int lo = std::max(0, pad - j), hi = std::min(t, t + pad - j);
                for (int s = lo; s < hi; ++s) vrow[s] += wj * xrow[s + j - pad];
            }
        }
    }
    Tensor out(Shape{cout, t}, std::move(v));
    if (wants_graph({&x, &w, &b})) {
        TensorImpl *xi = x.impl().get(), *wi = w.impl().get(), *bi = b.impl().get(),
                   *oi = out.impl().get();
        attach(out, "conv1d", {&x, &w, &b}, [xi, wi, bi, oi, cin, cout, t, k, pad] {
            const double* g = oi->grad_data();
            if (bi->requires_grad) {
                double* db = bi->grad_data();
                for (int o = 0; o < cout; ++o) {
                    const double* grow = g + static_cast<std::size_t>(o) * t;
                    for (int s = 0; s < t; ++s) db[o] += grow[s];
                }
            }
            if (wi->requires_grad) {
                double* dw = wi->grad_data();
                const double* px = xi->values.data();
                for (int o = 0; o < cout; ++o) {
                    const double* grow = g + static_cast<std::size_t>(o) * t;
                    for (int c = 0; c < cin; ++c) {
                        const double* xrow = px + static_cast<std::size_t>(c) * t;
                        double* dwrow = dw + (static_cast<std::size_t>(o) * cin + c) * k;
                        for (int j = 0; j < k; ++j) {
                            double acc = 0.0;
                            const int lo = std::max(0, pad - j), hi = std::min(t, t + pad - j);
                            for (int s = lo; s < hi; ++s) acc += grow[s] * xrow[s + j - pad];
                            dwrow[j] += acc;
                        }
                    }
                }
            }
            if (xi->requires_grad) {
                double* dx = xi->grad_data();
                const double* pw = wi->values.data();
                for (int o = 0; o < cout; ++o) {
                    const double* grow = g + static_cast<std::size_t>(o) * t;
                    for (int c = 0; c < cin; ++c) {
                        double* dxrow = dx + static_cast<std::size_t>(c) * t;
                        const double* wrow = pw + (static_cast<std::size_t>(o) * cin + c) * k;
                        for (int j = 0; j < k; ++j) {
                            const double wj = wrow[j];
                            const int lo = std::max(0, pad - j), hi = std::min(t, t + pad - j);
                            for (int s = lo; s < hi; ++s) dxrow[s + j - pad] += grow[s] * wj;
                        }
                    }
                }
            }
        });
    }
    return out;
}

Tensor embedding_affine(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (x.ndim() != 1) throw ShapeError("embedding_affine: input must be 1-d, got " + shape_str(x.shape()));
    if (w.ndim() != 1 || b.ndim() != 1 || w.dim(0) != b.dim(0)) {
        throw ShapeError("embedding_affine: weight " + shape_str(w.shape()) + " and bias " +
                         shape_str(b.shape()) + " must be 1-d of equal length");
    }
    const int t = x.dim(0), d = w.dim(0);
    std::vector<double> v(static_cast<std::size_t>(t) * d);
    const double *px = x.data(), *pw = w.data(), *pb = b.data();
    for (int i = 0; i < t; ++i) {
        double* row = v.data() + static_cast<std::size_t>(i) * d;
        const double xv = px[i];
        for (int j = 0; j < d; ++j) row[j] = xv * pw[j] + pb[j];
    }
    Tensor out(Shape{t, d}, std::move(v));
    if (wants_graph({&x, &w, &b})) {
        TensorImpl *xi = x.impl().get(), *wi = w.impl().get(), *bi = b.impl().get(),
                   *oi = out.impl().get();
        attach(out, "embedding_affine", {&x, &w, &b}, [xi, wi, bi, oi, t, d] {
            const double* g = oi->grad_data();
            const double* pw = wi->values.data();
            const double* px = xi->values.data();
            for (int i = 0; i < t; ++i) {
                const double* grow = g + static_cast<std::size_t>(i) * d;
                if (xi->requires_grad) {
                    double dot = 0.0;
                    for (int j = 0; j < d; ++j) dot += grow[j] * pw[j];
                    xi->grad_data()[i] += dot;
                }
                if (wi->requires_grad) {
                    double* dw = wi->grad_data();
                    const double xv = px[i];
                    for (int j = 0; j < d; ++j) dw[j] += grow[j] * xv;
                }
                if (bi->requires_grad) {
                    double* db = bi->grad_data();
                    for (int j = 0; j < d; ++j) db[j] += grow[j];
                }
            }
        });
    }
    return out;
}

Tensor mean_pool_rows(const Tensor& x, int k) {
    require_2d("mean_pool_rows", x);
    if (k < 1) throw ContractError("mean_pool_rows: factor must be >= 1, got " + std::to_string(k));
    const int t = x.dim(0), d = x.dim(1);
    const int groups = (t + k - 1) / k;
    std::vector<double> v(static_cast<std::size_t>(groups) * d, 0.0);
    const double* px = x.data();
    for (int gidx = 0; gidx < groups; ++gidx) {
        const int lo = gidx * k, hi = std::min(t, lo + k);
        double* row = v.data() + static_cast<std::size_t>(gidx) * d;
        for (int r = lo; r < hi; ++r) {
            const double* xrow = px + static_cast<std::size_t>(r) * d;
            for (int j = 0; j < d; ++j) row[j] += xrow[j];
        }
        const double invn = 1.0 / (hi - lo);
        for (int j = 0; j < d; ++j) row[j] *= invn;
    }
    Tensor out(Shape{groups, d}, std::move(v));
    if (wants_graph({&x})) {
        TensorImpl *xi = x.impl().get(), *oi = out.impl().get();
        attach(out, "mean_pool_rows", {&x}, [xi, oi, t, d, k, groups] {
            const double* g = oi->grad_data();
            double* dx = xi->grad_data();
            for (int gidx = 0; gidx < groups; ++gidx) {
                const int lo = gidx * k, hi = std::min(t, lo + k);
                const double invn = 1.0 / (hi - lo);
                const double* grow = g + static_cast<std::size_t>(gidx) * d;
                for (int r = lo; r < hi; ++r) {
                    double* drow = dx + static_cast<std::size_t>(r) * d;
                    for (int j = 0; j < d; ++j) drow[j] += grow[j] * invn;
                }
            }
        });
    }
    return out;
}

Tensor repeat_rows(const Tensor& x, int k, int t_target) {
    require_2d("repeat_rows", x);
    if (k < 1) throw ContractError("repeat_rows: factor must be >= 1, got " + std::to_string(k));
    const int s = x.dim(0), d = x.dim(1);
    const int expect = (t_target + k - 1) / k;
    if (s != expect) {
        throw ContractError("repeat_rows: " + std::to_string(s) + " rows cannot cover " +
                            std::to_string(t_target) + " target rows at factor " + std::to_string(k));
    }
    std::vector<double> v(static_cast<std::size_t>(t_target) * d);
    const double* px = x.data();
    for (int i = 0; i < t_target; ++i) {
        const double* src = px + static_cast<std::size_t>(i / k) * d;
        std::copy(src, src + d, v.data() + static_cast<std::size_t>(i) * d);
    }
    Tensor out(Shape{t_target, d}, std::move(v));
    if (wants_graph({&x})) {
        TensorImpl *xi = x.impl().get(), *oi = out.impl().get();
        attach(out, "repeat_rows", {&x}, [xi, oi, d, k, t_target] {
            const double* g = oi->grad_data();
            double* dx = xi->grad_data();
            for (int i = 0; i < t_target; ++i) {
                const double* grow = g + static_cast<std::size_t>(i) * d;
                double* drow = dx + static_cast<std::size_t>(i / k) * d;
                for (int j = 0; j < d; ++j) drow[j] += grow[j];
            }
        });
    }
    return out;
}

Tensor mse(const Tensor& pred, const Tensor& target) {
    Tensor diff = sub(pred, target);
    return mean_all(mul(diff, diff));
}

}  // namespace gluco
