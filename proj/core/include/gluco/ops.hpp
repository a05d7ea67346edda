#pragma once

#include <vector>

#include "gluco/tensor.hpp"

namespace gluco {

// Elementwise ops require identical shapes; mismatches raise ShapeError
// naming both shapes. Every op here has a backward rule checked against
// central finite differences (see grad_check).

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// [p x q] + [q], the bias vector added to every row.
Tensor add_rowwise(const Tensor& x, const Tensor& b);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& a, int axis, int start, int end);

Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);

// Row-wise softmax with max subtraction. NaN inputs propagate to NaN rows.
Tensor softmax_rows(const Tensor& x);

// Per-row standardization (population variance, epsilon 1e-5 inside the
// square root) followed by the affine gain/bias. Rows need q >= 2.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);

// x: [c_in x t], w: [c_out x c_in x k] (k odd), b: [c_out]; stride 1 with
// zero "same" padding, so the output is [c_out x t].
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b);

// Maps a scalar sequence x[t] through one affine per timestep:
// out[i, :] = x[i] * w + b, giving [t x d].
Tensor embedding_affine(const Tensor& x, const Tensor& w, const Tensor& b);

// Non-overlapping mean over k consecutive rows; a partial final group is
// averaged over its actual length. k = 1 is the identity.
Tensor mean_pool_rows(const Tensor& x, int k);

// Each row repeated k times, truncated to t_target rows. Requires
// rows(x) == ceil(t_target / k).
Tensor repeat_rows(const Tensor& x, int k, int t_target);

// mean((pred - target)^2) as a scalar graph node.
Tensor mse(const Tensor& pred, const Tensor& target);

}  // namespace gluco
