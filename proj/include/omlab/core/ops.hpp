#pragma once

#include <vector>

#include "omlab/core/tensor.hpp"

// Differentiable tensor ops. All ops build graph nodes only when some input
// requires grad; otherwise the result is a plain constant and the graph is
// pruned at that boundary.
namespace omlab::core {

// Elementwise. `add` also accepts a bias row b of shape [c] or [1,c] against
// a [r,c] lhs; the bias gradient is the column sum.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
// y = a * scale + shift
Tensor affine(const Tensor& a, double scale, double shift = 0.0);

// [m,k] x [k,n] -> [m,n]; a rank-1 lhs is treated as one row and yields a
// rank-1 result.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);
// Clamp to [lo, hi]; gradient passes through on the closed interval.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor sum(const Tensor& a);   // scalar
Tensor mean(const Tensor& a);  // scalar
Tensor rowsum(const Tensor& a);  // [r,c] -> [r,1]
Tensor colsum(const Tensor& a);  // [r,c] -> [1,c]

// Row-wise, max-stabilized.
Tensor softmax_rows(const Tensor& a);
Tensor log_softmax_rows(const Tensor& a);

// Per-row column pick: result[r,0] = a[r, cols[r]].
Tensor gather_cols(const Tensor& a, const std::vector<int>& cols);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, int start, int len);
// Vertical concat; rank-1 parts count as single rows.
Tensor stack_rows(const std::vector<Tensor>& parts);

// Constant copy, cut from the graph.
Tensor detach(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(double s, const Tensor& a) { return affine(a, s); }
inline Tensor operator*(const Tensor& a, double s) { return affine(a, s); }
inline Tensor operator-(const Tensor& a) { return neg(a); }

}  // namespace omlab::core
