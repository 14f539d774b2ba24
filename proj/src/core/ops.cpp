#include "omlab/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <memory>
#include <utility>

#include "omlab/core/error.hpp"
#include "omlab/core/kernels.hpp"

namespace omlab::core {

namespace {

bool any_requires_grad(const std::vector<Tensor>& parents) {
    for (const auto& p : parents) {
        if (p.requires_grad()) return true;
    }
    return false;
}

// Builds a result node. `make_backward` receives the finished result node and
// returns the closure to run on the backward sweep; it is only invoked (and
// parents only retained) when some parent requires grad.
Tensor make_op(std::vector<int> shape, std::vector<double> values,
               const std::vector<Tensor>& parents,
               const std::function<std::function<void()>(Node*)>& make_backward) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    if (any_requires_grad(parents)) {
        n->requires_grad = true;
        n->parents.reserve(parents.size());
        for (const auto& p : parents) n->parents.push_back(p.node());
        n->backward_fn = make_backward(n.get());
    }
    return Tensor(std::move(n));
}

bool same_shape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

// True when b can act as a broadcast bias row against a.
bool bias_row(const Tensor& a, const Tensor& b) {
    return b.size() == static_cast<size_t>(a.cols()) &&
           (b.rank() == 1 || b.rows() == 1) && a.rank() == 2;
}

void check_same(const Tensor& a, const Tensor& b, const char* op) {
    require(same_shape(a, b), std::string(op) + ": shape mismatch");
}

using Map = std::function<double(double)>;

// Elementwise unary: y = f(x), dx += g * dfn(x, y).
Tensor unary(const Tensor& a, const Map& f,
             const std::function<double(double x, double y)>& df) {
    std::vector<double> vals(a.size());
    const auto& x = a.values();
    for (size_t i = 0; i < x.size(); ++i) vals[i] = f(x[i]);
    return make_op(a.shape(), std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, df]() {
            for (size_t i = 0; i < out->values.size(); ++i)
                pa->grad[i] += out->grad[i] * df(pa->values[i], out->values[i]);
        };
    });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    if (same_shape(a, b)) {
        std::vector<double> vals(a.size());
        for (size_t i = 0; i < vals.size(); ++i) vals[i] = a.values()[i] + b.values()[i];
        return make_op(a.shape(), std::move(vals), {a, b}, [&](Node* out) {
            Node* pa = a.node().get();
            Node* pb = b.node().get();
            return [pa, pb, out]() {
                for (size_t i = 0; i < out->grad.size(); ++i) {
                    if (pa->requires_grad) pa->grad[i] += out->grad[i];
                    if (pb->requires_grad) pb->grad[i] += out->grad[i];
                }
            };
        });
    }
    require(bias_row(a, b), "add: shape mismatch");
    const int r = a.rows(), c = a.cols();
    std::vector<double> vals(a.size());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) vals[i * c + j] = a.values()[i * c + j] + b.values()[j];
    return make_op(a.shape(), std::move(vals), {a, b}, [&](Node* out) {
        Node* pa = a.node().get();
        Node* pb = b.node().get();
        return [pa, pb, out, r, c]() {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) {
                    if (pa->requires_grad) pa->grad[i * c + j] += out->grad[i * c + j];
                    if (pb->requires_grad) pb->grad[j] += out->grad[i * c + j];
                }
        };
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same(a, b, "sub");
    std::vector<double> vals(a.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = a.values()[i] - b.values()[i];
    return make_op(a.shape(), std::move(vals), {a, b}, [&](Node* out) {
        Node* pa = a.node().get();
        Node* pb = b.node().get();
        return [pa, pb, out]() {
            for (size_t i = 0; i < out->grad.size(); ++i) {
                if (pa->requires_grad) pa->grad[i] += out->grad[i];
                if (pb->requires_grad) pb->grad[i] -= out->grad[i];
            }
        };
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same(a, b, "mul");
    std::vector<double> vals(a.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = a.values()[i] * b.values()[i];
    return make_op(a.shape(), std::move(vals), {a, b}, [&](Node* out) {
        Node* pa = a.node().get();
        Node* pb = b.node().get();
        return [pa, pb, out]() {
            for (size_t i = 0; i < out->grad.size(); ++i) {
                if (pa->requires_grad) pa->grad[i] += out->grad[i] * pb->values[i];
                if (pb->requires_grad) pb->grad[i] += out->grad[i] * pa->values[i];
            }
        };
    });
}

Tensor neg(const Tensor& a) { return affine(a, -1.0); }

Tensor affine(const Tensor& a, double scale, double shift) {
    std::vector<double> vals(a.size());
    for (size_t i = 0; i < vals.size(); ++i) vals[i] = a.values()[i] * scale + shift;
    return make_op(a.shape(), std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, scale]() {
            for (size_t i = 0; i < out->grad.size(); ++i) pa->grad[i] += out->grad[i] * scale;
        };
    });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    require(b.rank() == 2, "matmul: rhs must be rank 2");
    const int m = a.rows(), k = a.cols(), n = b.cols();
    require(b.rows() == k, "matmul: inner dimensions disagree");
    std::vector<double> vals(static_cast<size_t>(m) * n);
    kernels::matmul_nn(a.values().data(), b.values().data(), vals.data(), m, k, n);
    std::vector<int> shape = (a.rank() == 1) ? std::vector<int>{n} : std::vector<int>{m, n};
    return make_op(std::move(shape), std::move(vals), {a, b}, [&](Node* out) {
        Node* pa = a.node().get();
        Node* pb = b.node().get();
        return [pa, pb, out, m, k, n]() {
            // dA += G B^T, dB += A^T G
            if (pa->requires_grad)
                kernels::matmul_nt(out->grad.data(), pb->values.data(), pa->grad.data(), m, n,
                                   k, /*accumulate=*/true);
            if (pb->requires_grad)
                kernels::matmul_tn(pa->values.data(), out->grad.data(), pb->grad.data(), k, m,
                                   n, /*accumulate=*/true);
        };
    });
}

Tensor tanh(const Tensor& a) {
    return unary(
        a, [](double x) { return std::tanh(x); },
        [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor exp(const Tensor& a) {
    return unary(
        a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
    return unary(
        a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
    return unary(
        a, [](double x) { return std::sqrt(x); },
        [](double, double y) { return y == 0.0 ? 0.0 : 0.5 / y; });
}

Tensor square(const Tensor& a) {
    return unary(
        a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    require(lo <= hi, "clamp: lo > hi");
    return unary(
        a, [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
        [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
    double total = 0.0;
    for (double v : a.values()) total += v;
    return make_op({1}, {total}, {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out]() {
            for (auto& g : pa->grad) g += out->grad[0];
        };
    });
}

Tensor mean(const Tensor& a) {
    double total = 0.0;
    for (double v : a.values()) total += v;
    const double inv = 1.0 / static_cast<double>(a.size());
    return make_op({1}, {total * inv}, {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, inv]() {
            for (auto& g : pa->grad) g += out->grad[0] * inv;
        };
    });
}

Tensor rowsum(const Tensor& a) {
    const int r = a.rows(), c = a.cols();
    std::vector<double> vals(r, 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) vals[i] += a.values()[i * c + j];
    return make_op({r, 1}, std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, r, c]() {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) pa->grad[i * c + j] += out->grad[i];
        };
    });
}

Tensor colsum(const Tensor& a) {
    const int r = a.rows(), c = a.cols();
    std::vector<double> vals(c, 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) vals[j] += a.values()[i * c + j];
    return make_op({1, c}, std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, r, c]() {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < c; ++j) pa->grad[i * c + j] += out->grad[j];
        };
    });
}

Tensor softmax_rows(const Tensor& a) {
    const int r = a.rows(), c = a.cols();
    std::vector<double> vals(a.size());
    for (int i = 0; i < r; ++i) {
        const double* x = a.values().data() + static_cast<size_t>(i) * c;
        double mx = x[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, x[j]);
        double z = 0.0;
        for (int j = 0; j < c; ++j) z += std::exp(x[j] - mx);
        for (int j = 0; j < c; ++j) vals[i * c + j] = std::exp(x[j] - mx) / z;
    }
    return make_op(a.shape(), std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, r, c]() {
            for (int i = 0; i < r; ++i) {
                const double* y = out->values.data() + static_cast<size_t>(i) * c;
                const double* g = out->grad.data() + static_cast<size_t>(i) * c;
                double dot = 0.0;
                for (int j = 0; j < c; ++j) dot += g[j] * y[j];
                for (int j = 0; j < c; ++j) pa->grad[i * c + j] += y[j] * (g[j] - dot);
            }
        };
    });
}

Tensor log_softmax_rows(const Tensor& a) {
    const int r = a.rows(), c = a.cols();
    std::vector<double> vals(a.size());
    for (int i = 0; i < r; ++i) {
        const double* x = a.values().data() + static_cast<size_t>(i) * c;
        double mx = x[0];
        for (int j = 1; j < c; ++j) mx = std::max(mx, x[j]);
        double z = 0.0;
        for (int j = 0; j < c; ++j) z += std::exp(x[j] - mx);
        const double lz = std::log(z) + mx;
        for (int j = 0; j < c; ++j) vals[i * c + j] = x[j] - lz;
    }
    return make_op(a.shape(), std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, r, c]() {
            for (int i = 0; i < r; ++i) {
                const double* y = out->values.data() + static_cast<size_t>(i) * c;
                const double* g = out->grad.data() + static_cast<size_t>(i) * c;
                double s = 0.0;
                for (int j = 0; j < c; ++j) s += g[j];
                for (int j = 0; j < c; ++j) pa->grad[i * c + j] += g[j] - std::exp(y[j]) * s;
            }
        };
    });
}

Tensor gather_cols(const Tensor& a, const std::vector<int>& cols) {
    const int r = a.rows(), c = a.cols();
    require(static_cast<int>(cols.size()) == r, "gather_cols: one index per row");
    std::vector<double> vals(r);
    for (int i = 0; i < r; ++i) {
        require(cols[i] >= 0 && cols[i] < c, "gather_cols: index out of range");
        vals[i] = a.values()[i * c + cols[i]];
    }
    return make_op({r, 1}, std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        std::vector<int> idx = cols;
        return [pa, out, idx, c]() {
            for (size_t i = 0; i < idx.size(); ++i)
                pa->grad[i * c + idx[i]] += out->grad[i];
        };
    });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    require(!parts.empty(), "concat_cols: empty input");
    const int r = parts[0].rows();
    int c = 0;
    for (const auto& p : parts) {
        require(p.rows() == r, "concat_cols: row counts disagree");
        c += p.cols();
    }
    std::vector<double> vals(static_cast<size_t>(r) * c);
    int off = 0;
    for (const auto& p : parts) {
        const int pc = p.cols();
        for (int i = 0; i < r; ++i)
            std::memcpy(vals.data() + static_cast<size_t>(i) * c + off,
                        p.values().data() + static_cast<size_t>(i) * pc,
                        sizeof(double) * pc);
        off += pc;
    }
    return make_op({r, c}, std::move(vals), parts, [&](Node* out) {
        struct Piece {
            Node* node;
            int off;
            int cols;
        };
        std::vector<Piece> pieces;
        int o = 0;
        for (const auto& p : parts) {
            pieces.push_back({p.node().get(), o, p.cols()});
            o += p.cols();
        }
        return [out, pieces, r, c]() {
            for (const auto& pc : pieces) {
                if (!pc.node->requires_grad) continue;
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < pc.cols; ++j)
                        pc.node->grad[i * pc.cols + j] += out->grad[i * c + pc.off + j];
            }
        };
    });
}

Tensor slice_cols(const Tensor& a, int start, int len) {
    const int r = a.rows(), c = a.cols();
    require(start >= 0 && len > 0 && start + len <= c, "slice_cols: range out of bounds");
    std::vector<double> vals(static_cast<size_t>(r) * len);
    for (int i = 0; i < r; ++i)
        std::memcpy(vals.data() + static_cast<size_t>(i) * len,
                    a.values().data() + static_cast<size_t>(i) * c + start,
                    sizeof(double) * len);
    return make_op({r, len}, std::move(vals), {a}, [&](Node* out) {
        Node* pa = a.node().get();
        return [pa, out, r, c, start, len]() {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < len; ++j)
                    pa->grad[i * c + start + j] += out->grad[i * len + j];
        };
    });
}

Tensor stack_rows(const std::vector<Tensor>& parts) {
    require(!parts.empty(), "stack_rows: empty input");
    const int c = parts[0].cols();
    int r = 0;
    for (const auto& p : parts) {
        require(p.cols() == c, "stack_rows: column counts disagree");
        r += p.rows();
    }
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(r) * c);
    for (const auto& p : parts) vals.insert(vals.end(), p.values().begin(), p.values().end());
    return make_op({r, c}, std::move(vals), parts, [&](Node* out) {
        struct Piece {
            Node* node;
            size_t off;
            size_t count;
        };
        std::vector<Piece> pieces;
        size_t o = 0;
        for (const auto& p : parts) {
            pieces.push_back({p.node().get(), o, p.size()});
            o += p.size();
        }
        return [out, pieces]() {
            for (const auto& pc : pieces) {
                if (!pc.node->requires_grad) continue;
                for (size_t i = 0; i < pc.count; ++i)
                    pc.node->grad[i] += out->grad[pc.off + i];
            }
        };
    });
}

Tensor detach(const Tensor& a) { return Tensor::constant(a.shape(), a.values()); }

}  // namespace omlab::core
