#include "omlab/core/distributions.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::core {

namespace {

void check(const DiagGaussian& q) {
    require(q.mean.shape() == q.log_std.shape(), "DiagGaussian: mean/log_std shape mismatch");
}

// 0.5 * (mu^2 + exp(2s) - 1 - 2s), elementwise
Tensor kl_elem(const DiagGaussian& q) {
    Tensor a = square(q.mean);
    Tensor b = exp(affine(q.log_std, 2.0));
    Tensor c = affine(q.log_std, -2.0, -1.0);
    return affine(add(add(a, b), c), 0.5);
}

}  // namespace

Tensor reparam_sample(const DiagGaussian& q, const Tensor& noise) {
    check(q);
    require(noise.shape() == q.mean.shape(), "reparam_sample: noise shape mismatch");
    return add(q.mean, mul(exp(q.log_std), noise));
}

Tensor reparam_sample(const DiagGaussian& q, Rng& rng) {
    check(q);
    return reparam_sample(q, Tensor::constant(q.mean.shape(), rng.normal_vec(q.mean.size())));
}

Tensor kl_to_standard_normal(const DiagGaussian& q) {
    check(q);
    return sum(kl_elem(q));
}

Tensor kl_rows(const DiagGaussian& q) {
    check(q);
    return rowsum(kl_elem(q));
}

}  // namespace omlab::core
