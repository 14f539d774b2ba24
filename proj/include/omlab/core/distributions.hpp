#pragma once

#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"

namespace omlab::core {

// Diagonal Gaussian over rows: each row of mean/log_std is one distribution.
struct DiagGaussian {
    Tensor mean;     // [r, d]
    Tensor log_std;  // [r, d]
};

// z = mean + exp(log_std) * noise, differentiable through mean/log_std.
Tensor reparam_sample(const DiagGaussian& q, const Tensor& noise);
// Same, drawing noise ~ N(0, I) from rng.
Tensor reparam_sample(const DiagGaussian& q, Rng& rng);

// KL(q || N(0, I)) summed over all rows and dimensions (scalar).
Tensor kl_to_standard_normal(const DiagGaussian& q);
// Per-row KL, [r, 1].
Tensor kl_rows(const DiagGaussian& q);

}  // namespace omlab::core
