#pragma once

#include <vector>

#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/core/tensor.hpp"

namespace omlab::rl {

// Differentiable relaxed categorical sample: softmax((logits + g) / temperature)
// with fresh Gumbel(0,1) noise g per element. Gradients flow into the logits.
core::Tensor gumbel_softmax(const core::Tensor& logits, double temperature, core::Rng& rng);

int argmax_row(const std::vector<double>& row);
// Row-wise argmax of a [B, A] tensor's values.
std::vector<int> argmax_rows(const core::Tensor& t);

// Categorical draw per row from softmax(logits), computed numerically.
std::vector<int> sample_rows(const core::Tensor& logits, core::Rng& rng);

std::vector<double> one_hot(int index, int width);

// dst <- (1 - rho) * dst + rho * src over aligned parameter lists.
// rho = 1 makes dst an exact copy, which is how target networks start.
void polyak_update(const core::NamedParams& src, const core::NamedParams& dst, double rho);

}  // namespace omlab::rl
