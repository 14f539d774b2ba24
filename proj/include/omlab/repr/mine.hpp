#pragma once

#include <vector>

#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/repr/embeddings.hpp"

namespace omlab::repr {

// MINE is noisy, so the whole protocol is pinned: a 2x64 tanh statistic net
// trained full-batch with Adam, the marginal realized by shuffling identities
// in-batch, and the reported estimate the best trailing moving average of the
// held-out Donsker-Varadhan bound.
struct MineConfig {
    int epochs = 200;
    double lr = 1e-3;
    std::vector<int> hidden = {64, 64};
    double train_frac = 0.8;
    int trailing_window = 10;
};

struct MineResult {
    double estimate = 0.0;          // nats
    std::vector<double> history;    // held-out DV bound after each epoch
};

// Donsker-Varadhan bound of a fixed statistic net on a labeled set:
//   E_joint[T(z, id)] - log E_marginal[e^T(z, id')]
// with the marginal ids given by `marginal_perm` (a permutation of sample
// indices; sample i is paired with sample marginal_perm[i]'s identity).
// `id_order` lists the distinct opponent ids in one-hot column order.
double dv_bound(const core::Mlp& statistic, const std::vector<EmbeddingSample>& samples,
                const std::vector<int>& marginal_perm, const std::vector<int>& id_order);

// Trains the statistic net on an 80/20 split and returns the best
// trailing-window moving average of the held-out bound. Throws MetricError
// when the dataset carries fewer than two distinct identities.
MineResult mine_estimate(const std::vector<EmbeddingSample>& samples, const MineConfig& cfg,
                         core::Rng& rng);

}  // namespace omlab::repr
