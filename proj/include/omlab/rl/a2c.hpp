#pragma once

#include <vector>

#include "omlab/core/tensor.hpp"

namespace omlab::rl {

struct A2cConfig {
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double value_coef = 0.5;
    double entropy_coef = 0.01;
};

// One rollout window across N synchronous envs. The actor/critic outputs stay
// graph tensors so the loss can backpropagate through them (and, for SMA2C,
// through the z that produced them); everything else is plain numbers.
struct RolloutBatch {
    int n_envs = 0;
    std::vector<core::Tensor> logits;          // per step, [N, A]
    std::vector<core::Tensor> values;          // per step, [N, 1]
    std::vector<std::vector<int>> actions;     // [T][N]
    std::vector<std::vector<double>> rewards;  // [T][N]
    std::vector<double> bootstrap;             // [N], V(s_T); zeros at episode end

    int steps() const { return static_cast<int>(actions.size()); }
};

struct A2cLosses {
    double policy = 0.0;
    double value = 0.0;
    double entropy = 0.0;  // mean policy entropy (a bonus, not a loss)
    double total = 0.0;
};

// mean[-A_t log pi(a_t|s_t)] + value_coef * mean[(ret_t - V_t)^2 / 2]
//   - entropy_coef * mean[H(pi(.|s_t))]
// Advantages come from GAE on the numeric values and enter as constants, so
// the actor term never differentiates through the critic.
core::Tensor a2c_loss(const RolloutBatch& batch, const A2cConfig& cfg, A2cLosses* parts);

}  // namespace omlab::rl
