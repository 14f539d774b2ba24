#pragma once

#include <cstddef>
#include <vector>

#include "omlab/core/adam.hpp"
#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/rl/replay_buffer.hpp"

namespace omlab::rl {

struct DdpgConfig {
    double gamma = 0.99;
    double gumbel_tau = 1.0;  // relaxation temperature for discrete actions
    double rho = 0.01;        // polyak rate
    double lr = 3e-4;
    int batch_size = 128;
    std::size_t buffer_capacity = 100000;
    int warmup_steps = 1000;  // env steps before updates begin
    int update_every = 4;     // env steps between updates
    double eps_start = 0.3;   // epsilon-greedy exploration, annealed linearly
    double eps_end = 0.05;
    int eps_anneal_steps = 20000;
    double grad_clip = 0.5;
    std::vector<int> actor_hidden = {64, 64};
    std::vector<int> critic_hidden = {64, 64};
};

// Actor mu(s) -> action logits and critic Q(s, a), each with a polyak-averaged
// target copy. The state is the augmented observation [obs | z]; actions enter
// the critic as (relaxed) one-hot vectors.
struct DdpgAgent {
    DdpgAgent() = default;
    DdpgAgent(int state_dim, int num_actions, const DdpgConfig& cfg, core::Rng& rng);

    core::Mlp actor, critic, actor_target, critic_target;
    int state_dim = 0;
    int num_actions = 0;

    core::NamedParams actor_params() const;
    core::NamedParams critic_params() const;
};

struct DdpgLosses {
    double critic = 0.0;
    double actor = 0.0;
};

// Frozen regression targets y_i = r_i + gamma (1 - done_i) Q'(s', a~'), with
// a~' a soft Gumbel sample from the target actor's logits.
std::vector<double> ddpg_targets(const core::Mlp& actor_target, const core::Mlp& critic_target,
                                 const std::vector<const Transition*>& batch, double gamma,
                                 double gumbel_tau, core::Rng& rng);

// One critic step toward the frozen targets, one actor step through the
// critic (fresh relaxed actions), then polyak updates of both targets.
DdpgLosses ddpg_update(DdpgAgent& agent, const std::vector<const Transition*>& batch,
                       const DdpgConfig& cfg, core::Adam& actor_opt, core::Adam& critic_opt,
                       core::Rng& rng);

}  // namespace omlab::rl
