#pragma once

#include <map>

#include "omlab/core/layers.hpp"
#include "omlab/core/random.hpp"
#include "omlab/envs/trajectory.hpp"
#include "omlab/vae/encoder.hpp"

namespace omlab::rl {

// Where the evaluation-time latent comes from: the agent's own stream
// (SMA2C — no privileged reads) or the opponent's previewed stream (OMDDPG —
// every step is a counted privileged access).
enum class LatentMode { kSelf, kOpponent };

struct EvalResult {
    double mean_return = 0.0;
    std::map<int, double> per_opponent;  // mean return per opponent id
    long opp_reads = 0;                  // privileged accesses during evaluation
    int episodes = 0;
};

// Greedy policy rollout: at each step z is sampled from the current posterior,
// the actor sees [obs | z], and the argmax action is executed. No learning.
EvalResult evaluate_policy(const envs::EnvFactory& make_env, const envs::Pool& pool,
                           const core::Mlp& actor, const vae::TrajectoryEncoder& enc,
                           LatentMode mode, int episodes_per_opponent, core::Rng& rng);

}  // namespace omlab::rl
