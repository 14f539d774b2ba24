#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "omlab/core/random.hpp"
#include "omlab/envs/env.hpp"
#include "omlab/envs/pool.hpp"

namespace omlab::envs {

// One full episode from both sides of the table.
struct Trajectory {
    int opponent_id = -1;
    std::vector<std::vector<double>> obs;  // what the agent saw before each action
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<std::vector<double>> opp_obs;
    std::vector<int> opp_actions;

    int length() const { return static_cast<int>(actions.size()); }
    double total_reward() const;
};

using EnvFactory = std::function<std::unique_ptr<Env>(int opponent_id)>;
using PolicyFn = std::function<int(const std::vector<double>& obs, core::Rng& rng)>;

// Uniform-random behavior policy, the default collector.
PolicyFn random_policy(int num_actions);

// Rolls `episodes_per_opponent` episodes against every id in the pool.
std::vector<Trajectory> record_trajectories(const EnvFactory& make_env, const Pool& pool,
                                            int episodes_per_opponent, const PolicyFn& policy,
                                            core::Rng& rng);

// JSONL: {"opponent_id":..,"tau":{"obs","actions","rewards"},"tau_opp":{"obs","actions"}}
void write_trajectories_jsonl(const std::string& path, const std::vector<Trajectory>& trips);
std::vector<Trajectory> read_trajectories_jsonl(const std::string& path);

}  // namespace omlab::envs
