#include "omlab/envs/trajectory.hpp"

#include <fstream>
#include <numeric>

#include "json.hpp"
#include "omlab/core/error.hpp"

namespace omlab::envs {

using nlohmann::json;

double Trajectory::total_reward() const {
    return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

PolicyFn random_policy(int num_actions) {
    return [num_actions](const std::vector<double>&, core::Rng& rng) {
        return rng.uniform_int(num_actions);
    };
}

std::vector<Trajectory> record_trajectories(const EnvFactory& make_env, const Pool& pool,
                                            int episodes_per_opponent, const PolicyFn& policy,
                                            core::Rng& rng) {
    require(episodes_per_opponent > 0, "record_trajectories: need at least one episode");
    std::vector<Trajectory> out;
    out.reserve(pool.ids.size() * static_cast<size_t>(episodes_per_opponent));
    for (int id : pool.ids) {
        auto env = make_env(id);
        for (int ep = 0; ep < episodes_per_opponent; ++ep) {
            Trajectory tr;
            tr.opponent_id = id;
            auto obs = env->reset(rng);
            bool done = false;
            while (!done) {
                const int a = policy(obs, rng);
                tr.obs.push_back(obs);
                tr.actions.push_back(a);
                auto res = env->step(a);
                tr.rewards.push_back(res.reward);
                obs = std::move(res.obs);
                done = res.done;
            }
            for (const auto& s : env->opp_history()) {
                tr.opp_obs.push_back(s.obs);
                tr.opp_actions.push_back(s.action);
            }
            require(tr.opp_actions.size() == tr.actions.size(),
                    "record_trajectories: opponent stream length mismatch");
            out.push_back(std::move(tr));
        }
    }
    return out;
}

void write_trajectories_jsonl(const std::string& path, const std::vector<Trajectory>& trips) {
    std::ofstream f(path);
    require(f.good(), "trajectories: cannot open '" + path + "' for writing");
    for (const auto& tr : trips) {
        json line = {{"opponent_id", tr.opponent_id},
                     {"tau",
                      {{"obs", tr.obs}, {"actions", tr.actions}, {"rewards", tr.rewards}}},
                     {"tau_opp", {{"obs", tr.opp_obs}, {"actions", tr.opp_actions}}}};
        f << line.dump() << '\n';
    }
    require(f.good(), "trajectories: write to '" + path + "' failed");
}

std::vector<Trajectory> read_trajectories_jsonl(const std::string& path) {
    std::ifstream f(path);
    require(f.good(), "trajectories: cannot open '" + path + "'");
    std::vector<Trajectory> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        Trajectory tr;
        tr.opponent_id = j.at("opponent_id").get<int>();
        const auto& tau = j.at("tau");
        tr.obs = tau.at("obs").get<std::vector<std::vector<double>>>();
        tr.actions = tau.at("actions").get<std::vector<int>>();
        tr.rewards = tau.at("rewards").get<std::vector<double>>();
        const auto& opp = j.at("tau_opp");
        tr.opp_obs = opp.at("obs").get<std::vector<std::vector<double>>>();
        tr.opp_actions = opp.at("actions").get<std::vector<int>>();
        out.push_back(std::move(tr));
    }
    return out;
}

}  // namespace omlab::envs
