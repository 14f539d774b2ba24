#include "omlab/envs/matrix_game.hpp"

#include "omlab/core/error.hpp"

namespace omlab::envs {

namespace {

// [C, D, none]
void push_one_hot3(std::vector<double>& out, int action) {
    out.push_back(action == 0 ? 1.0 : 0.0);
    out.push_back(action == 1 ? 1.0 : 0.0);
    out.push_back(action < 0 ? 1.0 : 0.0);
}

}  // namespace

double Payoffs::agent_reward(int my_action, int opp_action) const {
    if (my_action == 0) return opp_action == 0 ? r : s;
    return opp_action == 0 ? t : p;
}

RepeatedMatrixGame::RepeatedMatrixGame(int opponent_id, int horizon, Payoffs payoffs)
    : opponent_id_(opponent_id),
      horizon_(horizon),
      payoffs_(payoffs),
      fsm_(matrix_opponent_fsm(opponent_id)) {
    require(horizon > 0, "matrix game: horizon must be positive");
}

std::vector<double> RepeatedMatrixGame::agent_obs() const {
    std::vector<double> o;
    o.reserve(kObsDim);
    push_one_hot3(o, prev_agent_);
    push_one_hot3(o, prev_opp_);
    return o;
}

std::vector<double> RepeatedMatrixGame::opp_obs() const {
    std::vector<double> o;
    o.reserve(kObsDim);
    push_one_hot3(o, prev_opp_);
    push_one_hot3(o, prev_agent_);
    return o;
}

std::vector<double> RepeatedMatrixGame::reset(core::Rng&) {
    fsm_state_ = fsm_.initial_state;
    t_ = 0;
    prev_agent_ = -1;
    prev_opp_ = -1;
    done_ = false;
    opp_history_.clear();
    return agent_obs();
}

OppStep RepeatedMatrixGame::preview() const {
    require(!done_, "matrix game: episode is over");
    return {opp_obs(), fsm_.act(fsm_state_, t_)};
}

StepResult RepeatedMatrixGame::step(int action) {
    require(!done_, "matrix game: episode is over");
    require(action == 0 || action == 1, "matrix game: action must be 0 or 1");
    const int opp_action = fsm_.act(fsm_state_, t_);
    opp_history_.push_back({opp_obs(), opp_action});

    StepResult res;
    res.reward = payoffs_.agent_reward(action, opp_action);
    fsm_state_ = fsm_.next(fsm_state_, action);
    prev_agent_ = action;
    prev_opp_ = opp_action;
    ++t_;
    done_ = t_ >= horizon_;
    res.done = done_;
    res.obs = agent_obs();
    return res;
}

}  // namespace omlab::envs
