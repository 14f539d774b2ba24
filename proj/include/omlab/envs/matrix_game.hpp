#pragma once

#include "omlab/envs/env.hpp"
#include "omlab/envs/opponents.hpp"

namespace omlab::envs {

// Standard prisoner's dilemma payoffs by default (T > R > P > S).
struct Payoffs {
    double t = 5.0;  // temptation: I defect, they cooperate
    double r = 3.0;  // mutual cooperation
    double p = 1.0;  // mutual defection
    double s = 0.0;  // sucker: I cooperate, they defect
    double agent_reward(int my_action, int opp_action) const;
};

// Repeated 2x2 matrix game against a scripted opponent. Action 0 cooperates,
// action 1 defects. Observations are both players' previous actions, one-hot
// with a "no move yet" slot: [me C,D,none | them C,D,none].
class RepeatedMatrixGame : public Env {
  public:
    static constexpr int kObsDim = 6;

    explicit RepeatedMatrixGame(int opponent_id, int horizon = 25, Payoffs payoffs = {});

    int obs_dim() const override { return kObsDim; }
    int num_actions() const override { return 2; }
    int opp_obs_dim() const override { return kObsDim; }
    int opp_num_actions() const override { return 2; }
    int horizon() const override { return horizon_; }
    int opponent_id() const override { return opponent_id_; }

    std::vector<double> reset(core::Rng& rng) override;
    StepResult step(int action) override;

    const Payoffs& payoffs() const { return payoffs_; }

  protected:
    OppStep preview() const override;

  private:
    std::vector<double> agent_obs() const;
    std::vector<double> opp_obs() const;

    int opponent_id_;
    int horizon_;
    Payoffs payoffs_;
    OpponentFsm fsm_;
    int fsm_state_ = 0;
    int t_ = 0;
    int prev_agent_ = -1;  // -1 = no move yet
    int prev_opp_ = -1;
    bool done_ = true;
};

}  // namespace omlab::envs
