#pragma once

#include <vector>

#include "omlab/core/random.hpp"

namespace omlab::envs {

struct StepResult {
    std::vector<double> obs;
    double reward = 0.0;
    bool done = false;
};

// One completed step of the modeled agent: what it saw, what it did.
struct OppStep {
    std::vector<double> obs;
    int action = 0;
};

// Single-learner view of a two-player game: the scripted opponent lives
// inside the env. Anything that touches the opponent's side goes through the
// counted accessors below, so experiments can audit exactly who read
// privileged state and when.
class Env {
  public:
    virtual ~Env() = default;

    virtual int obs_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual int opp_obs_dim() const = 0;
    virtual int opp_num_actions() const = 0;
    virtual int horizon() const = 0;
    virtual int opponent_id() const = 0;

    virtual std::vector<double> reset(core::Rng& rng) = 0;
    virtual StepResult step(int action) = 0;

    // Completed opponent steps this episode. Counted access.
    const std::vector<OppStep>& opp_history() const {
        ++opp_reads_;
        return opp_history_;
    }
    // The opponent's current observation and the action it is about to take.
    // Deterministic opponents make this well-defined. Counted access.
    OppStep opp_preview() const {
        ++opp_reads_;
        return preview();
    }

    long opp_access_count() const { return opp_reads_; }
    void reset_opp_access_count() { opp_reads_ = 0; }

  protected:
    virtual OppStep preview() const = 0;

    std::vector<OppStep> opp_history_;
    mutable long opp_reads_ = 0;
};

}  // namespace omlab::envs
