#pragma once

#include "omlab/envs/matrix_game.hpp"
#include "omlab/envs/opponents.hpp"

namespace omlab::envs {

// Max total agent payoff over the horizon against a known opponent FSM,
// by dynamic programming over (timestep, opponent state).
double optimal_return_oracle(const OpponentFsm& fsm, const Payoffs& payoffs, int horizon);

// Convenience for the stock opponents.
double optimal_return_oracle(int opponent_id, const Payoffs& payoffs = {}, int horizon = 25);

}  // namespace omlab::envs
