#pragma once

#include <functional>
#include <string>

namespace omlab::envs {

// Scripted matrix-game opponents; ids are stable project-wide.
enum MatrixOpp : int {
    kAlwaysDefect = 0,
    kAlwaysCooperate = 1,
    kTitForTat = 2,
    kGrimTrigger = 3,
    kAlternator = 4,
};
inline constexpr int kNumMatrixOpponents = 5;

std::string matrix_opp_name(int id);

// Deterministic finite-state form, shared by the env and the planning oracle.
// act may also depend on the timestep (e.g. the alternator).
struct OpponentFsm {
    int num_states = 1;
    int initial_state = 0;
    std::function<int(int state, int t)> act;
    std::function<int(int state, int agent_action)> next;
};

OpponentFsm matrix_opponent_fsm(int id);

}  // namespace omlab::envs
