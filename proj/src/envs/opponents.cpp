#include "omlab/envs/opponents.hpp"

#include "omlab/core/error.hpp"

namespace omlab::envs {

std::string matrix_opp_name(int id) {
    switch (id) {
        case kAlwaysDefect: return "always_defect";
        case kAlwaysCooperate: return "always_cooperate";
        case kTitForTat: return "tit_for_tat";
        case kGrimTrigger: return "grim_trigger";
        case kAlternator: return "alternator";
        default: throw ContractViolation("unknown matrix opponent id");
    }
}

OpponentFsm matrix_opponent_fsm(int id) {
    OpponentFsm f;
    switch (id) {
        case kAlwaysDefect:
            f.act = [](int, int) { return 1; };
            f.next = [](int, int) { return 0; };
            return f;
        case kAlwaysCooperate:
            f.act = [](int, int) { return 0; };
            f.next = [](int, int) { return 0; };
            return f;
        case kTitForTat:
            // 0: opening move, 1: agent last cooperated, 2: agent last defected
            f.num_states = 3;
            f.act = [](int s, int) { return s == 2 ? 1 : 0; };
            f.next = [](int, int a) { return a == 1 ? 2 : 1; };
            return f;
        case kGrimTrigger:
            // 0: calm, 1: triggered for good
            f.num_states = 2;
            f.act = [](int s, int) { return s; };
            f.next = [](int s, int a) { return (s == 1 || a == 1) ? 1 : 0; };
            return f;
        case kAlternator:
            f.act = [](int, int t) { return t % 2; };
            f.next = [](int, int) { return 0; };
            return f;
        default:
            throw ContractViolation("unknown matrix opponent id");
    }
}

}  // namespace omlab::envs
