#include "omlab/envs/oracle.hpp"

#include <vector>

#include "omlab/core/error.hpp"

namespace omlab::envs {

double optimal_return_oracle(const OpponentFsm& fsm, const Payoffs& payoffs, int horizon) {
    require(horizon > 0, "oracle: horizon must be positive");
    require(fsm.num_states > 0, "oracle: FSM needs at least one state");
    // V[s] = best achievable from (t, s); swept backwards from t = horizon.
    std::vector<double> v(fsm.num_states, 0.0), nv(fsm.num_states, 0.0);
    for (int t = horizon - 1; t >= 0; --t) {
        for (int s = 0; s < fsm.num_states; ++s) {
            const int opp = fsm.act(s, t);
            double best = -1e300;
            for (int a = 0; a < 2; ++a) {
                const double q = payoffs.agent_reward(a, opp) + v[fsm.next(s, a)];
                if (q > best) best = q;
            }
            nv[s] = best;
        }
        std::swap(v, nv);
    }
    return v[fsm.initial_state];
}

double optimal_return_oracle(int opponent_id, const Payoffs& payoffs, int horizon) {
    return optimal_return_oracle(matrix_opponent_fsm(opponent_id), payoffs, horizon);
}

}  // namespace omlab::envs
