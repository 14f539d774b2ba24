#pragma once

#include <vector>

namespace omlab::rl {

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;  // advantages + values, the critic targets
};

// Generalized advantage estimation over one reward/value series:
//   A_t = sum_{l>=0} (gamma*lambda)^l delta_{t+l},
//   delta_t = r_t + gamma*V_{t+1} - V_t, with V_T = bootstrap_value.
GaeResult gae_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                         double bootstrap_value, double gamma, double lambda);

}  // namespace omlab::rl
