#include "omlab/rl/gae.hpp"

#include "omlab/core/error.hpp"

namespace omlab::rl {

GaeResult gae_advantages(const std::vector<double>& rewards, const std::vector<double>& values,
                         double bootstrap_value, double gamma, double lambda) {
    require(rewards.size() == values.size(), "gae: rewards/values length mismatch");
    require(gamma >= 0.0 && gamma <= 1.0 && lambda >= 0.0 && lambda <= 1.0,
            "gae: gamma and lambda must lie in [0, 1]");
    const int t_len = static_cast<int>(rewards.size());
    GaeResult out;
    out.advantages.resize(t_len);
    out.returns.resize(t_len);
    double acc = 0.0;
    for (int t = t_len - 1; t >= 0; --t) {
        const double next_v = (t + 1 < t_len) ? values[t + 1] : bootstrap_value;
        const double delta = rewards[t] + gamma * next_v - values[t];
        acc = delta + gamma * lambda * acc;
        out.advantages[t] = acc;
        out.returns[t] = acc + values[t];
    }
    return out;
}

}  // namespace omlab::rl
