#include "omlab/rl/a2c.hpp"

#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"
#include "omlab/rl/gae.hpp"

namespace omlab::rl {

using namespace core;

Tensor a2c_loss(const RolloutBatch& batch, const A2cConfig& cfg, A2cLosses* parts) {
    const int t_len = batch.steps();
    const int n = batch.n_envs;
    require(t_len > 0 && n > 0, "a2c: empty rollout");
    require(batch.logits.size() == static_cast<std::size_t>(t_len) &&
                batch.values.size() == static_cast<std::size_t>(t_len) &&
                batch.rewards.size() == static_cast<std::size_t>(t_len),
            "a2c: ragged rollout arrays");
    require(batch.bootstrap.size() == static_cast<std::size_t>(n), "a2c: bootstrap size");
    for (int t = 0; t < t_len; ++t) {
        require(batch.logits[t].rows() == n && batch.values[t].rows() == n &&
                    batch.values[t].cols() == 1 &&
                    batch.actions[t].size() == static_cast<std::size_t>(n) &&
                    batch.rewards[t].size() == static_cast<std::size_t>(n),
                "a2c: rollout row counts disagree");
    }

    // GAE per env column on the numeric value estimates.
    std::vector<std::vector<double>> adv(t_len, std::vector<double>(n));
    std::vector<std::vector<double>> ret(t_len, std::vector<double>(n));
    for (int e = 0; e < n; ++e) {
        std::vector<double> r(t_len), v(t_len);
        for (int t = 0; t < t_len; ++t) {
            r[t] = batch.rewards[t][e];
            v[t] = batch.values[t].values()[e];
        }
        GaeResult g = gae_advantages(r, v, batch.bootstrap[e], cfg.gamma, cfg.gae_lambda);
        for (int t = 0; t < t_len; ++t) {
            adv[t][e] = g.advantages[t];
            ret[t][e] = g.returns[t];
        }
    }

    Tensor policy_acc, value_acc, entropy_acc;
    for (int t = 0; t < t_len; ++t) {
        Tensor lp = log_softmax_rows(batch.logits[t]);
        Tensor picked = gather_cols(lp, batch.actions[t]);                    // [N,1]
        Tensor adv_t = Tensor::constant({n, 1}, std::vector<double>(adv[t]));  // detached
        Tensor p_term = sum(mul(adv_t, picked));

        Tensor ret_t = Tensor::constant({n, 1}, std::vector<double>(ret[t]));
        Tensor v_term = sum(square(sub(batch.values[t], ret_t)));

        Tensor e_term = neg(sum(mul(softmax_rows(batch.logits[t]), lp)));

        policy_acc = policy_acc.defined() ? add(policy_acc, p_term) : p_term;
        value_acc = value_acc.defined() ? add(value_acc, v_term) : v_term;
        entropy_acc = entropy_acc.defined() ? add(entropy_acc, e_term) : e_term;
    }

    const double inv = 1.0 / (static_cast<double>(t_len) * n);
    Tensor policy_loss = affine(policy_acc, -inv);
    Tensor value_loss = affine(value_acc, 0.5 * inv);
    Tensor entropy_mean = affine(entropy_acc, inv);
    Tensor total = add(add(policy_loss, affine(value_loss, cfg.value_coef)),
                       affine(entropy_mean, -cfg.entropy_coef));
    if (parts) {
        parts->policy = policy_loss.values()[0];
        parts->value = value_loss.values()[0];
        parts->entropy = entropy_mean.values()[0];
        parts->total = total.values()[0];
    }
    return total;
}

}  // namespace omlab::rl
