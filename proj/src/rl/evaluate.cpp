#include "omlab/rl/evaluate.hpp"

#include "omlab/core/distributions.hpp"
#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"
#include "omlab/rl/nets.hpp"

namespace omlab::rl {

using namespace core;

EvalResult evaluate_policy(const envs::EnvFactory& make_env, const envs::Pool& pool,
                           const Mlp& actor, const vae::TrajectoryEncoder& enc, LatentMode mode,
                           int episodes_per_opponent, Rng& rng) {
    require(!pool.ids.empty(), "evaluate: empty pool");
    require(episodes_per_opponent > 0, "evaluate: need at least one episode");

    EvalResult out;
    double total = 0.0;
    for (int id : pool.ids) {
        double id_total = 0.0;
        for (int ep = 0; ep < episodes_per_opponent; ++ep) {
            auto env = make_env(id);
            std::vector<double> obs = env->reset(rng);
            env->reset_opp_access_count();

            Tensor h = enc.initial_state(1);
            double ep_return = 0.0;
            bool done = false;
            while (!done) {
                if (mode == LatentMode::kOpponent) {
                    envs::OppStep pv = env->opp_preview();
                    h = enc.gru.step(enc.build_input({&pv.obs}, {pv.action}), h);
                }
                Tensor z = reparam_sample(enc.posterior(h), rng);
                Tensor x = concat_cols({Tensor::constant({1, static_cast<int>(obs.size())},
                                                         std::vector<double>(obs)),
                                        z});
                const int a = argmax_row(actor(x).values());
                envs::StepResult sr = env->step(a);
                ep_return += sr.reward;
                done = sr.done;
                if (mode == LatentMode::kSelf)
                    h = enc.gru.step(
                        enc.build_input({&obs}, {a}, {sr.reward}, {done ? 1.0 : 0.0}), h);
                obs = std::move(sr.obs);
            }
            id_total += ep_return;
            out.opp_reads += env->opp_access_count();
            ++out.episodes;
        }
        out.per_opponent[id] = id_total / episodes_per_opponent;
        total += id_total;
    }
    out.mean_return = total / out.episodes;
    return out;
}

}  // namespace omlab::rl
