#include "omlab/repr/mine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "omlab/core/adam.hpp"
#include "omlab/core/error.hpp"
#include "omlab/core/ops.hpp"

namespace omlab::repr {

using namespace core;

namespace {

int id_index(const std::vector<int>& id_order, int id) {
    const auto it = std::find(id_order.begin(), id_order.end(), id);
    require(it != id_order.end(), "mine: sample id missing from id order");
    return static_cast<int>(it - id_order.begin());
}

// [B, z+M] rows: sample i's latent next to sample ids[i]'s one-hot identity.
Tensor mine_input(const std::vector<const EmbeddingSample*>& samples,
                  const std::vector<int>& id_of_row, const std::vector<int>& id_order) {
    const int b = static_cast<int>(samples.size());
    const int zd = static_cast<int>(samples[0]->z.size());
    const int m = static_cast<int>(id_order.size());
    std::vector<double> flat(static_cast<std::size_t>(b) * (zd + m), 0.0);
    for (int i = 0; i < b; ++i) {
        require(static_cast<int>(samples[i]->z.size()) == zd, "mine: ragged latent widths");
        double* row = flat.data() + static_cast<std::size_t>(i) * (zd + m);
        std::copy(samples[i]->z.begin(), samples[i]->z.end(), row);
        row[zd + id_index(id_order, id_of_row[i])] = 1.0;
    }
    return Tensor::constant({b, zd + m}, std::move(flat));
}

// log(mean(exp(v))) with the max detached for stability; numeric twin below.
Tensor log_mean_exp(const Tensor& v) {
    const double mx = *std::max_element(v.values().begin(), v.values().end());
    return affine(log(mean(exp(affine(v, 1.0, -mx)))), 1.0, mx);
}

double log_mean_exp(const std::vector<double>& v) {
    const double mx = *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - mx);
    return mx + std::log(acc / static_cast<double>(v.size()));
}

double dv_value(const Mlp& net, const std::vector<const EmbeddingSample*>& samples,
                const std::vector<int>& marginal_ids, const std::vector<int>& id_order) {
    std::vector<int> joint_ids(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) joint_ids[i] = samples[i]->opponent_id;
    const auto tj = net(mine_input(samples, joint_ids, id_order)).values();
    const auto tm = net(mine_input(samples, marginal_ids, id_order)).values();
    const double mean_j = std::accumulate(tj.begin(), tj.end(), 0.0) / tj.size();
    return mean_j - log_mean_exp(tm);
}

}  // namespace

double dv_bound(const Mlp& statistic, const std::vector<EmbeddingSample>& samples,
                const std::vector<int>& marginal_perm, const std::vector<int>& id_order) {
    require(!samples.empty(), "mine: empty sample set");
    require(marginal_perm.size() == samples.size(), "mine: permutation length mismatch");
    require(!id_order.empty(), "mine: empty id order");
    std::vector<const EmbeddingSample*> ptrs(samples.size());
    std::vector<int> marg_ids(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        ptrs[i] = &samples[i];
        const int j = marginal_perm[i];
        require(j >= 0 && j < static_cast<int>(samples.size()), "mine: permutation out of range");
        marg_ids[i] = samples[j].opponent_id;
    }
    return dv_value(statistic, ptrs, marg_ids, id_order);
}

MineResult mine_estimate(const std::vector<EmbeddingSample>& samples, const MineConfig& cfg,
                         Rng& rng) {
    require(cfg.epochs > 0, "mine: need at least one epoch");
    require(cfg.train_frac > 0.0 && cfg.train_frac < 1.0, "mine: train fraction must be in (0,1)");
    require(samples.size() >= 4, "mine: too few samples to split");

    std::set<int> distinct;
    for (const auto& s : samples) distinct.insert(s.opponent_id);
    if (distinct.size() < 2)
        throw MetricError("mine: mutual information with identity is undefined for a single id");
    const std::vector<int> id_order(distinct.begin(), distinct.end());

    // 80/20 split on a shuffled index order.
    std::vector<int> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::size_t n_train = static_cast<std::size_t>(cfg.train_frac * samples.size());
    n_train = std::min(std::max<std::size_t>(n_train, 1), samples.size() - 1);

    std::vector<const EmbeddingSample*> train;
    std::vector<EmbeddingSample> test;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (k < n_train)
            train.push_back(&samples[order[k]]);
        else
            test.push_back(samples[order[k]]);
    }

    const int zd = static_cast<int>(samples[0].z.size());
    Mlp net(zd + static_cast<int>(id_order.size()), cfg.hidden, 1, rng);
    NamedParams ps;
    net.params(ps, "statistic");
    AdamConfig ac;
    ac.lr = cfg.lr;
    Adam opt(ps, ac);

    std::vector<int> joint_ids(train.size()), marg_rows(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) joint_ids[i] = train[i]->opponent_id;
    std::iota(marg_rows.begin(), marg_rows.end(), 0);
    std::vector<int> test_perm(test.size());
    std::iota(test_perm.begin(), test_perm.end(), 0);

    MineResult out;
    out.history.reserve(cfg.epochs);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // maximize E_joint[T] - log E_marginal[e^T]; the marginal pairs each
        // latent with an identity drawn from elsewhere in the batch
        rng.shuffle(marg_rows);
        std::vector<int> marg_ids(train.size());
        for (std::size_t i = 0; i < train.size(); ++i)
            marg_ids[i] = train[marg_rows[i]]->opponent_id;

        Tensor tj = net(mine_input(train, joint_ids, id_order));
        Tensor tm = net(mine_input(train, marg_ids, id_order));
        Tensor bound = sub(mean(tj), log_mean_exp(tm));
        opt.zero_grad();
        neg(bound).backward();
        opt.step();

        rng.shuffle(test_perm);
        out.history.push_back(dv_bound(net, test, test_perm, id_order));
    }

    const int w = std::min<int>(cfg.trailing_window, cfg.epochs);
    double best = -1e300;
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(out.history.size()); ++k) {
        acc += out.history[k];
        if (k >= w) acc -= out.history[k - w];
        if (k >= w - 1) best = std::max(best, acc / w);
    }
    out.estimate = best;
    return out;
}

}  // namespace omlab::repr
