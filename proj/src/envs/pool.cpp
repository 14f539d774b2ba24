#include "omlab/envs/pool.hpp"

#include <algorithm>

#include "omlab/core/error.hpp"
#include "omlab/envs/opponents.hpp"
#include "omlab/envs/speaker_listener.hpp"

namespace omlab::envs {

int Pool::sample(core::Rng& rng) const {
    require(!ids.empty(), "pool '" + name + "' is empty");
    return ids[rng.uniform_int(static_cast<int>(ids.size()))];
}

bool Pool::contains(int id) const {
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

PoolPair matrix_toy_pools() {
    Pool p{"matrix_toy", {kAlwaysDefect, kTitForTat}};
    return {p, Pool{"matrix_toy_eval", p.ids}};
}

PoolPair matrix_full_pools() {
    std::vector<int> all(kNumMatrixOpponents);
    for (int i = 0; i < kNumMatrixOpponents; ++i) all[i] = i;
    Pool p{"matrix_full", all};
    return {p, Pool{"matrix_full_eval", all}};
}

PoolPair speaker_listener_pools() {
    std::vector<int> train, test;
    for (int i = 0; i < SpeakerListenerEnv::kLanguages; ++i)
        (i < SpeakerListenerEnv::kLanguages / 2 ? train : test).push_back(i);
    return {Pool{"speaker_train", train}, Pool{"speaker_test", test}};
}

}  // namespace omlab::envs
