#pragma once

#include <string>
#include <vector>

#include "omlab/core/random.hpp"

namespace omlab::envs {

// Named set of opponent ids to sample from.
struct Pool {
    std::string name;
    std::vector<int> ids;

    int sample(core::Rng& rng) const;
    bool contains(int id) const;
};

struct PoolPair {
    Pool train;
    Pool test;
};

// Toy repeated game: always-defect and tit-for-tat, both pools identical
// (held-out *episodes*, not held-out opponents).
PoolPair matrix_toy_pools();
// All five scripted matrix opponents.
PoolPair matrix_full_pools();
// Speaker codes 0-4 for training, 5-9 held out.
PoolPair speaker_listener_pools();

}  // namespace omlab::envs
