#include "omlab/rl/replay_buffer.hpp"

#include <cmath>
#include <utility>

#include "omlab/core/error.hpp"

namespace omlab::rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity > 0, "replay buffer: capacity must be positive");
    store_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    require(std::isfinite(t.reward), "replay buffer: non-finite reward");
    if (store_.size() < capacity_) {
        store_.push_back(std::move(t));
    } else {
        store_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
}

std::vector<const Transition*> ReplayBuffer::sample(int batch, core::Rng& rng) const {
    require(batch > 0, "replay buffer: batch must be positive");
    require(store_.size() >= static_cast<std::size_t>(batch),
            "replay buffer: not enough transitions to sample");
    std::vector<const Transition*> out(batch);
    for (auto& p : out) p = &store_[rng.uniform_int(static_cast<int>(store_.size()))];
    return out;
}

}  // namespace omlab::rl
