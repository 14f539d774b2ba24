#pragma once

#include <cstddef>
#include <vector>

#include "omlab/core/random.hpp"

namespace omlab::rl {

// One step on the augmented observation space: the policy acts on
// [observation | z], so both halves are stored for the current and the next
// state. `action` is the executed action's one-hot.
struct Transition {
    std::vector<double> observation;
    std::vector<double> z_sample;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_observation;
    std::vector<double> next_z_sample;
    bool done = false;
};

// Fixed-capacity ring with uniform sampling (with replacement).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return store_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return store_[i]; }

    std::vector<const Transition*> sample(int batch, core::Rng& rng) const;

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next overwrite position once full
    std::vector<Transition> store_;
};

}  // namespace omlab::rl
