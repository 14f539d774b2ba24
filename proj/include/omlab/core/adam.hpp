#pragma once

#include <cstdint>
#include <vector>

#include "omlab/core/tensor.hpp"

namespace omlab::core {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam over a fixed, ordered parameter list. Moment buffers follow the
// insertion order of the NamedParams passed in, so updates are deterministic.
class Adam {
  public:
    struct Slot {
        std::vector<double> m;
        std::vector<double> v;
    };

    Adam() = default;
    explicit Adam(NamedParams params, AdamConfig cfg = {});

    void step();       // one update from current grads
    void zero_grad();  // clears grads of all managed params

    const NamedParams& params() const { return params_; }
    const AdamConfig& config() const { return cfg_; }
    int64_t steps() const { return t_; }
    const std::vector<Slot>& slots() const { return slots_; }
    // Restores optimizer state; slot shapes must match the managed params.
    void restore(std::vector<Slot> slots, int64_t t);

  private:
    NamedParams params_;
    AdamConfig cfg_;
    std::vector<Slot> slots_;
    int64_t t_ = 0;
};

// Scales grads in place so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
double clip_global_norm(const NamedParams& params, double max_norm);

}  // namespace omlab::core
