#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "omlab/core/error.hpp"

namespace omlab::core {

// Seeded generator with the handful of draws the project needs. One Rng per
// training run; sub-streams are forked with fork() so components stay
// decoupled from each other's consumption order.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    Rng fork() { return Rng(gen_()); }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    // Uniform in {0, ..., n-1}.
    int uniform_int(int n) {
        require(n > 0, "uniform_int: n must be positive");
        return std::uniform_int_distribution<int>(0, n - 1)(gen_);
    }

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    std::vector<double> normal_vec(std::size_t n) {
        std::vector<double> out(n);
        for (auto& x : out) x = normal();
        return out;
    }

    // Gumbel(0, 1) sample, clamped away from the distribution's open endpoints.
    double gumbel() {
        double u = uniform();
        u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
        return -std::log(-std::log(u));
    }

    // Index sampled from an explicit probability vector (assumed normalized).
    int categorical(const std::vector<double>& probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(
                std::uniform_int_distribution<std::uint64_t>(0, i - 1)(gen_));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::string serialize() const {
        std::ostringstream os;
        os << gen_;
        return os.str();
    }

    void deserialize(const std::string& s) {
        std::istringstream is(s);
        is >> gen_;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace omlab::core
