#include "omlab/envs/speaker_listener.hpp"

#include <algorithm>
#include <cmath>

#include "omlab/core/error.hpp"

namespace omlab::envs {

namespace {

constexpr double kHalfSpan = (SpeakerListenerEnv::kGrid - 1) / 2.0;  // cell 2 is the center

double norm_pos(int cell) { return (cell - kHalfSpan) / kHalfSpan; }

}  // namespace

const std::array<std::array<int, SpeakerListenerEnv::kColors>,
                 SpeakerListenerEnv::kLanguages>&
SpeakerListenerEnv::languages() {
    static const auto table = [] {
        std::array<std::array<int, kColors>, kLanguages> langs{};
        core::Rng rng(9001);
        std::vector<int> perm(kColors);
        int found = 0;
        while (found < kLanguages) {
            for (int i = 0; i < kColors; ++i) perm[i] = i;
            rng.shuffle(perm);
            bool fresh = true;
            for (int i = 0; i < found && fresh; ++i)
                fresh = !std::equal(perm.begin(), perm.end(), langs[i].begin());
            if (!fresh) continue;
            std::copy(perm.begin(), perm.end(), langs[found].begin());
            ++found;
        }
        return langs;
    }();
    return table;
}

SpeakerListenerEnv::SpeakerListenerEnv(int language_id) : language_id_(language_id) {
    require(language_id >= 0 && language_id < kLanguages,
            "speaker-listener: language id out of range");
}

std::vector<double> SpeakerListenerEnv::reset(core::Rng& rng) {
    // distinct landmark cells
    std::vector<int> cells(kGrid * kGrid);
    for (int i = 0; i < kGrid * kGrid; ++i) cells[i] = i;
    rng.shuffle(cells);
    for (int i = 0; i < kLandmarks; ++i) {
        lm_x_[i] = cells[i] % kGrid;
        lm_y_[i] = cells[i] / kGrid;
    }
    // distinct landmark colors
    std::vector<int> palette(kColors);
    for (int i = 0; i < kColors; ++i) palette[i] = i;
    rng.shuffle(palette);
    for (int i = 0; i < kLandmarks; ++i) colors_[i] = palette[i];

    target_slot_ = rng.uniform_int(kLandmarks);
    symbol_ = languages()[language_id_][colors_[target_slot_]];
    x_ = rng.uniform_int(kGrid);
    y_ = rng.uniform_int(kGrid);
    t_ = 0;
    done_ = false;
    opp_history_.clear();
    return listener_obs();
}

std::vector<double> SpeakerListenerEnv::listener_obs() const {
    std::vector<double> o;
    o.reserve(kObsDim);
    o.push_back(norm_pos(x_));
    o.push_back(norm_pos(y_));
    for (int i = 0; i < kLandmarks; ++i) {
        o.push_back((lm_x_[i] - x_) / static_cast<double>(kGrid - 1));
        o.push_back((lm_y_[i] - y_) / static_cast<double>(kGrid - 1));
    }
    for (int i = 0; i < kLandmarks; ++i)
        for (int c = 0; c < kColors; ++c) o.push_back(colors_[i] == c ? 1.0 : 0.0);
    for (int s = 0; s < kSymbols; ++s) o.push_back(symbol_ == s ? 1.0 : 0.0);
    return o;
}

std::vector<double> SpeakerListenerEnv::speaker_obs() const {
    std::vector<double> o(kColors, 0.0);
    o[colors_[target_slot_]] = 1.0;
    return o;
}

double SpeakerListenerEnv::reward_now() const {
    const double dx = lm_x_[target_slot_] - x_;
    const double dy = lm_y_[target_slot_] - y_;
    const double diag = std::sqrt(2.0) * (kGrid - 1);
    return -std::sqrt(dx * dx + dy * dy) / diag;
}

OppStep SpeakerListenerEnv::preview() const {
    require(!done_, "speaker-listener: episode is over");
    return {speaker_obs(), symbol_};
}

StepResult SpeakerListenerEnv::step(int action) {
    require(!done_, "speaker-listener: episode is over");
    require(action >= 0 && action < 5, "speaker-listener: bad action");
    opp_history_.push_back({speaker_obs(), symbol_});
    switch (action) {
        case 1: x_ = std::min(x_ + 1, kGrid - 1); break;
        case 2: x_ = std::max(x_ - 1, 0); break;
        case 3: y_ = std::min(y_ + 1, kGrid - 1); break;
        case 4: y_ = std::max(y_ - 1, 0); break;
        default: break;
    }
    ++t_;
    done_ = t_ >= kHorizon;
    StepResult res;
    res.reward = reward_now();
    res.done = done_;
    res.obs = listener_obs();
    return res;
}

}  // namespace omlab::envs
