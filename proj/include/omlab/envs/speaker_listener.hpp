#pragma once

#include <array>

#include "omlab/envs/env.hpp"

namespace omlab::envs {

// Cooperative signaling game on a small grid. A scripted speaker sees which
// of three colored landmarks is the goal and utters one symbol; the learning
// listener hears it and has to walk to the right landmark. Each speaker id is
// a different private color->symbol code (a bijection), so the meaning of a
// symbol can only be pinned down by modeling the speaker. Ten codes exist;
// by convention ids 0-4 form the train pool and 5-9 the held-out pool.
class SpeakerListenerEnv : public Env {
  public:
    static constexpr int kColors = 5;
    static constexpr int kSymbols = 5;
    static constexpr int kLandmarks = 3;
    static constexpr int kGrid = 5;  // cells per side
    static constexpr int kHorizon = 10;
    static constexpr int kLanguages = 10;
    // [pos(2) | landmark offsets(6) | landmark colors(15) | symbol(5)]
    static constexpr int kObsDim = 2 + 2 * kLandmarks + kColors * kLandmarks + kSymbols;

    explicit SpeakerListenerEnv(int language_id);

    static const std::array<std::array<int, kColors>, kLanguages>& languages();

    int obs_dim() const override { return kObsDim; }
    int num_actions() const override { return 5; }  // noop, +x, -x, +y, -y
    int opp_obs_dim() const override { return kColors; }
    int opp_num_actions() const override { return kSymbols; }
    int horizon() const override { return kHorizon; }
    int opponent_id() const override { return language_id_; }

    std::vector<double> reset(core::Rng& rng) override;
    StepResult step(int action) override;

    // test hooks
    int target_slot() const { return target_slot_; }
    int target_color() const { return colors_[target_slot_]; }
    std::array<int, 2> listener_cell() const { return {x_, y_}; }
    std::array<int, 2> landmark_cell(int slot) const {
        return {lm_x_[slot], lm_y_[slot]};
    }

  protected:
    OppStep preview() const override;

  private:
    std::vector<double> listener_obs() const;
    std::vector<double> speaker_obs() const;
    double reward_now() const;

    int language_id_;
    int symbol_ = 0;
    int target_slot_ = 0;
    std::array<int, kLandmarks> colors_{};
    std::array<int, kLandmarks> lm_x_{}, lm_y_{};
    int x_ = 0, y_ = 0;
    int t_ = 0;
    bool done_ = true;
};

}  // namespace omlab::envs
