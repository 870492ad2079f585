#pragma once

#include "rsc/model.hpp"

#include <optional>
#include <vector>

namespace rsc {

enum class Decision { H0, H1 };

// Nonparametric CUSUM per vehicle.
struct DetectorState {
    std::vector<Rational> C;
    std::vector<Rational> bias;
    std::vector<Rational> threshold;
    std::optional<StateVec> last_measurement;
    std::optional<Action> last_input;
};

DetectorState make_detector(const DetectorParams& params);

// z_i = dist(x̃_i, [x̂_min, x̂_max]) - b_i with the interval taken from post of the previous measurement.
std::vector<Rational> residual(const Model& model, const StateVec& measured, const StateVec& prev_measured,
                               const Action& prev_input, const std::vector<Rational>& bias);

DetectorState cusum_update(DetectorState state, const std::vector<Rational>& z);
Decision decide(const DetectorState& state);

// Feeds one measurement; the first call (no predecessor) uses z = -b.
DetectorState observe(const Model& model, DetectorState state, const StateVec& measured);
// Records the input applied after the latest measurement.
DetectorState record_input(DetectorState state, const Action& input);

}  // namespace rsc
