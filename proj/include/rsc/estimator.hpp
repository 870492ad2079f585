#pragma once

#include "rsc/errors.hpp"
#include "rsc/model.hpp"

#include <deque>
#include <optional>
#include <variant>

namespace rsc {

struct EstimatorState {
    int t_max = 0;
    int k = 0;
    std::deque<StateVec> measurements;  // x̃_{k-T} .. x̃_k, at most T+1 entries
    std::deque<Action> inputs;          // inputs applied after each retained measurement but the last
    BoxUnion corrected;
};

struct Detected {
    int step = 0;
};

EstimatorState make_estimator(const IntersectionConfig& cfg, const StateVec& first_measurement);

// Î_k; nullopt stands for the whole space while fewer than T steps are available.
std::optional<BoxUnion> trust_window(const Model& model, const StateVec& old_measurement,
                                     std::span<const Action> inputs, const StateVec& measurement);
BoxUnion predict(const Model& model, const BoxUnion& corrected, const Action& input);
BoxUnion correct(const BoxUnion& predicted, const std::optional<BoxUnion>& trusted);

// One estimator cycle given the input applied after the previous measurement and the
// CUSUM statistic before this measurement.
std::variant<EstimatorState, Detected> estimator_step(const Model& model, const EstimatorState& state,
                                                      const StateVec& measurement, const Action& input,
                                                      const DetectorParams& params,
                                                      const std::vector<Rational>& prev_C);

}  // namespace rsc
