#include "rsc/estimator.hpp"

#include "rsc/attacker.hpp"

#include <vector>

namespace rsc {

EstimatorState make_estimator(const IntersectionConfig& cfg, const StateVec& first_measurement) {
    EstimatorState s;
    s.t_max = cfg.t_max;
    s.measurements.push_back(first_measurement);
    s.corrected = cfg.x0;
    return s;
}

std::optional<BoxUnion> trust_window(const Model& model, const StateVec& old_measurement,
                                     std::span<const Action> inputs, const StateVec& measurement) {
    BoxUnion now = BoxUnion::point(measurement);
    if (inputs.empty()) return now;
    return model.post_seq(BoxUnion::point(old_measurement), inputs).unite(now);
}

BoxUnion predict(const Model& model, const BoxUnion& corrected, const Action& input) {
    if (corrected.empty()) throw ContractViolation("predict from an empty set");
    return model.post(corrected, input);
}

BoxUnion correct(const BoxUnion& predicted, const std::optional<BoxUnion>& trusted) {
    return trusted ? predicted.intersect(*trusted) : predicted;
}

std::variant<EstimatorState, Detected> estimator_step(const Model& model, const EstimatorState& state,
                                                      const StateVec& measurement, const Action& input,
                                                      const DetectorParams& params,
                                                      const std::vector<Rational>& prev_C) {
    Box stealthy = stealthy_set(model, state.measurements.back(), input, prev_C, params);
    if (!stealthy.contains(measurement)) return Detected{state.k + 1};

    EstimatorState next = state;
    next.k = state.k + 1;
    next.inputs.push_back(input);
    next.measurements.push_back(measurement);
    const auto T = static_cast<std::size_t>(state.t_max);
    while (next.measurements.size() > T + 1) {
        next.measurements.pop_front();
        next.inputs.pop_front();
    }
    std::optional<BoxUnion> trusted;
    if (next.k >= state.t_max) {
        std::vector<Action> seq(next.inputs.begin(), next.inputs.end());
        trusted = trust_window(model, next.measurements.front(), seq, measurement);
    }
    next.corrected = correct(predict(model, state.corrected, input), trusted);
    if (next.corrected.empty())
        throw InternalFault("estimator produced an empty corrected set at step " + std::to_string(next.k));
    return next;
}

}  // namespace rsc
