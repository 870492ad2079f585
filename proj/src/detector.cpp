#include "rsc/detector.hpp"

#include <algorithm>

namespace rsc {

DetectorState make_detector(const DetectorParams& params) {
    if (params.bias.size() != params.threshold.size())
        throw ContractViolation("bias and threshold vectors differ in length");
    DetectorState s;
    s.C.assign(params.bias.size(), Rational(0));
    s.bias = params.bias;
    s.threshold = params.threshold;
    return s;
}

std::vector<Rational> residual(const Model& model, const StateVec& measured, const StateVec& prev_measured,
                               const Action& prev_input, const std::vector<Rational>& bias) {
    Box hat = model.post_hull(prev_measured, prev_input);
    std::vector<Rational> z(measured.size());
    for (std::size_t i = 0; i < measured.size(); ++i) {
        Rational dist = rmax(rmax(hat[i].lo - measured[i], measured[i] - hat[i].hi), Rational(0));
        z[i] = dist - bias[i];
    }
    return z;
}

DetectorState cusum_update(DetectorState state, const std::vector<Rational>& z) {
    if (z.size() != state.C.size()) throw ContractViolation("residual arity mismatch");
    for (std::size_t i = 0; i < z.size(); ++i) state.C[i] = rmax(state.C[i] + z[i], Rational(0));
    return state;
}

Decision decide(const DetectorState& state) {
    for (std::size_t i = 0; i < state.C.size(); ++i)
        if (state.threshold[i] < state.C[i]) return Decision::H1;
    return Decision::H0;
}

DetectorState observe(const Model& model, DetectorState state, const StateVec& measured) {
    std::vector<Rational> z;
    if (state.last_measurement && state.last_input) {
        z = residual(model, measured, *state.last_measurement, *state.last_input, state.bias);
    } else {
        z.resize(state.bias.size());
        std::transform(state.bias.begin(), state.bias.end(), z.begin(), [](const Rational& b) { return -b; });
    }
    state = cusum_update(std::move(state), z);
    state.last_measurement = measured;
    state.last_input.reset();
    return state;
}

DetectorState record_input(DetectorState state, const Action& input) {
    state.last_input = input;
    return state;
}

}  // namespace rsc
