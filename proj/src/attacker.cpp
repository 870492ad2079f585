#include "rsc/attacker.hpp"

#include <algorithm>
#include <stdexcept>

namespace rsc {

std::string to_string(AttackStrategy s) {
    switch (s) {
        case AttackStrategy::Surge: return "surge";
        case AttackStrategy::Offset: return "offset";
        case AttackStrategy::RandomStealthy: return "random";
        case AttackStrategy::Trace: return "trace";
    }
    return "?";
}

AttackStrategy parse_attack_strategy(const std::string& s) {
    if (s == "surge") return AttackStrategy::Surge;
    if (s == "offset") return AttackStrategy::Offset;
    if (s == "random") return AttackStrategy::RandomStealthy;
    if (s == "trace") return AttackStrategy::Trace;
    throw std::invalid_argument("unknown attack strategy '" + s + "' (expected surge, offset, random or trace)");
}

std::vector<std::string> check_attack_plans(const std::vector<AttackPlan>& plans, int t_max, std::size_t n) {
    std::vector<std::string> errs;
    std::vector<const AttackPlan*> sorted;
    for (std::size_t p = 0; p < plans.size(); ++p) {
        const AttackPlan& a = plans[p];
        const std::string where = "attacks[" + std::to_string(p) + "]";
        if (a.start < 1) errs.push_back(where + ": start must be >= 1, the initial measurement is trusted");
        if (a.end < a.start) errs.push_back(where + ": end precedes start");
        if (a.length() > t_max)
            errs.push_back(where + ": window length " + std::to_string(a.length()) + " exceeds t_max " +
                           std::to_string(t_max));
        for (auto t : a.targets)
            if (t >= n) errs.push_back(where + ": target " + std::to_string(t) + " out of range");
        if (a.strategy == AttackStrategy::Offset && a.offset.size() != a.targets.size())
            errs.push_back(where + ": offset needs one value per target");
        if (a.strategy == AttackStrategy::Trace) {
            if (a.trace.size() != static_cast<std::size_t>(std::max(a.length(), 0)))
                errs.push_back(where + ": trace needs one row per attacked step");
            for (const auto& row : a.trace)
                if (row.size() != a.targets.size()) {
                    errs.push_back(where + ": trace rows need one value per target");
                    break;
                }
        }
        if (a.sign != 1 && a.sign != -1) errs.push_back(where + ": sign must be +1 or -1");
        sorted.push_back(&a);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->start < b->start; });
    for (std::size_t p = 1; p < sorted.size(); ++p)
        if (sorted[p]->start - sorted[p - 1]->end < t_max)
            errs.push_back("attack windows starting at " + std::to_string(sorted[p - 1]->start) + " and " +
                           std::to_string(sorted[p]->start) + " are separated by fewer than t_max clean steps");
    return errs;
}

Box stealthy_set(const Model& model, const StateVec& prev_measured, const Action& prev_input,
                 const std::vector<Rational>& prev_C, const DetectorParams& params) {
    Box hat = model.post_hull(prev_measured, prev_input);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        Rational slack = params.threshold[i] + params.bias[i] - prev_C[i];
        hat[i] = {hat[i].lo - slack, hat[i].hi + slack};
    }
    return hat;
}

std::vector<Interval> stealthy_bounds(const Model& model, const StateVec& x, const StateVec& prev_measured,
                                      const Action& prev_input, const std::vector<Rational>& prev_C,
                                      const DetectorParams& params) {
    Box s = stealthy_set(model, prev_measured, prev_input, prev_C, params);
    std::vector<Interval> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = {s[i].lo - x[i], s[i].hi - x[i]};
    return e;
}

StateVec surge_attack(const Model& model, const StateVec& x, const StateVec& prev_measured,
                      const Action& prev_input, const std::vector<Rational>& prev_C, const DetectorParams& params,
                      SurgeStep step, int sign, const std::vector<std::size_t>& targets) {
    Box hat = model.post_hull(prev_measured, prev_input);
    Box stealthy = stealthy_set(model, prev_measured, prev_input, prev_C, params);
    StateVec out = x;
    for (auto i : targets) {
        if (step == SurgeStep::First) {
            out[i] = sign > 0 ? stealthy[i].hi : stealthy[i].lo;
        } else {
            out[i] = sign > 0 ? hat[i].hi + params.bias[i] : hat[i].lo - params.bias[i];
        }
        if (!stealthy[i].contains(out[i]))
            throw ContractViolation("surge value for vehicle " + std::to_string(i) + " leaves the stealthy set");
    }
    return out;
}

StateVec random_stealthy_attack(const Model& model, std::mt19937_64& rng, const StateVec& x,
                                const StateVec& prev_measured, const Action& prev_input,
                                const std::vector<Rational>& prev_C, const DetectorParams& params,
                                const std::vector<std::size_t>& targets) {
    Box s = stealthy_set(model, prev_measured, prev_input, prev_C, params);
    const Rational res = model.config().resolution();
    StateVec out = x;
    for (auto i : targets) {
        std::int64_t lo = ceil_int(s[i].lo / res), hi = floor_int(s[i].hi / res);
        if (hi < lo) continue;
        std::uniform_int_distribution<std::int64_t> pick(lo, hi);
        out[i] = res * pick(rng);
    }
    return out;
}

}  // namespace rsc
