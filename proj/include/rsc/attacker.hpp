#pragma once

#include "rsc/model.hpp"

#include <random>
#include <string>
#include <vector>

namespace rsc {

enum class AttackStrategy { Surge, Offset, RandomStealthy, Trace };

std::string to_string(AttackStrategy s);
AttackStrategy parse_attack_strategy(const std::string& s);

struct AttackPlan {
    std::vector<std::size_t> targets;
    int start = 1;  // k_s, first corrupted step
    int end = 1;    // k_e, exclusive
    AttackStrategy strategy = AttackStrategy::Surge;
    int sign = +1;                               // surge direction
    std::vector<Rational> offset;                // per target, constant-offset strategy
    std::vector<std::vector<Rational>> trace;    // per step then per target, custom trace

    int length() const { return end - start; }
    bool active(int k) const { return start <= k && k < end; }
};

// Problems with a schedule of plans; empty when admissible.
std::vector<std::string> check_attack_plans(const std::vector<AttackPlan>& plans, int t_max, std::size_t n);

// Error interval per vehicle that keeps the detector silent at step k.
std::vector<Interval> stealthy_bounds(const Model& model, const StateVec& x, const StateVec& prev_measured,
                                      const Action& prev_input, const std::vector<Rational>& prev_C,
                                      const DetectorParams& params);

// I^s_k as a single box.
Box stealthy_set(const Model& model, const StateVec& prev_measured, const Action& prev_input,
                 const std::vector<Rational>& prev_C, const DetectorParams& params);

enum class SurgeStep { First, Continuation };

StateVec surge_attack(const Model& model, const StateVec& x, const StateVec& prev_measured,
                      const Action& prev_input, const std::vector<Rational>& prev_C, const DetectorParams& params,
                      SurgeStep step, int sign, const std::vector<std::size_t>& targets);

// Uniform over the exactness grid inside I^s; vehicles with no grid point keep the true value.
StateVec random_stealthy_attack(const Model& model, std::mt19937_64& rng, const StateVec& x,
                                const StateVec& prev_measured, const Action& prev_input,
                                const std::vector<Rational>& prev_C, const DetectorParams& params,
                                const std::vector<std::size_t>& targets);

}  // namespace rsc
