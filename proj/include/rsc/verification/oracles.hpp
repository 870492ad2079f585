#pragma once

#include "rsc/sim.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rsc::verification {

// Error range keeping a CUSUM with bias b, threshold eta and prior statistic C silent,
// given the predicted interval [lo, hi] and the true position x.
Interval closed_form_error_interval(const Rational& lo, const Rational& hi, const Rational& x, const Rational& eta,
                                    const Rational& b, const Rational& C);

// Bad-set membership at `samples` + 1 evenly spaced points of the straight segment.
bool sampled_segment_collides(const Model& model, const StateVec& from, const StateVec& to, int samples);

struct SoundnessReport {
    std::size_t runs = 0;
    std::size_t steps_checked = 0;
    std::size_t detected_runs = 0;
    std::size_t attacked_steps = 0;
    std::size_t violations = 0;
    std::string first_violation;
};

// Open-loop runs with random inputs, disturbances and admissible attack schedules; checks that
// the true state lies in the corrected set at every step the detector accepts.
SoundnessReport estimator_soundness(const IntersectionConfig& cfg, std::uint64_t seed, std::size_t runs,
                                    unsigned workers);

struct MapEnumeration {
    std::size_t keys = 0;
    std::size_t maps_tried = 0;
    std::size_t valid_maps = 0;
    std::size_t not_contained = 0;
    bool table_valid = false;
    std::string first_counterexample;
};

// Enumerates every assignment of a nonempty input subset to each reachable non-marked information
// state, keeps the safe non-blocking ones and checks each is pointwise inside `table`.
MapEnumeration enumerate_control_maps(const Model& model, const ObserverAutomaton& obs, const SupervisorTable& table);

// Sum of admissible-set sizes over the keys present in every successful table; failed tables give 0.
std::vector<std::size_t> shared_permissiveness(const std::vector<SupervisorTable>& tables);

// Checks that, on keys present in every successful table, each table's admissible set lies inside
// the previous one's. Returns a description of the first violation, empty when none.
std::string first_pointwise_growth(const Model& model, const std::vector<SupervisorTable>& tables);

}  // namespace rsc::verification
