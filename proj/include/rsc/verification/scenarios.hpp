#pragma once

#include "rsc/sim.hpp"

namespace rsc::verification {

// Two controlled vehicles on crossing roads, zone [9.5, 12.5], speeds {1, 3}, d in [0, 1], start (1, 1).
IntersectionConfig two_vehicle_plant(int t_max = 1);

// Surge on vehicle 1 at step 1 followed by the scripted choice (1, 1).
// `step1_disturbance` is vehicle 1's disturbance at step 1 (vehicle 0 gets 1).
ScenarioConfig two_vehicle_attack(int t_max, const Rational& step1_disturbance);
// Variant that drives the baseline into an unavoidable collision.
ScenarioConfig baseline_attack_demo();
// Variant whose post-attack measurement stays consistent, so the resilient run is not flagged.
ScenarioConfig resilient_attack_demo();

// Small instance for exhaustive control-map enumeration: two inputs, few cells per vehicle.
ScenarioConfig reduced_instance();

// One vehicle, five cells before the exit, positive bias and threshold.
IntersectionConfig single_vehicle_plant();

// Disturbance bound that is not a multiple of the cell width.
ScenarioConfig negative_control();

}  // namespace rsc::verification
