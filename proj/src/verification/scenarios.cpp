#include "rsc/verification/scenarios.hpp"

namespace rsc::verification {

namespace {

Rational R(const char* s) { return parse_rational(s); }

IntersectionConfig crossing_pair(const Rational& entry, const Rational& exit) {
    IntersectionConfig c;
    c.roads = {{entry, exit}, {entry, exit}};
    c.tau = 1;
    c.mu = 1;
    c.d_min = 0;
    c.d_max = 1;
    c.detector.bias = {Rational(0), Rational(0)};
    c.detector.threshold = {Rational(0), Rational(0)};
    return c;
}

}  // namespace

IntersectionConfig two_vehicle_plant(int t_max) {
    IntersectionConfig c = crossing_pair(R("9.5"), R("12.5"));
    c.vehicles = {{0, true, {1, 3}}, {1, true, {1, 3}}};
    c.t_max = t_max;
    c.x0 = BoxUnion::point(StateVec{Rational(1), Rational(1)});
    return c;
}

ScenarioConfig two_vehicle_attack(int t_max, const Rational& step1_disturbance) {
    ScenarioConfig sc;
    sc.plant = two_vehicle_plant(t_max);
    sc.seed = 1;
    sc.disturbance_script = {{Rational(0), Rational(0)}, {Rational(1), step1_disturbance}};
    sc.input_script = {Action{{1, 3}}, Action{{1, 1}}};
    AttackPlan p;
    p.targets = {1};
    p.start = 1;
    p.end = 2;
    p.strategy = AttackStrategy::Surge;
    p.sign = 1;
    sc.attacks = {p};
    return sc;
}

ScenarioConfig baseline_attack_demo() { return two_vehicle_attack(1, R("0.5")); }

ScenarioConfig resilient_attack_demo() { return two_vehicle_attack(1, Rational(1)); }

ScenarioConfig reduced_instance() {
    ScenarioConfig sc;
    IntersectionConfig c = crossing_pair(R("3.5"), R("4.5"));
    c.vehicles = {{0, true, {1, 2}}, {1, false, {2}}};
    c.t_max = 1;
    c.x0 = BoxUnion::point(StateVec{Rational(0), Rational(2)});
    sc.plant = c;
    sc.seed = 1;
    return sc;
}

IntersectionConfig single_vehicle_plant() {
    IntersectionConfig c;
    c.roads = {{R("3.5"), R("4.5")}};
    c.vehicles = {{0, true, {1, 2}}};
    c.tau = 1;
    c.mu = 1;
    c.d_min = 0;
    c.d_max = 1;
    c.t_max = 1;
    c.scale = 20;
    c.x0 = BoxUnion::point(StateVec{Rational(0)});
    c.detector.bias = {R("0.1")};
    c.detector.threshold = {R("0.3")};
    return c;
}

ScenarioConfig negative_control() {
    ScenarioConfig sc = baseline_attack_demo();
    sc.plant.d_max = R("0.7");
    sc.disturbance_script.clear();
    return sc;
}

}  // namespace rsc::verification
