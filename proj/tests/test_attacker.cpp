#include "support.hpp"

#include "rsc/attacker.hpp"
#include "rsc/detector.hpp"

using namespace rsc;
using namespace rsc::test;

namespace {

Action random_action(std::mt19937_64& rng) { return Action{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}}; }

DetectorState primed(const Model& m, const StateVec& prev, const Action& a, std::vector<Rational> C) {
    DetectorState d = make_detector(m.config().detector);
    d.C = std::move(C);
    d.last_measurement = prev;
    d.last_input = a;
    return d;
}

}  // namespace

TEST_CASE("stealthy bounds for the surge example") {
    Model m(verification::two_vehicle_plant(1));
    auto e = stealthy_bounds(m, sv({R(2), R(4)}), sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, m.config().detector);
    CHECK(e[1] == Interval{R(0), R(1)});
    CHECK(e[1].contains(R(1)));
    CHECK(stealthy_set(m, sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, m.config().detector) ==
          box({{R(2), R(3)}, {R(4), R(5)}}));
    CHECK(stealthy_set(m, sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, m.config().detector)
              .contains(sv({R(2), R(5)})));
}

TEST_CASE("stealthy bounds match the closed form and shrink as C grows") {
    const Rational eta = R("0.3"), b = R("0.1");
    Model m(plant_with_detector(1, b, eta));
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 2000; ++trial) {
        StateVec prev = sv({grid(rng, R(0), R(10), R("0.1")), grid(rng, R(0), R(10), R("0.1"))});
        Action a = random_action(rng);
        StateVec x = sv({prev[0] + a.steps[0] + grid(rng, R(0), R(1), R("0.1")),
                         prev[1] + a.steps[1] + grid(rng, R(0), R(1), R("0.1"))});
        std::vector<Rational> C{grid(rng, R(0), eta, R("0.05")), grid(rng, R(0), eta, R("0.05"))};
        auto e = stealthy_bounds(m, x, prev, a, C, m.config().detector);
        Box hat = m.post_hull(prev, a);
        for (std::size_t i = 0; i < 2; ++i) {
            REQUIRE(e[i] == verification::closed_form_error_interval(hat[i].lo, hat[i].hi, x[i], eta, b, C[i]));
            REQUIRE(e[i].hi - e[i].lo == (hat[i].hi - hat[i].lo) + 2 * (eta + b) - 2 * C[i]);
        }
    }
}

TEST_CASE("errors inside the bounds stay silent, errors outside raise an alarm") {
    const Rational eta = R("0.2"), b = R("0.1");
    Model m(plant_with_detector(1, b, eta));
    std::mt19937_64 rng(67);
    int outside = 0;
    for (int trial = 0; trial < 5000; ++trial) {
        StateVec prev = sv({grid(rng, R(0), R(10), R("0.05")), grid(rng, R(0), R(10), R("0.05"))});
        Action a = random_action(rng);
        StateVec x = sv({prev[0] + a.steps[0] + grid(rng, R(0), R(1), R("0.05")),
                         prev[1] + a.steps[1] + grid(rng, R(0), R(1), R("0.05"))});
        std::vector<Rational> C{grid(rng, R(0), eta, R("0.05")), grid(rng, R(0), eta, R("0.05"))};
        auto e = stealthy_bounds(m, x, prev, a, C, m.config().detector);
        std::size_t i = static_cast<std::size_t>(pick(rng, 0, 1));
        StateVec meas = x;
        meas[i] += grid(rng, e[i].lo - 1, e[i].hi + 1, R("0.05"));
        DetectorState d = observe(m, primed(m, prev, a, C), meas);
        bool inside = e[i].contains(meas[i] - x[i]);
        REQUIRE((decide(d) == Decision::H0) == inside);
        if (inside) REQUIRE(d.C[i] <= eta);
        outside += inside ? 0 : 1;
    }
    CHECK(outside > 0);
}

TEST_CASE("surge reaches the supremum and continuation keeps C at the threshold") {
    Model m(verification::two_vehicle_plant(1));
    const auto& p = m.config().detector;
    StateVec s = surge_attack(m, sv({R(2), R(4)}), sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, p, SurgeStep::First,
                              +1, {1});
    CHECK(s == sv({R(2), R(5)}));
    CHECK(surge_attack(m, sv({R(2), R(4)}), sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, p, SurgeStep::First, +1,
                       {}) == sv({R(2), R(4)}));

    const Rational eta = R("0.3"), b = R("0.1");
    Model mb(plant_with_detector(1, b, eta));
    const auto& pb = mb.config().detector;
    std::mt19937_64 rng(71);
    for (int run = 0; run < 200; ++run) {
        StateVec x = sv({R(0), R(0)});
        DetectorState d = observe(mb, make_detector(pb), x);
        StateVec meas = x;
        int len = static_cast<int>(pick(rng, 1, 6));
        int sign = pick(rng, 0, 1) ? 1 : -1;
        for (int k = 0; k < len; ++k) {
            Action a = random_action(rng);
            d = record_input(d, a);
            x = mb.step_dynamics(x, mb.input(a, {}), {grid(rng, R(0), R(1), R("0.1")), grid(rng, R(0), R(1), R("0.1"))});
            StateVec prev = meas;
            meas = surge_attack(mb, x, prev, a, d.C, pb, k == 0 ? SurgeStep::First : SurgeStep::Continuation, sign, {0});
            if (k == 0) {
                Box st = stealthy_set(mb, prev, a, d.C, pb);
                REQUIRE(meas[0] == (sign > 0 ? st[0].hi : st[0].lo));
            }
            d = observe(mb, d, meas);
            REQUIRE(d.C[0] == eta);
            REQUIRE(decide(d) == Decision::H0);
        }
    }
}

TEST_CASE("random stealthy samples never trigger the detector") {
    const Rational eta = R("0.2"), b = R("0.1");
    Model m(plant_with_detector(1, b, eta));
    const auto& p = m.config().detector;
    std::mt19937_64 rng(73);
    std::mt19937_64 attack_rng(79);
    for (int trial = 0; trial < 10000; ++trial) {
        StateVec prev = sv({grid(rng, R(0), R(10), R("0.1")), grid(rng, R(0), R(10), R("0.1"))});
        Action a = random_action(rng);
        StateVec x = sv({prev[0] + a.steps[0] + grid(rng, R(0), R(1), R("0.1")),
                         prev[1] + a.steps[1] + grid(rng, R(0), R(1), R("0.1"))});
        std::vector<Rational> C{grid(rng, R(0), eta, R("0.05")), grid(rng, R(0), eta, R("0.05"))};
        StateVec meas = random_stealthy_attack(m, attack_rng, x, prev, a, C, p, {0, 1});
        REQUIRE(stealthy_set(m, prev, a, C, p).contains(meas));
        REQUIRE(decide(observe(m, primed(m, prev, a, C), meas)) == Decision::H0);
    }
}

TEST_CASE("random stealthy attack is reproducible from its seed") {
    Model m(plant_with_detector(1, R("0.1"), R("0.2")));
    const auto& p = m.config().detector;
    std::mt19937_64 r1(5), r2(5);
    for (int k = 0; k < 100; ++k) {
        auto a = random_stealthy_attack(m, r1, sv({R(2), R(4)}), sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, p, {1});
        auto b = random_stealthy_attack(m, r2, sv({R(2), R(4)}), sv({R(1), R(1)}), Action{{1, 3}}, {R(0), R(0)}, p, {1});
        REQUIRE(a == b);
        REQUIRE(a[0] == R(2));
    }
}

TEST_CASE("attack schedules are checked against the trust window") {
    auto plan = [](int s, int e) {
        AttackPlan p;
        p.targets = {1};
        p.start = s;
        p.end = e;
        return p;
    };
    CHECK(check_attack_plans({plan(1, 2)}, 1, 2).empty());
    CHECK_FALSE(check_attack_plans({plan(0, 1)}, 1, 2).empty());
    CHECK_FALSE(check_attack_plans({plan(1, 3)}, 1, 2).empty());
    CHECK(check_attack_plans({plan(1, 3), plan(5, 7)}, 2, 2).empty());
    CHECK_FALSE(check_attack_plans({plan(1, 3), plan(4, 6)}, 2, 2).empty());
    AttackPlan bad = plan(1, 2);
    bad.targets = {4};
    CHECK_FALSE(check_attack_plans({bad}, 1, 2).empty());
    CHECK(parse_attack_strategy("random") == AttackStrategy::RandomStealthy);
    CHECK_THROWS_AS(parse_attack_strategy("spoof"), std::invalid_argument);
}
