#include "support.hpp"

#include "rsc/attacker.hpp"
#include "rsc/estimator.hpp"

using namespace rsc;
using namespace rsc::test;

namespace {

const Action kA13{{1, 3}};

BoxUnion random_union(std::mt19937_64& rng, int boxes) {
    std::vector<Box> out;
    for (int k = 0; k < boxes; ++k) {
        std::vector<Interval> d(2);
        for (auto& iv : d) {
            Rational a = grid(rng, R(0), R(8), R("0.5")), b = grid(rng, R(0), R(8), R("0.5"));
            iv = {rmin(a, b), rmax(a, b)};
        }
        out.emplace_back(d);
    }
    return BoxUnion(2, out);
}

}  // namespace

TEST_CASE("trust window after one step") {
    Model m(verification::two_vehicle_plant(1));
    std::vector<Action> seq{kA13};
    auto w = trust_window(m, sv({R(1), R(1)}), seq, sv({R(2), R(5)}));
    REQUIRE(w.has_value());
    CHECK(*w == bu(box({{R(2), R(3)}, {R(4), R(5)}})));
    auto far = trust_window(m, sv({R(1), R(1)}), seq, sv({R(7), R(7)}));
    CHECK(*far == bu(box({{R(2), R(3)}, {R(4), R(5)}})).unite(BoxUnion::point(sv({R(7), R(7)}))));
    CHECK(*trust_window(m, sv({R(1), R(1)}), {}, sv({R(4), R(4)})) == BoxUnion::point(sv({R(4), R(4)})));
}

TEST_CASE("predict and correct") {
    Model m(verification::two_vehicle_plant(1));
    BoxUnion predicted = predict(m, bu(box({{R(2), R(3)}, {R(4), R(5)}})), kA13);
    CHECK(predicted == bu(box({{R(3), R(5)}, {R(7), R(9)}})));
    BoxUnion trusted = bu(box({{R(3), R(4)}, {R(8), R(9)}})).unite(BoxUnion::point(sv({R(3), R(8)})));
    CHECK(correct(predicted, trusted) == bu(box({{R(3), R(4)}, {R(8), R(9)}})));
    CHECK(correct(predicted, std::nullopt) == predicted);
    CHECK_THROWS_AS(predict(m, BoxUnion(2), kA13), ContractViolation);
}

TEST_CASE("correction matches pointwise membership on a grid") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 300; ++trial) {
        BoxUnion p = random_union(rng, static_cast<int>(pick(rng, 1, 3)));
        BoxUnion t = random_union(rng, static_cast<int>(pick(rng, 1, 3)));
        BoxUnion c = correct(p, t);
        REQUIRE(c.subset_of(p));
        for (Rational x = 0; x <= 8; x += R("0.25"))
            for (Rational y = 0; y <= 8; y += R("0.25")) {
                StateVec pt = sv({x, y});
                REQUIRE(c.contains(pt) == (p.contains(pt) && t.contains(pt)));
            }
    }
}

TEST_CASE("estimator cycle through the surge and its continuation") {
    Model m(verification::two_vehicle_plant(1));
    const auto& p = m.config().detector;
    EstimatorState s = make_estimator(m.config(), sv({R(1), R(1)}));
    auto r1 = estimator_step(m, s, sv({R(2), R(5)}), kA13, p, {R(0), R(0)});
    REQUIRE(std::holds_alternative<EstimatorState>(r1));
    s = std::get<EstimatorState>(r1);
    CHECK(s.corrected == bu(box({{R(2), R(3)}, {R(4), R(5)}})));
    auto r2 = estimator_step(m, s, sv({R(3), R(8)}), kA13, p, {R(0), R(0)});
    REQUIRE(std::holds_alternative<EstimatorState>(r2));
    CHECK(std::get<EstimatorState>(r2).corrected == bu(box({{R(3), R(4)}, {R(8), R(9)}})));

    auto r3 = estimator_step(m, s, sv({R(3), R(12)}), kA13, p, {R(0), R(0)});
    REQUIRE(std::holds_alternative<Detected>(r3));
    CHECK(std::get<Detected>(r3).step == 2);
}

TEST_CASE("before T steps the whole space is trusted") {
    Model m(verification::two_vehicle_plant(3));
    EstimatorState s = make_estimator(m.config(), sv({R(1), R(1)}));
    auto r = estimator_step(m, s, sv({R(2), R(5)}), kA13, m.config().detector, {R(0), R(0)});
    CHECK(std::get<EstimatorState>(r).corrected == predict(m, m.config().x0, kA13));
}

TEST_CASE("zero trust window collapses to the measurement") {
    Model m(verification::two_vehicle_plant(0));
    std::mt19937_64 rng(89);
    EstimatorState s = make_estimator(m.config(), sv({R(1), R(1)}));
    StateVec x = sv({R(1), R(1)});
    for (int k = 0; k < 3; ++k) {
        Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
        x = m.step_dynamics(x, m.input(a, {}), {grid(rng, R(0), R(1), R("0.1")), grid(rng, R(0), R(1), R("0.1"))});
        s = std::get<EstimatorState>(estimator_step(m, s, x, a, m.config().detector, {R(0), R(0)}));
        REQUIRE(s.corrected == BoxUnion::point(x));
    }
}

TEST_CASE("corrected sets stay inside the prediction and contain the true state") {
    IntersectionConfig c = plant_with_detector(2, R("0.1"), R("0.2"));
    auto rep = verification::estimator_soundness(c, 97, 400, 2);
    INFO(rep.first_violation);
    CHECK(rep.violations == 0);
    CHECK(rep.attacked_steps > 0);
    CHECK(rep.steps_checked > 1000);

    Model m(c);
    std::mt19937_64 rng(101);
    for (int run = 0; run < 200; ++run) {
        StateVec x = sv({R(1), R(1)});
        EstimatorState s = make_estimator(c, x);
        for (int k = 0; k < 6; ++k) {
            Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
            BoxUnion before = predict(m, s.corrected, a);
            x = m.step_dynamics(x, m.input(a, {}), {grid(rng, R(0), R(1), R("0.1")), grid(rng, R(0), R(1), R("0.1"))});
            s = std::get<EstimatorState>(estimator_step(m, s, x, a, c.detector, {R(0), R(0)}));
            REQUIRE(s.corrected.subset_of(before));
            REQUIRE(s.corrected.contains(x));
        }
    }
}

TEST_CASE("stealthy set grows with the threshold") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 1000; ++trial) {
        Rational e1 = grid(rng, R(0), R(1), R("0.125")), e2 = grid(rng, R(0), R(1), R("0.125"));
        if (e2 < e1) std::swap(e1, e2);
        Model m1(plant_with_detector(1, R("0.1"), e1)), m2(plant_with_detector(1, R("0.1"), e2));
        StateVec prev = sv({grid(rng, R(0), R(10), R("0.5")), grid(rng, R(0), R(10), R("0.5"))});
        Box s1 = stealthy_set(m1, prev, kA13, {R(0), R(0)}, m1.config().detector);
        Box s2 = stealthy_set(m2, prev, kA13, {R(0), R(0)}, m2.config().detector);
        REQUIRE(s2.contains(s1));
    }
}
