#include "support.hpp"

#include "rsc/model.hpp"

using namespace rsc;
using namespace rsc::test;

namespace {

Model two_vehicle() { return Model(verification::two_vehicle_plant(1)); }

IntersectionConfig same_road_plant() {
    IntersectionConfig c = verification::two_vehicle_plant(1);
    c.vehicles[1].road = 0;
    c.gap = 1;
    c.x0 = BoxUnion::point(sv({R(1), R(3)}));
    return c;
}

Box random_box(std::mt19937_64& rng, std::size_t n, const Rational& lo, const Rational& hi, const Rational& step) {
    std::vector<Interval> d(n);
    for (auto& iv : d) {
        Rational a = grid(rng, lo, hi, step), b = grid(rng, lo, hi, step);
        iv = {rmin(a, b), rmax(a, b)};
    }
    return Box(d);
}

}  // namespace

TEST_CASE("step_dynamics adds input and disturbance") {
    Model m = two_vehicle();
    CHECK(m.step_dynamics(sv({R(1), R(1)}), InputVec{R(1), R(3)}, {R(0), R(0)}) == sv({R(2), R(4)}));
    CHECK(m.step_dynamics(sv({R(1), R(1)}), InputVec{R(1), R(3)}, {R(1), R(1)}) == sv({R(3), R(5)}));
    CHECK(m.step_dynamics(sv({R(1), R(1)}), InputVec{R(1), R(3)}, {R("0.5"), R(0)}) == sv({R("2.5"), R(4)}));
    CHECK_THROWS_AS(m.step_dynamics(sv({R(1), R(1)}), InputVec{R(1), R(3)}, {R(2), R(0)}), ContractViolation);
    CHECK_THROWS_AS(m.step_dynamics(sv({R(1), R(1)}), InputVec{R(1), R(3)}, {R(-1), R(0)}), ContractViolation);
}

TEST_CASE("post of points and boxes") {
    Model m = two_vehicle();
    const Action a13{{1, 3}};
    CHECK(m.post(BoxUnion::point(sv({R(1), R(1)})), a13) == bu(box({{R(2), R(3)}, {R(4), R(5)}})));
    CHECK(m.post(BoxUnion::point(sv({R(2), R(5)})), a13) == bu(box({{R(3), R(4)}, {R(8), R(9)}})));

    BoxUnion s1 = BoxUnion::point(sv({R(1), R(1)}));
    BoxUnion s2 = BoxUnion::point(sv({R(6), R(1)}));
    CHECK(m.post(s1.unite(s2), a13) == m.post(s1, a13).unite(m.post(s2, a13)));
}

TEST_CASE("post_seq matches the closed form for controlled vehicles") {
    Model m = two_vehicle();
    std::vector<Action> seq{Action{{1, 3}}, Action{{1, 3}}};
    CHECK(m.post_seq(BoxUnion::point(sv({R(1), R(1)})), seq) == bu(box({{R(3), R(5)}, {R(7), R(9)}})));
    CHECK_THROWS_AS(m.post_seq(BoxUnion::point(sv({R(1), R(1)})), std::span<const Action>{}), ContractViolation);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        Box b = random_box(rng, 2, R(0), R(20), R("0.25"));
        int len = static_cast<int>(pick(rng, 1, 4));
        std::vector<Action> s;
        Rational sum0 = 0, sum1 = 0;
        for (int k = 0; k < len; ++k) {
            Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
            sum0 += a.steps[0];
            sum1 += a.steps[1];
            s.push_back(a);
        }
        Box expect({{b[0].lo + sum0, b[0].hi + sum0 + len}, {b[1].lo + sum1, b[1].hi + sum1 + len}});
        REQUIRE(m.post_seq(bu(b), s) == bu(expect));
    }
}

TEST_CASE("post contains every sampled successor") {
    Model m = two_vehicle();
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        StateVec x = sv({grid(rng, R(0), R(15), R("0.1")), grid(rng, R(0), R(15), R("0.1"))});
        Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
        std::vector<Rational> d{grid(rng, R(0), R(1), R("0.01")), grid(rng, R(0), R(1), R("0.01"))};
        StateVec y = m.step_dynamics(x, m.input(a, {}), d);
        REQUIRE(m.post(BoxUnion::point(x), a).contains(y));
    }
}

TEST_CASE("bad set on crossing and shared roads") {
    Model m = two_vehicle();
    CHECK(m.in_bad_set(sv({R(10), R(11)})));
    CHECK_FALSE(m.in_bad_set(sv({R(13), R(13)})));
    CHECK(m.in_bad_set(sv({R("9.5"), R("12.5")})));
    CHECK_FALSE(m.in_bad_set(sv({R("9.4"), R(11)})));

    Model same(same_road_plant());
    CHECK(same.in_bad_set(sv({R(5), R("5.5")})));
    CHECK_FALSE(same.in_bad_set(sv({R(5), R(6)})));
    CHECK_FALSE(same.in_bad_set(sv({R(13), R("13.5")})));
}

TEST_CASE("quantize uses left-open cells and a marked sentinel") {
    Model m = two_vehicle();
    CHECK(m.quantize_component(0, R("2.4")) == 2);
    CHECK(m.quantize_component(0, R("2.5")) == 2);
    CHECK(m.quantize_component(0, R("2.51")) == 3);
    CHECK(m.quantize_component(0, R("12.5")) == 12);
    CHECK(m.quantize_component(0, R("12.6")) == kMarkedCell);
    CHECK(m.quantize_set(bu(box({{R(2), R(3)}, {R(4), R(5)}}))) == CellSet::product({{2, 3}, {4, 5}}));
    CHECK(to_string(m.quantize_set(bu(box({{R(12), R(14)}, {R(4), R(4)}})))) == "{(12,4),(M,4)}");
}

TEST_CASE("quantize is idempotent on centres and commutes with whole-cell shifts") {
    Model m = two_vehicle();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5000; ++trial) {
        Rational x = grid(rng, R(-5), R(12), R("0.01"));
        Cell c = m.quantize_component(0, x);
        REQUIRE(m.quantize_component(0, Rational(c)) == c);
        std::int64_t shift = pick(rng, -4, 0);
        REQUIRE(m.quantize_component(0, x + shift) == c + shift);
        REQUIRE(m.cell_range(0, c).lo < x);
        REQUIRE(x <= m.cell_range(0, c).hi);
    }
}

TEST_CASE("transition safety examples") {
    Model m = two_vehicle();
    BoxUnion x0 = BoxUnion::point(sv({R(1), R(1)}));
    const Action a13{{1, 3}};
    CHECK(m.transition_safe(x0, m.input(a13, {}), m.post(x0, a13)));
    BoxUnion inside = BoxUnion::point(sv({R(10), R(10)}));
    CHECK_FALSE(m.transition_safe(inside, m.input(a13, {}), m.post(inside, a13)));
}

TEST_CASE("transition safety is monotone under set inclusion") {
    Model m = two_vehicle();
    std::mt19937_64 rng(23);
    int unsafe_small = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        Box big = random_box(rng, 2, R(4), R(13), R("0.5"));
        Box small({{big[0].lo, grid(rng, big[0].lo, big[0].hi, R("0.5"))},
                   {grid(rng, big[1].lo, big[1].hi, R("0.5")), big[1].hi}});
        Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
        InputVec u = m.input(a, {});
        bool safe_big = m.transition_safe(bu(big), u, m.post(bu(big), a));
        bool safe_small = m.transition_safe(bu(small), u, m.post(bu(small), a));
        if (safe_big) REQUIRE(safe_small);
        unsafe_small += safe_small ? 0 : 1;
    }
    CHECK(unsafe_small > 0);
}

TEST_CASE("transition safety agrees with densely sampled trajectories from points") {
    Model m = two_vehicle();
    std::mt19937_64 rng(29);
    const int kDistSteps = 8;
    int agree = 0, total = 0, oracle_unsafe = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        StateVec x = sv({grid(rng, R(5), R(13), R("0.125")), grid(rng, R(5), R(13), R("0.125"))});
        if (m.in_bad_set(x)) continue;
        Action a{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}};
        InputVec u = m.input(a, {});
        bool hit = false;
        for (int i = 0; i <= kDistSteps && !hit; ++i)
            for (int j = 0; j <= kDistSteps && !hit; ++j) {
                StateVec y = m.step_dynamics(x, u, {Rational(i, kDistSteps), Rational(j, kDistSteps)});
                hit = verification::sampled_segment_collides(m, x, y, 400);
            }
        bool safe = m.transition_safe(BoxUnion::point(x), u, m.post(BoxUnion::point(x), a));
        // Sampling can miss a collision, never invent one.
        if (hit) REQUIRE_FALSE(safe);
        oracle_unsafe += hit ? 1 : 0;
        agree += (hit != safe) ? 1 : 0;
        ++total;
    }
    CHECK(oracle_unsafe > 0);
    // Pinned: at least 97% agreement between the window check and the sampled trajectories.
    CHECK(agree * 100 >= total * 97);
}

TEST_CASE("segment check matches sampling on random segments") {
    Model m(same_road_plant());
    Model cross = two_vehicle();
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 3000; ++trial) {
        const Model& mm = (trial % 2) ? m : cross;
        StateVec a = sv({grid(rng, R(0), R(14), R("0.25")), grid(rng, R(0), R(14), R("0.25"))});
        StateVec b = sv({a[0] + grid(rng, R(1), R(4), R("0.25")), a[1] + grid(rng, R(1), R(4), R("0.25"))});
        if (verification::sampled_segment_collides(mm, a, b, 200)) REQUIRE(mm.segment_hits_bad_set(a, b));
    }
}

TEST_CASE("disturbance grid in cell widths") {
    Model m = two_vehicle();
    CHECK(m.w_lo() == 0);
    CHECK(m.w_hi() == 1);
    CHECK(m.marked_from(0) == 13);
}
