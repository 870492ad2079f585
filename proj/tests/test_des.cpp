#include "support.hpp"

#include "rsc/des.hpp"
#include "rsc/detector.hpp"
#include "rsc/estimator.hpp"

#include <fstream>
#include <set>
#include <sstream>

using namespace rsc;
using namespace rsc::test;

namespace {

const Action kA13{{1, 3}};

Action random_action(std::mt19937_64& rng) { return Action{{pick(rng, 0, 1) ? 3 : 1, pick(rng, 0, 1) ? 3 : 1}}; }

// One vehicle, one speed, no disturbance: cells 0, 1, 2 then marked.
IntersectionConfig chain_plant() {
    IntersectionConfig c;
    c.roads = {{R("1.5"), R("2.5")}};
    c.vehicles = {{0, true, {1}}};
    c.x0 = BoxUnion::point(sv({R(0)}));
    c.detector = {{R(0)}, {R(0)}};
    c.scale = 20;
    return c;
}

}  // namespace

TEST_CASE("disturbance grid") {
    CHECK(build_w_set(Model(verification::two_vehicle_plant(1))) == std::vector<Rational>{R(0), R(1)});
    IntersectionConfig c = verification::two_vehicle_plant(1);
    c.d_max = 0;
    CHECK(build_w_set(Model(c)) == std::vector<Rational>{R(0)});
    c.d_min = -1;
    c.d_max = 2;
    for (auto& v : c.vehicles) v.speed_steps = {2, 3};
    CHECK(build_w_set(Model(c)) == std::vector<Rational>{R(-1), R(0), R(1), R(2)});
}

TEST_CASE("trust-window images on cells") {
    Model m(verification::two_vehicle_plant(1));
    std::vector<Action> seq{kA13};
    CHECK(lambda_c_image(m, {1, 1}, seq, {2, 5}) == CellSet::product({{2, 3}, {4, 5}}));
    CHECK(lambda_c_image(m, {2, 5}, seq, {3, 8}) == CellSet::product({{3, 4}, {8, 9}}));
    CHECK(lambda_c_image(m, {1, 1}, seq, {3, 5}) == CellSet::product({{2, 3}, {4, 5}}));
    CHECK(lambda_c_image(m, {1, 1}, seq, {7, 7}) == CellSet::product({{2, 3}, {4, 5}}).unite(CellSet({{7, 7}})));
}

TEST_CASE("cell images cover the continuous trust window and match it at cell centres") {
    Model m(verification::two_vehicle_plant(2));
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 2000; ++trial) {
        StateVec prev = sv({grid(rng, R(-2), R(4), R("0.05")), grid(rng, R(-2), R(4), R("0.05"))});
        int len = static_cast<int>(pick(rng, 1, 2));
        std::vector<Action> seq;
        for (int k = 0; k < len; ++k) seq.push_back(random_action(rng));
        StateVec cur = sv({grid(rng, R(0), R(12), R("0.05")), grid(rng, R(0), R(12), R("0.05"))});
        CellSet img = lambda_c_image(m, m.quantize(prev), seq, m.quantize(cur));
        BoxUnion window = *trust_window(m, prev, seq, cur);
        REQUIRE(m.quantize_set(window).subset_of(img));

        StateVec centre = sv({Rational(m.quantize(prev)[0]), Rational(m.quantize(prev)[1])});
        StateVec cur_centre = sv({Rational(m.quantize(cur)[0]), Rational(m.quantize(cur)[1])});
        REQUIRE(m.quantize_set(*trust_window(m, centre, seq, cur_centre)) == img);
    }
}

TEST_CASE("detector outcome on cells") {
    Model m(verification::two_vehicle_plant(1));
    CellSet st = stealthy_cells(m, {2, 4}, m.config().detector);
    CHECK(st == CellSet::product({{2, 3}, {4, 5}}));
    CHECK(lambda_d_outcome(st, {2, 5}) == Decision::H0);
    CHECK(lambda_d_outcome(st, {2, 6}) == Decision::H1);
    CHECK(lambda_d_outcome(st, {1, 4}) == Decision::H1);
}

TEST_CASE("cell detector never rejects what the continuous detector accepts") {
    Model m(plant_with_detector(1, R("0.1"), R("0.3")));
    std::mt19937_64 rng(109);
    int silent = 0;
    for (int trial = 0; trial < 5000; ++trial) {
        StateVec prev = sv({grid(rng, R(0), R(8), R("0.05")), grid(rng, R(0), R(8), R("0.05"))});
        Action a = random_action(rng);
        StateVec meas = sv({prev[0] + a.steps[0] + grid(rng, R(-1), R(2), R("0.05")),
                            prev[1] + a.steps[1] + grid(rng, R(-1), R(2), R("0.05"))});
        DetectorState d = make_detector(m.config().detector);
        d.last_measurement = prev;
        d.last_input = a;
        d = observe(m, d, meas);
        if (decide(d) == Decision::H1) continue;
        ++silent;
        CellVec q = m.quantize(prev);
        q[0] += a.steps[0];
        q[1] += a.steps[1];
        REQUIRE(lambda_d_outcome(stealthy_cells(m, q, m.config().detector), m.quantize(meas)) == Decision::H0);
    }
    CHECK(silent > 1000);
}

TEST_CASE("observer steps through the attack example") {
    Model m(verification::two_vehicle_plant(1));
    const auto& p = m.config().detector;
    SynthesisState s0 = initial_state(m, {1, 1});
    CHECK(m.cell_post(s0.info, kA13) == CellSet::product({{2, 3}, {4, 5}}));
    ObserverStep r1 = observer_step(m, s0, kA13, {2, 5}, 1, p);
    REQUIRE(r1.kind == ObserverStep::Kind::Ok);
    CHECK(r1.next.info == CellSet::product({{2, 3}, {4, 5}}));
    ObserverStep r2 = observer_step(m, r1.next, kA13, {3, 8}, 1, p);
    REQUIRE(r2.kind == ObserverStep::Kind::Ok);
    CHECK(r2.next.info == CellSet::product({{3, 4}, {8, 9}}));
    CHECK(observer_step(m, r1.next, kA13, {3, 11}, 1, p).kind == ObserverStep::Kind::Detected);

    // Before the window fills the image is the whole space and the prediction survives.
    Model m3(verification::two_vehicle_plant(3));
    ObserverStep w = observer_step(m3, initial_state(m3, {1, 1}), kA13, {2, 5}, 3, p);
    REQUIRE(w.kind == ObserverStep::Kind::Ok);
    CHECK_FALSE(w.image.has_value());
    CHECK(w.next.info == m3.cell_post(initial_state(m3, {1, 1}).info, kA13));
}

TEST_CASE("cell prediction commutes with quantization") {
    Model m(verification::two_vehicle_plant(1));
    std::mt19937_64 rng(113);
    for (int trial = 0; trial < 3000; ++trial) {
        std::vector<Interval> d(2);
        for (auto& iv : d) {
            Rational a = grid(rng, R(0), R(13), R("0.1")), b = grid(rng, R(0), R(13), R("0.1"));
            iv = {rmin(a, b), rmax(a, b)};
        }
        BoxUnion s = bu(Box(d));
        Action a = random_action(rng);
        REQUIRE(m.quantize_set(m.post(s, a)) == m.cell_post(m.quantize_set(s), a));
    }
}

TEST_CASE("single-vehicle chain observer") {
    Model m(chain_plant());
    ObserverAutomaton obs = build_observer(m, {0, 1000});
    REQUIRE(obs.states.size() == 4);
    std::size_t edges = 0;
    for (std::size_t id = 0; id < obs.states.size(); ++id) {
        edges += obs.edges[id].size();
        CHECK(obs.edges[id].size() == (obs.marked(id) ? 0u : 1u));
    }
    CHECK(edges == 3);
    CHECK(obs.initial.size() == 1);
}

TEST_CASE("observer is deterministic and every state is reachable") {
    Model m(verification::two_vehicle_plant(1));
    ObserverAutomaton obs = build_observer(m, {1, 100000});
    std::vector<char> seen(obs.states.size(), 0);
    std::vector<std::size_t> stack(obs.initial.begin(), obs.initial.end());
    for (auto i : stack) seen[i] = 1;
    while (!stack.empty()) {
        std::size_t id = stack.back();
        stack.pop_back();
        std::set<std::pair<std::size_t, CellVec>> labels;
        for (const auto& e : obs.edges[id]) {
            REQUIRE(labels.insert({e.action, e.measured}).second);
            if (!seen[e.target]) {
                seen[e.target] = 1;
                stack.push_back(e.target);
            }
        }
    }
    for (auto s : seen) REQUIRE(s);

    // Rebuilding gives the same automaton.
    std::ostringstream a, b;
    write_observer(a, m, obs);
    write_observer(b, m, build_observer(m, {1, 100000}));
    CHECK(a.str() == b.str());
}

TEST_CASE("observer export matches the golden file") {
    Model m(verification::two_vehicle_plant(1));
    std::ostringstream out;
    write_observer(out, m, build_observer(m, {1, 100000}));
    std::ifstream in(source_path("tests/golden/observer-t1.txt"));
    REQUIRE(in.good());
    std::stringstream golden;
    golden << in.rdbuf();
    CHECK(out.str() == golden.str());
}

TEST_CASE("state budget is enforced") {
    Model m(verification::two_vehicle_plant(1));
    CHECK_THROWS_AS(build_observer(m, {1, 10}), ResourceError);
}

TEST_CASE("refinement check flags a mismatched information state") {
    Model m(verification::two_vehicle_plant(1));
    std::vector<RefinementPoint> pts{{1, bu(box({{R(2), R(3)}, {R(4), R(5)}})), CellSet::product({{2, 3}, {4, 5}})}};
    CHECK(check_refinement(m, pts));
    pts.push_back({2, bu(box({{R(3), R(4)}, {R(8), R(9)}})), CellSet::product({{3}, {8, 9}})});
    CHECK_FALSE(check_refinement(m, pts));
    CHECK(first_refinement_breach(m, pts) == 2);
}
