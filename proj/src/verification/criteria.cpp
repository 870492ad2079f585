#include "rsc/verification/criteria.hpp"

#include "rsc/config.hpp"
#include "rsc/detector.hpp"
#include "rsc/verification/oracles.hpp"
#include "rsc/verification/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>

namespace rsc::verification {

namespace {

// Collects failed expectations and a short summary.
struct Checks {
    std::ostringstream notes;
    std::vector<std::string> failed;

    void expect(bool ok, const std::string& what) {
        if (!ok) failed.push_back(what);
    }
    bool finish(std::string& detail) {
        detail = notes.str();
        for (const auto& f : failed) detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + f;
        return failed.empty();
    }
};

std::vector<std::string> labels(const Model& m, const std::vector<std::size_t>* adm) {
    std::vector<std::string> out;
    if (adm)
        for (auto a : *adm) out.push_back(m.action_label(m.actions()[a]));
    std::sort(out.begin(), out.end());
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s + "}";
}

bool bad_outcome(Outcome o) { return o == Outcome::Collision || o == Outcome::Deadlock || o == Outcome::Horizon; }

bool criterion_baseline(std::string& detail) {
    Checks c;
    const Model model(two_vehicle_plant(1));
    const SupervisorTable base = baseline_supervisor(model);
    const std::vector<std::pair<CellVec, std::vector<std::string>>> expected{
        {{1, 1}, {"(1,3)", "(3,1)"}}, {{2, 4}, {"(1,3)"}}, {{2, 5}, {"(1,1)", "(1,3)"}}};
    for (const auto& [q, want] : expected) {
        auto got = labels(model, base.find(CellSet({q})));
        c.expect(got == want, "baseline at " + to_string(q) + " is " + join(got));
    }

    const StateVec x1{Rational(2), Rational(4)};
    const StateVec x0{Rational(1), Rational(1)};
    const Action a0{{1, 3}};
    const StateVec spoofed = surge_attack(model, x1, x0, a0, {Rational(0), Rational(0)}, model.config().detector,
                                          SurgeStep::First, +1, {1});
    c.expect(spoofed == StateVec{Rational(2), Rational(5)}, "surge measurement is " + to_string(spoofed));
    DetectorState det = observe(model, make_detector(model.config().detector), x0);
    det = observe(model, record_input(std::move(det), a0), spoofed);
    c.expect(decide(det) == Decision::H0, "detector flags the surge");

    const RunTrace tr = run_scenario(model, baseline_attack_demo(), base);
    c.expect(tr.steps.size() > 1 && tr.steps[1].measured == spoofed && tr.steps[1].attacked, "step 1 is not the surge");
    c.expect(tr.steps.size() > 1 && tr.steps[1].chosen == model.action_index(Action{{1, 1}}),
             "scripted (1,1) not applied at step 1");
    c.expect(tr.outcome == Outcome::Collision || tr.outcome == Outcome::Deadlock,
             "baseline run ended " + to_string(tr.outcome));
    c.notes << "baseline sigma matches; surge (2,5) accepted; run ended " << to_string(tr.outcome) << " after "
            << tr.steps.size() - 1 << " steps";
    return c.finish(detail);
}

bool criterion_resilience(std::string& detail) {
    Checks c;
    const Model model(two_vehicle_plant(1));
    const ObserverAutomaton obs = build_observer(model, {1});
    const SupervisorTable table = synthesize(model, obs);
    c.expect(table.success, "synthesis failed");
    if (!table.success) return c.finish(detail);

    const CellSet iota1 = CellSet::product({{2, 3}, {4, 5}});
    const RunTrace demo = run_scenario(model, resilient_attack_demo(), table);
    const auto one_three = *model.action_index(Action{{1, 3}});
    const auto one_one = *model.action_index(Action{{1, 1}});
    c.expect(demo.steps.size() > 1 && demo.steps[1].info == iota1, "information state at step 1 differs");
    c.expect(demo.steps.size() > 1 && demo.steps[1].admissible == std::vector<std::size_t>{one_three},
             "admissible set at step 1 is not {(1,3)}");
    c.expect(labels(model, table.find(iota1)) == std::vector<std::string>{"(1,3)"}, "table entry at iota(1)");
    c.expect(demo.outcome == Outcome::SafeMarked, "demo ended " + to_string(demo.outcome));
    const auto* adm1 = table.find(iota1);
    c.expect(adm1 && std::find(adm1->begin(), adm1->end(), one_one) == adm1->end(), "(1,1) enabled at iota(1)");
    const RunTrace other = run_scenario(model, baseline_attack_demo(), table);
    c.expect(!bad_outcome(other.outcome), "baseline-demo disturbance under the resilient table ended " +
                                              to_string(other.outcome));

    const std::vector<std::vector<AttackStrategy>> mixes{{AttackStrategy::Surge},
                                                         {AttackStrategy::RandomStealthy},
                                                         {AttackStrategy::Offset},
                                                         {AttackStrategy::Trace},
                                                         {AttackStrategy::Surge, AttackStrategy::Offset,
                                                          AttackStrategy::RandomStealthy, AttackStrategy::Trace}};
    constexpr std::size_t kSeeds = 1000;
    std::vector<Outcome> outcomes(mixes.size() * kSeeds);
    std::vector<std::string> errors(outcomes.size());
    parallel_for(outcomes.size(), worker_count(), [&](std::size_t job) {
        ScenarioConfig sc;
        sc.plant = model.config();
        sc.seed = 1 + job % kSeeds;
        sc.input_policy = InputPolicy::Random;
        sc.disturbance = sc.seed % 3 == 0 ? DisturbancePolicy::Corners : DisturbancePolicy::Uniform;
        std::mt19937_64 rng(sc.seed * 1000003 + job / kSeeds);
        sc.attacks = random_attack_schedule(rng, 2, 1, crossing_bound(model), mixes[job / kSeeds],
                                            model.config().cell_width());
        try {
            outcomes[job] = run_scenario(model, sc, table).outcome;
        } catch (const std::exception& e) {
            outcomes[job] = Outcome::Horizon;
            errors[job] = e.what();
        }
    });
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    for (auto o : outcomes) ++counts[static_cast<int>(o)];
    for (const auto& e : errors)
        if (!e.empty()) {
            c.expect(false, "run raised: " + e);
            break;
        }
    c.expect(counts[1] + counts[2] + counts[4] == 0, "unsafe or unfinished runs present");
    c.notes << "iota(1)=" << to_string(iota1) << " admits {(1,3)}; demo SAFE_MARKED; " << outcomes.size()
            << " seeded runs: SAFE_MARKED=" << counts[0] << " DETECTED=" << counts[3]
            << " COLLISION=" << counts[1] << " DEADLOCK=" << counts[2] << " HORIZON=" << counts[4];
    return c.finish(detail);
}

bool criterion_correction(std::string& detail) {
    Checks c;
    const Model model(two_vehicle_plant(1));
    const ObserverAutomaton obs = build_observer(model, {1});
    const CellSet iota1 = CellSet::product({{2, 3}, {4, 5}});
    const Action u{{1, 3}};
    const auto ai = *model.action_index(u);

    std::optional<std::size_t> src;
    for (std::size_t id = 0; id < obs.states.size(); ++id) {
        const auto& s = obs.states[id];
        if (s.info == iota1 && s.history.size() == 1 && s.history[0] == CellVec{2, 5}) src = id;
    }
    c.expect(src.has_value(), "observer has no state for iota(1) after measuring (2,5)");
    if (!src) return c.finish(detail);

    const CellSet predicted = model.cell_post(iota1, u);
    c.expect(predicted == CellSet::product({{3, 4, 5}, {7, 8, 9}}), "prediction is " + to_string(predicted));

    const ObserverStep st = observer_step(model, obs.states[*src], u, {3, 8}, 1, model.config().detector);
    c.expect(st.kind == ObserverStep::Kind::Ok, "correction with (3,8) not accepted");
    c.expect(st.next.info == CellSet::product({{3, 4}, {8, 9}}), "corrected state is " + to_string(st.next.info));

    std::set<std::size_t> targets;
    std::set<CellVec> measured;
    for (const auto& e : obs.edges[*src])
        if (e.action == ai) targets.insert(e.target), measured.insert(e.measured);
    c.expect(targets.size() == 4, "source has " + std::to_string(targets.size()) + " correction successors");
    c.expect(measured == std::set<CellVec>{{3, 8}, {3, 9}, {4, 8}, {4, 9}}, "unexpected stealthy measurements");

    std::size_t accepted = 0;
    for (Cell a = 1; a <= 7; ++a)
        for (Cell b = 5; b <= 11; ++b)
            if (observer_step(model, obs.states[*src], u, {a, b}, 1, model.config().detector).kind ==
                ObserverStep::Kind::Ok)
                ++accepted;
    c.expect(accepted == 4, "direct stepping accepts " + std::to_string(accepted) + " measured cells");
    c.notes << to_string(predicted) << " --(3,8)--> " << to_string(st.next.info) << "; " << targets.size()
            << " correction successors";
    return c.finish(detail);
}

bool criterion_stealth_equivalence(std::string& detail) {
    Checks c;
    const IntersectionConfig cfg = single_vehicle_plant();
    const Model model(cfg);
    const Rational eta = cfg.detector.threshold[0], b = cfg.detector.bias[0];
    const Rational step = cfg.resolution();
    const Rational coarse(1, 4);
    std::size_t cases = 0, mismatches = 0, stealthy = 0;
    std::string first;

    for (std::int64_t p = 0; p <= 18; ++p) {
        const StateVec prev{coarse * p};
        for (const auto& a : model.actions()) {
            const Rational u = cfg.mu * cfg.tau * a.steps[0];
            const Rational lo = prev[0] + u + cfg.delta_min(), hi = prev[0] + u + cfg.delta_max();
            for (std::int64_t ci = 0; ci <= 3; ++ci) {
                const Rational C = eta * ci / 3;
                for (std::int64_t xi = -4; xi <= 12; ++xi) {
                    const StateVec x{prev[0] + u + coarse * xi};
                    const Interval want = closed_form_error_interval(lo, hi, x[0], eta, b, C);
                    const auto bounds = stealthy_bounds(model, x, prev, a, {C}, cfg.detector);
                    if (!(bounds[0] == want)) {
                        ++mismatches;
                        if (first.empty()) first = "bounds differ at x=" + to_string(x) + " prev=" + to_string(prev);
                    }
                    for (std::int64_t ei = -60; ei <= 60; ++ei) {
                        const Rational e = step * ei;
                        DetectorState det = make_detector(cfg.detector);
                        det.C = {C};
                        det.last_measurement = prev;
                        det.last_input = a;
                        det = observe(model, std::move(det), StateVec{x[0] + e});
                        const bool silent = decide(det) == Decision::H0;
                        ++cases;
                        stealthy += silent;
                        if (silent != want.contains(e)) {
                            ++mismatches;
                            if (first.empty())
                                first = "e=" + to_string(e) + " x=" + to_string(x) + " prev=" + to_string(prev) +
                                        " C=" + to_string(C);
                        }
                    }
                }
            }
        }
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " counterexamples, first " + first);
    c.notes << cases << " error cases, " << stealthy << " stealthy, " << mismatches << " counterexamples";
    return c.finish(detail);
}

IntersectionConfig three_vehicle_plant() {
    IntersectionConfig cfg;
    cfg.roads = {{parse_rational("9.5"), parse_rational("12.5")}, {parse_rational("9.5"), parse_rational("12.5")}};
    cfg.vehicles = {{0, true, {1, 3}}, {1, true, {1, 2}}, {0, false, {1, 2}}};
    cfg.gap = 1;
    cfg.tau = 1;
    cfg.mu = 1;
    cfg.d_min = 0;
    cfg.d_max = 1;
    cfg.t_max = 3;
    cfg.x0 = BoxUnion::of(Box({{Rational(1), parse_rational("1.5")}, {Rational(1), Rational(1)},
                                {Rational(-3), Rational(-2)}}));
    cfg.detector.bias = {parse_rational("0.05"), parse_rational("0.05"), parse_rational("0.05")};
    cfg.detector.threshold = {parse_rational("0.5"), parse_rational("0.5"), parse_rational("0.5")};
    return cfg;
}

bool criterion_estimator_soundness(std::string& detail) {
    Checks c;
    IntersectionConfig biased = two_vehicle_plant(2);
    biased.detector.bias = {parse_rational("0.1"), parse_rational("0.1")};
    biased.detector.threshold = {parse_rational("0.2"), parse_rational("0.2")};
    IntersectionConfig single = single_vehicle_plant();
    single.t_max = 2;
    const std::vector<std::pair<std::string, IntersectionConfig>> cases{
        {"two-vehicle T=1", two_vehicle_plant(1)},
        {"two-vehicle T=2 biased", biased},
        {"three-vehicle T=3", three_vehicle_plant()},
        {"single-vehicle T=2", single}};
    std::size_t runs = 0, steps = 0, attacked = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto rep = estimator_soundness(cases[i].second, 100 + i, 2500, worker_count());
        runs += rep.runs;
        steps += rep.steps_checked;
        attacked += rep.attacked_steps;
        c.expect(rep.violations == 0, cases[i].first + ": " + std::to_string(rep.violations) + " violations, " +
                                          rep.first_violation);
        c.expect(rep.attacked_steps > 0, cases[i].first + ": no attacked steps");
    }
    c.notes << runs << " runs, " << steps << " steps checked, " << attacked << " attacked steps, true state always inside";
    return c.finish(detail);
}

bool criterion_refinement(std::string& detail) {
    Checks c;
    const Model model(two_vehicle_plant(1));
    const SupervisorTable table = synthesize(model, build_observer(model, {1}));
    c.expect(table.success, "synthesis failed");
    if (!table.success) return c.finish(detail);
    constexpr std::size_t kRuns = 100;
    std::vector<std::size_t> checked(kRuns, 0), breaches(kRuns, 0);
    std::vector<std::string> errors(kRuns);
    const std::vector<AttackStrategy> all{AttackStrategy::Surge, AttackStrategy::Offset,
                                          AttackStrategy::RandomStealthy, AttackStrategy::Trace};
    parallel_for(kRuns, worker_count(), [&](std::size_t r) {
        ScenarioConfig sc;
        sc.plant = model.config();
        sc.seed = 500 + r;
        sc.input_policy = InputPolicy::Random;
        std::mt19937_64 rng(sc.seed);
        sc.attacks = random_attack_schedule(rng, 2, 1, crossing_bound(model), all, model.config().cell_width());
        try {
            const RunTrace t = run_scenario(model, sc, table);
            for (const auto& s : t.steps)
                if (s.refinement) ++checked[r], breaches[r] += *s.refinement ? 0 : 1;
            const auto pts = t.refinement_points();
            if (!check_refinement(model, pts)) ++breaches[r];
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    });
    std::size_t total = 0, bad = 0;
    for (std::size_t r = 0; r < kRuns; ++r) {
        total += checked[r];
        bad += breaches[r];
        if (!errors[r].empty()) c.expect(false, "run raised: " + errors[r]);
    }
    c.expect(bad == 0, std::to_string(bad) + " refinement breaches");

    const auto diags = validate(negative_control());
    bool flagged = std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.key == "disturbance"; });
    c.expect(flagged, "negative control with d_max = 0.7 was not rejected");
    c.notes << kRuns << " runs, " << total << " steps with quantized corrected set equal to the information state; "
            << "d_max = 0.7 rejected";
    return c.finish(detail);
}

bool criterion_tradeoff(std::string& detail) {
    Checks c;
    ScenarioConfig base;
    base.plant = two_vehicle_plant(1);
    SweepOptions opt;
    opt.t_values = {1, 4, 12};
    const auto rows = sweep(base, opt);
    for (const auto& r : rows) {
        c.expect(r.synthesis_ok, "T=" + std::to_string(r.t_max) + " synthesis failed");
        c.expect(r.initial_admissible == 2, "T=" + std::to_string(r.t_max) + " initial set size " +
                                                std::to_string(r.initial_admissible));
        if (r.t_max >= 4)
            c.expect(r.max_live_admissible == 1, "T=" + std::to_string(r.t_max) + " has a non-singleton set, max " +
                                                     std::to_string(r.max_live_admissible));
        c.notes << "T=" << r.t_max << " ok=" << r.synthesis_ok << " shared=" << r.permissiveness_shared
                << " max_live=" << r.max_live_admissible << "; ";
    }
    for (std::size_t i = 1; i < rows.size(); ++i)
        c.expect(rows[i].permissiveness_shared <= rows[i - 1].permissiveness_shared, "permissiveness increases");

    std::vector<SupervisorTable> tables(opt.t_values.size());
    parallel_for(tables.size(), worker_count(), [&](std::size_t i) {
        const Model m(two_vehicle_plant(opt.t_values[i]));
        tables[i] = synthesize(m, build_observer(m, {opt.t_values[i]}));
    });
    const std::string growth = first_pointwise_growth(Model(two_vehicle_plant(1)), tables);
    c.expect(growth.empty(), "pointwise growth: " + growth);
    c.notes << "shared admissible sets shrink pointwise";
    return c.finish(detail);
}

// Tables for one plant over a list of thresholds, in order.
std::vector<SupervisorTable> tables_by_eta(const IntersectionConfig& plant, const std::vector<Rational>& etas) {
    std::vector<SupervisorTable> out(etas.size());
    parallel_for(etas.size(), worker_count(), [&](std::size_t i) {
        IntersectionConfig cfg = plant;
        for (auto& t : cfg.detector.threshold) t = etas[i];
        const Model m(cfg);
        out[i] = synthesize(m, build_observer(m, {cfg.t_max}));
    });
    return out;
}

bool criterion_maximal(std::string& detail) {
    Checks c;
    const ScenarioConfig sc = reduced_instance();
    const Model model(sc.plant);
    const ObserverAutomaton obs = build_observer(model, {sc.plant.t_max});
    const SupervisorTable table = synthesize(model, obs);
    c.expect(model.actions().size() == 2, "instance does not have two inputs");
    for (std::size_t i = 0; i < model.size(); ++i)
        c.expect(model.marked_from(i) - model.quantize(StateVec{Rational(0), Rational(0)})[i] + 1 <= 6,
                 "more than six cells on vehicle " + std::to_string(i));
    c.expect(table.success, "synthesis failed");
    const MapEnumeration e = enumerate_control_maps(model, obs, table);
    c.expect(e.table_valid, "synthesized table is not safe and non-blocking");
    c.expect(e.valid_maps > 0, "no safe non-blocking map found");
    c.expect(e.not_contained == 0, std::to_string(e.not_contained) + " maps exceed the table, " + e.first_counterexample);
    std::size_t restricted = 0;
    for (const auto& [k, v] : table.admissible) restricted += v.size() < model.actions().size();
    c.notes << e.keys << " information states, " << e.maps_tried << " maps enumerated, " << e.valid_maps
            << " safe and non-blocking, all inside the table (" << restricted << " restricted states)";
    return c.finish(detail);
}

bool criterion_threshold(std::string& detail) {
    Checks c;
    const Model model(two_vehicle_plant(1));
    std::mt19937_64 rng(2024);
    auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng); };
    std::size_t trials = 0, set_fail = 0, cell_fail = 0;
    for (; trials < 5000; ++trials) {
        const Rational b(pick(0, 10), 20);
        const Rational e1(pick(0, 40), 20);
        const Rational e2 = e1 + Rational(pick(0, 40), 20);
        DetectorParams p1{{b, b}, {e1, e1}}, p2{{b, b}, {e2, e2}};
        const StateVec prev{Rational(pick(0, 200), 20), Rational(pick(0, 200), 20)};
        const Action& a = model.actions()[static_cast<std::size_t>(pick(0, 3))];
        const std::vector<Rational> C{e1 * pick(0, 4) / 4, e1 * pick(0, 4) / 4};
        const Box s1 = stealthy_set(model, prev, a, C, p1);
        const Box s2 = stealthy_set(model, prev, a, C, p2);
        if (!s2.contains(s1)) ++set_fail;
        const CellVec q = model.quantize(prev);
        if (!stealthy_cells(model, q, p1).subset_of(stealthy_cells(model, q, p2))) ++cell_fail;
    }
    c.expect(set_fail == 0, std::to_string(set_fail) + " stealthy-set inclusions fail");
    c.expect(cell_fail == 0, std::to_string(cell_fail) + " stealthy-cell inclusions fail");

    struct Family {
        std::string name;
        IntersectionConfig plant;
        std::vector<Rational> etas;
    };
    std::vector<Family> families;
    const std::vector<Rational> fine{Rational(0), Rational(1, 4), Rational(1, 2), Rational(1), Rational(3, 2)};
    for (int t : {1, 2, 3}) {
        IntersectionConfig p = reduced_instance().plant;
        p.t_max = t;
        families.push_back({"reduced T=" + std::to_string(t), p, fine});
    }
    families.push_back({"two-vehicle T=1", two_vehicle_plant(1), {Rational(0), Rational(1, 2)}});
    c.notes << trials << " random inclusions hold; shared permissiveness by eta:";
    for (const auto& f : families) {
        const Model m(f.plant);
        const auto tables = tables_by_eta(f.plant, f.etas);
        const auto perm = shared_permissiveness(tables);
        c.notes << " [" << f.name;
        for (std::size_t i = 0; i < perm.size(); ++i)
            c.notes << " " << to_string(f.etas[i]) << "->" << perm[i] << (tables[i].success ? "" : "(failed)");
        c.notes << "]";
        for (std::size_t i = 1; i < perm.size(); ++i)
            c.expect(perm[i] <= perm[i - 1], f.name + ": permissiveness increases with eta");
        const std::string growth = first_pointwise_growth(m, tables);
        c.expect(growth.empty(), f.name + ": pointwise growth: " + growth);
    }
    return c.finish(detail);
}

}  // namespace

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "baseline supervisor is vulnerable to a stealthy surge", 10, criterion_baseline},
        {2, "resilient supervisor keeps every stealthy run safe", 120, criterion_resilience},
        {3, "observer correction step and its successors", 1, criterion_correction},
        {4, "stealthy iff error inside the closed-form interval", 60, criterion_stealth_equivalence},
        {5, "true state always inside the corrected set", 300, criterion_estimator_soundness},
        {6, "quantized estimate equals the information state", 60, criterion_refinement},
        {7, "attack-duration tradeoff", 300, criterion_tradeoff},
        {8, "no safe non-blocking map exceeds the synthesized table", 600, criterion_maximal},
        {9, "threshold monotonicity", 60, criterion_threshold},
    };
    return all;
}

CriterionResult run_criterion(const Criterion& c) {
    CriterionResult r;
    r.id = c.id;
    r.name = c.name;
    r.limit_seconds = c.limit_seconds;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        r.passed = c.check(r.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail += std::string(r.detail.empty() ? "" : "; ") + "exception: " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.limit_seconds) {
        r.passed = false;
        r.detail += "; exceeded the time limit";
    }
    return r;
}

std::vector<CriterionResult> run_all() {
    std::vector<CriterionResult> out;
    for (const auto& c : criteria()) out.push_back(run_criterion(c));
    return out;
}

std::string format_result(const CriterionResult& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f s / %.0f s", r.seconds, r.limit_seconds);
    return "criterion " + std::to_string(r.id) + " [" + (r.passed ? "PASS" : "FAIL") + "] " + r.name + " (" + buf +
           "): " + r.detail;
}

}  // namespace rsc::verification
