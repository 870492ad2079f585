#include "rsc/verification/oracles.hpp"

#include "rsc/detector.hpp"
#include "rsc/errors.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace rsc::verification {

Interval closed_form_error_interval(const Rational& lo, const Rational& hi, const Rational& x, const Rational& eta,
                                    const Rational& b, const Rational& C) {
    const Rational slack = eta + b - C;
    return {lo - slack - x, hi + slack - x};
}

bool sampled_segment_collides(const Model& model, const StateVec& from, const StateVec& to, int samples) {
    for (int j = 0; j <= samples; ++j) {
        const Rational t(j, samples);
        StateVec p(from.size());
        for (std::size_t i = 0; i < from.size(); ++i) p[i] = from[i] + (to[i] - from[i]) * t;
        if (model.in_bad_set(p)) return true;
    }
    return false;
}

namespace {

Rational grid_value(std::mt19937_64& rng, const Rational& lo, const Rational& hi, const Rational& res) {
    std::int64_t a = ceil_int(lo / res), b = floor_int(hi / res);
    if (b < a) return lo;
    return res * std::uniform_int_distribution<std::int64_t>(a, b)(rng);
}

bool crossed(const Model& model, const StateVec& x) {
    const auto& cfg = model.config();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(cfg.roads[cfg.vehicles[i].road].exit < x[i])) return false;
    return true;
}

SoundnessReport soundness_run(const Model& model, std::uint64_t seed, std::size_t run) {
    const auto& cfg = model.config();
    const std::size_t n = model.size();
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(run),
                     static_cast<std::uint32_t>(run >> 32)};
    std::mt19937_64 rng(ss);
    SoundnessReport rep;
    rep.runs = 1;

    const auto& boxes = cfg.x0.boxes();
    const Box& b0 = boxes[std::uniform_int_distribution<std::size_t>(0, boxes.size() - 1)(rng)];
    StateVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = grid_value(rng, b0[i].lo, b0[i].hi, cfg.resolution());

    const int horizon = crossing_bound(model);
    const std::vector<AttackStrategy> all{AttackStrategy::Surge, AttackStrategy::Offset,
                                          AttackStrategy::RandomStealthy, AttackStrategy::Trace};
    const auto plans = random_attack_schedule(rng, n, cfg.t_max, horizon, all, cfg.cell_width());
    const bool corners = std::bernoulli_distribution(0.3)(rng);

    StateVec measured = x;
    DetectorState det = observe(model, make_detector(cfg.detector), measured);
    EstimatorState est = make_estimator(cfg, measured);

    auto fail = [&](int k, const std::string& why) {
        ++rep.violations;
        if (rep.first_violation.empty())
            rep.first_violation = "run " + std::to_string(run) + " step " + std::to_string(k) + ": " + why +
                                  " x=" + to_string(x) + " corrected=" + to_string(est.corrected);
    };
    ++rep.steps_checked;
    if (!est.corrected.contains(x)) fail(0, "true state outside corrected set");

    for (int k = 0; k < horizon && !crossed(model, x); ++k) {
        const Action& a = model.actions()[std::uniform_int_distribution<std::size_t>(0, model.actions().size() - 1)(rng)];
        const auto& ucs = model.uncontrolled_choices();
        const auto& uc = ucs[std::uniform_int_distribution<std::size_t>(0, ucs.size() - 1)(rng)];
        std::vector<Rational> d(n);
        for (auto& v : d)
            v = corners ? (std::bernoulli_distribution(0.5)(rng) ? cfg.delta_max() : cfg.delta_min())
                        : grid_value(rng, cfg.delta_min(), cfg.delta_max(), cfg.resolution());
        x = model.step_dynamics(x, model.input(a, uc), d);

        StateVec next = x;
        for (const auto& p : plans) {
            if (!p.active(k + 1)) continue;
            ++rep.attacked_steps;
            StateVec s = x;
            switch (p.strategy) {
                case AttackStrategy::Surge:
                    s = surge_attack(model, x, *det.last_measurement, a, det.C, cfg.detector,
                                     k + 1 == p.start ? SurgeStep::First : SurgeStep::Continuation, p.sign, p.targets);
                    break;
                case AttackStrategy::RandomStealthy:
                    s = random_stealthy_attack(model, rng, x, *det.last_measurement, a, det.C, cfg.detector, p.targets);
                    break;
                case AttackStrategy::Offset:
                    for (std::size_t t = 0; t < p.targets.size(); ++t) s[p.targets[t]] = x[p.targets[t]] + p.offset[t];
                    break;
                case AttackStrategy::Trace:
                    for (std::size_t t = 0; t < p.targets.size(); ++t)
                        s[p.targets[t]] = x[p.targets[t]] + p.trace[static_cast<std::size_t>(k + 1 - p.start)][t];
                    break;
            }
            for (auto i : p.targets) next[i] = s[i];
        }
        measured = next;

        const std::vector<Rational> prev_C = det.C;
        det = observe(model, record_input(std::move(det), a), measured);
        if (decide(det) == Decision::H1) {
            ++rep.detected_runs;
            break;
        }
        auto stepped = estimator_step(model, est, measured, a, cfg.detector, prev_C);
        if (std::holds_alternative<Detected>(stepped)) {
            fail(k + 1, "estimator flagged an accepted measurement");
            break;
        }
        est = std::get<EstimatorState>(std::move(stepped));
        ++rep.steps_checked;
        if (!est.corrected.contains(x)) fail(k + 1, "true state outside corrected set");
    }
    return rep;
}

}  // namespace

SoundnessReport estimator_soundness(const IntersectionConfig& cfg, std::uint64_t seed, std::size_t runs,
                                    unsigned workers) {
    const Model model(cfg);
    std::vector<SoundnessReport> parts(runs);
    parallel_for(runs, workers, [&](std::size_t r) { parts[r] = soundness_run(model, seed, r); });
    SoundnessReport total;
    for (const auto& p : parts) {
        total.runs += p.runs;
        total.steps_checked += p.steps_checked;
        total.detected_runs += p.detected_runs;
        total.attacked_steps += p.attacked_steps;
        total.violations += p.violations;
        if (total.first_violation.empty()) total.first_violation = p.first_violation;
    }
    return total;
}

MapEnumeration enumerate_control_maps(const Model& model, const ObserverAutomaton& obs, const SupervisorTable& table) {
    const std::size_t na = model.actions().size();
    if (na > 16) throw ContractViolation("too many inputs for control-map enumeration");

    std::map<CellSet, std::size_t> key_id;
    std::vector<CellSet> keys;
    auto id_of = [&](const CellSet& k) {
        auto [it, fresh] = key_id.try_emplace(k, keys.size());
        if (fresh) keys.push_back(k);
        return it->second;
    };
    for (const auto& s : obs.states) id_of(s.info);
    const std::size_t nk = keys.size();

    std::vector<char> marked(nk);
    for (std::size_t k = 0; k < nk; ++k) marked[k] = keys[k].is_marked();
    std::vector<std::vector<std::set<std::size_t>>> succ(nk, std::vector<std::set<std::size_t>>(na));
    for (std::size_t id = 0; id < obs.states.size(); ++id)
        for (const auto& e : obs.edges[id]) succ[key_id[obs.states[id].info]][e.action].insert(key_id[obs.states[e.target].info]);
    std::vector<std::vector<char>> safe(nk, std::vector<char>(na, 0));
    for (std::size_t k = 0; k < nk; ++k)
        if (!marked[k])
            for (std::size_t a = 0; a < na; ++a) safe[k][a] = safe_des(model, keys[k], model.actions()[a]);
    std::vector<std::size_t> init;
    for (auto id : obs.initial) init.push_back(key_id[obs.states[id].info]);

    MapEnumeration out;
    for (std::size_t k = 0; k < nk; ++k) out.keys += marked[k] ? 0 : 1;

    using Mask = std::uint32_t;
    auto reachable = [&](const std::vector<Mask>& m) {
        std::vector<char> seen(nk, 0);
        std::vector<std::size_t> stack;
        for (auto k : init)
            if (!seen[k]) seen[k] = 1, stack.push_back(k);
        while (!stack.empty()) {
            auto k = stack.back();
            stack.pop_back();
            if (marked[k]) continue;
            for (std::size_t a = 0; a < na; ++a)
                if (m[k] >> a & 1)
                    for (auto t : succ[k][a])
                        if (!seen[t]) seen[t] = 1, stack.push_back(t);
        }
        return seen;
    };
    auto valid = [&](const std::vector<Mask>& m, const std::vector<char>& seen) {
        for (std::size_t k = 0; k < nk; ++k) {
            if (!seen[k] || marked[k]) continue;
            if (m[k] == 0) return false;
            for (std::size_t a = 0; a < na; ++a)
                if ((m[k] >> a & 1) && !safe[k][a]) return false;
        }
        std::vector<char> co(nk, 0);
        for (std::size_t k = 0; k < nk; ++k) co[k] = marked[k];
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t k = 0; k < nk; ++k) {
                if (co[k] || !seen[k]) continue;
                for (std::size_t a = 0; a < na && !co[k]; ++a)
                    if (m[k] >> a & 1)
                        for (auto t : succ[k][a])
                            if (co[t]) {
                                co[k] = 1;
                                grew = true;
                                break;
                            }
            }
        }
        for (std::size_t k = 0; k < nk; ++k)
            if (seen[k] && !co[k]) return false;
        return true;
    };
    auto table_mask = [&](std::size_t k) {
        Mask m = 0;
        if (const auto* adm = table.find(keys[k]))
            for (auto a : *adm) m |= Mask(1) << a;
        return m;
    };

    std::vector<Mask> tm(nk);
    for (std::size_t k = 0; k < nk; ++k) tm[k] = table_mask(k);
    out.table_valid = table.success && valid(tm, reachable(tm));

    std::vector<Mask> m(nk, 0);
    const Mask full = (Mask(1) << na) - 1;
    std::function<void()> rec = [&] {
        auto seen = reachable(m);
        for (std::size_t k = 0; k < nk; ++k) {
            if (!seen[k] || marked[k] || m[k] != 0) continue;
            for (Mask s = 1; s <= full; ++s) {
                m[k] = s;
                rec();
            }
            m[k] = 0;
            return;
        }
        if (++out.maps_tried > 50'000'000) throw ResourceError("control-map enumeration exceeded its budget");
        if (!valid(m, seen)) return;
        ++out.valid_maps;
        for (std::size_t k = 0; k < nk; ++k) {
            if (!seen[k] || marked[k] || (m[k] & ~tm[k]) == 0) continue;
            ++out.not_contained;
            if (out.first_counterexample.empty())
                out.first_counterexample = "state " + to_string(keys[k]) + " admits inputs outside the table";
            break;
        }
    };
    rec();
    return out;
}

std::vector<std::size_t> shared_permissiveness(const std::vector<SupervisorTable>& tables) {
    std::map<CellSet, std::size_t> seen;
    std::size_t ok = 0;
    for (const auto& t : tables) {
        if (!t.success) continue;
        ++ok;
        for (const auto& [k, v] : t.admissible) ++seen[k];
    }
    std::vector<std::size_t> out(tables.size(), 0);
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (!tables[i].success) continue;
        for (const auto& [k, v] : tables[i].admissible)
            if (seen[k] == ok) out[i] += v.size();
    }
    return out;
}

std::string first_pointwise_growth(const Model& model, const std::vector<SupervisorTable>& tables) {
    std::map<CellSet, std::size_t> seen;
    std::vector<const SupervisorTable*> ok;
    for (const auto& t : tables)
        if (t.success) ok.push_back(&t);
    for (const auto* t : ok)
        for (const auto& [k, v] : t->admissible) ++seen[k];
    for (std::size_t i = 1; i < ok.size(); ++i) {
        for (const auto& [k, v] : ok[i]->admissible) {
            if (seen[k] != ok.size()) continue;
            const auto& before = *ok[i - 1]->find(k);
            for (auto a : v)
                if (std::find(before.begin(), before.end(), a) == before.end())
                    return "table " + std::to_string(i) + " admits " + model.action_label(model.actions()[a]) +
                           " at " + to_string(k);
        }
    }
    return {};
}

}  // namespace rsc::verification
