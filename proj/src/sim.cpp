#include "rsc/sim.hpp"

#include "rsc/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace rsc {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::SafeMarked: return "SAFE_MARKED";
        case Outcome::Collision: return "COLLISION";
        case Outcome::Deadlock: return "DEADLOCK";
        case Outcome::Detected: return "DETECTED";
        case Outcome::Horizon: return "HORIZON";
    }
    return "?";
}

std::string to_string(DisturbancePolicy p) {
    switch (p) {
        case DisturbancePolicy::Uniform: return "uniform";
        case DisturbancePolicy::Corners: return "corners";
        case DisturbancePolicy::Zero: return "zero";
    }
    return "?";
}

std::string to_string(InputPolicy p) {
    switch (p) {
        case InputPolicy::First: return "first";
        case InputPolicy::Random: return "random";
        case InputPolicy::Scripted: return "scripted";
    }
    return "?";
}

int crossing_bound(const Model& model) {
    const auto& cfg = model.config();
    std::int64_t worst = 0;
    CellSet init = model.quantize_set(cfg.x0);
    for (const auto& q : init)
        for (std::size_t i = 0; i < model.size(); ++i)
            if (q[i] != kMarkedCell)
                worst = std::max(worst, ceil_int(Rational(model.marked_from(i) - q[i] + 1, model.min_advance(i))));
    return static_cast<int>(worst) + 1;
}

std::vector<std::string> check_scenario(const Model& model, const ScenarioConfig& sc) {
    std::vector<std::string> errs = check_attack_plans(sc.attacks, sc.plant.t_max, model.size());
    if (sc.horizon != 0 && sc.horizon < crossing_bound(model))
        errs.push_back("scenario.horizon " + std::to_string(sc.horizon) + " is below the crossing bound " +
                       std::to_string(crossing_bound(model)));
    for (std::size_t k = 0; k < sc.disturbance_script.size(); ++k) {
        const auto& row = sc.disturbance_script[k];
        if (row.size() != model.size()) {
            errs.push_back("scenario.disturbance_script[" + std::to_string(k) + "] needs one value per vehicle");
            continue;
        }
        for (const auto& d : row)
            if (d < sc.plant.delta_min() || sc.plant.delta_max() < d)
                errs.push_back("scenario.disturbance_script[" + std::to_string(k) + "] value " + to_string(d) +
                               " lies outside [d_min*tau, d_max*tau]");
    }
    for (std::size_t k = 0; k < sc.input_script.size(); ++k)
        if (!model.action_index(sc.input_script[k]))
            errs.push_back("scenario.input_script[" + std::to_string(k) + "] is not a controlled input");
    for (std::size_t k = 0; k < sc.uncontrolled_script.size(); ++k) {
        const auto& row = sc.uncontrolled_script[k];
        bool ok = row.size() == model.uncontrolled().size();
        for (std::size_t c = 0; ok && c < row.size(); ++c) {
            const auto& sp = model.speed_steps(model.uncontrolled()[c]);
            ok = std::find(sp.begin(), sp.end(), row[c]) != sp.end();
        }
        if (!ok) errs.push_back("scenario.uncontrolled_script[" + std::to_string(k) + "] is not on the speed grid");
    }
    if (sc.initial_state) {
        if (sc.initial_state->size() != model.size())
            errs.push_back("scenario.initial_state needs one value per vehicle");
        else if (!sc.plant.x0.contains(*sc.initial_state))
            errs.push_back("scenario.initial_state lies outside x0");
    }
    return errs;
}

std::vector<RefinementPoint> RunTrace::refinement_points() const {
    std::vector<RefinementPoint> pts;
    for (const auto& r : steps)
        if (r.info) pts.push_back({r.step, r.corrected, *r.info});
    return pts;
}

namespace {

struct Streams {
    std::mt19937_64 disturbance, input, attack, init;
    explicit Streams(std::uint64_t seed) {
        auto make = [seed](std::uint64_t id) {
            std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                            static_cast<std::uint32_t>(id)};
            return std::mt19937_64(s);
        };
        disturbance = make(1);
        input = make(2);
        attack = make(3);
        init = make(4);
    }
};

Rational grid_pick(std::mt19937_64& rng, const Rational& lo, const Rational& hi, const Rational& res) {
    std::int64_t a = ceil_int(lo / res), b = floor_int(hi / res);
    if (b < a) return lo;
    std::uniform_int_distribution<std::int64_t> d(a, b);
    return res * d(rng);
}

StateVec sample_initial(const ScenarioConfig& sc, Streams& rng) {
    if (sc.initial_state) return *sc.initial_state;
    const auto& boxes = sc.plant.x0.boxes();
    std::uniform_int_distribution<std::size_t> pick(0, boxes.size() - 1);
    const Box& b = boxes[pick(rng.init)];
    StateVec x(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) x[i] = grid_pick(rng.init, b[i].lo, b[i].hi, sc.plant.resolution());
    return x;
}

std::vector<Rational> sample_disturbance(const ScenarioConfig& sc, int k, Streams& rng) {
    const auto& cfg = sc.plant;
    if (static_cast<std::size_t>(k) < sc.disturbance_script.size()) return sc.disturbance_script[k];
    std::vector<Rational> d(cfg.size());
    for (auto& v : d) {
        switch (sc.disturbance) {
            case DisturbancePolicy::Uniform:
                v = grid_pick(rng.disturbance, cfg.delta_min(), cfg.delta_max(), cfg.resolution());
                break;
            case DisturbancePolicy::Corners: {
                std::bernoulli_distribution coin(0.5);
                v = coin(rng.disturbance) ? cfg.delta_max() : cfg.delta_min();
                break;
            }
            case DisturbancePolicy::Zero:
                v = rmin(rmax(Rational(0), cfg.delta_min()), cfg.delta_max());
                break;
        }
    }
    return d;
}

std::vector<std::int64_t> sample_uncontrolled(const Model& model, const ScenarioConfig& sc, int k, Streams& rng) {
    if (static_cast<std::size_t>(k) < sc.uncontrolled_script.size()) return sc.uncontrolled_script[k];
    std::vector<std::int64_t> out;
    for (auto i : model.uncontrolled()) {
        const auto& sp = model.speed_steps(i);
        std::uniform_int_distribution<std::size_t> d(0, sp.size() - 1);
        out.push_back(sp[d(rng.input)]);
    }
    return out;
}

bool all_crossed(const Model& model, const StateVec& x) {
    for (std::size_t i = 0; i < model.size(); ++i)
        if (!(model.config().roads[model.config().vehicles[i].road].exit < x[i])) return false;
    return true;
}

StateVec corrupt(const Model& model, const ScenarioConfig& sc, int k, const StateVec& x, const DetectorState& det,
                 const Action& prev_input, Streams& rng, bool& attacked) {
    StateVec out = x;
    for (const auto& plan : sc.attacks) {
        if (!plan.active(k) || plan.targets.empty()) continue;
        attacked = true;
        const auto& params = sc.plant.detector;
        switch (plan.strategy) {
            case AttackStrategy::Surge: {
                StateVec s = surge_attack(model, x, *det.last_measurement, prev_input, det.C, params,
                                          k == plan.start ? SurgeStep::First : SurgeStep::Continuation, plan.sign,
                                          plan.targets);
                for (auto i : plan.targets) out[i] = s[i];
                break;
            }
            case AttackStrategy::Offset:
                for (std::size_t t = 0; t < plan.targets.size(); ++t) out[plan.targets[t]] = x[plan.targets[t]] + plan.offset[t];
                break;
            case AttackStrategy::RandomStealthy: {
                StateVec s = random_stealthy_attack(model, rng.attack, x, *det.last_measurement, prev_input, det.C,
                                                    params, plan.targets);
                for (auto i : plan.targets) out[i] = s[i];
                break;
            }
            case AttackStrategy::Trace: {
                const auto& row = plan.trace[static_cast<std::size_t>(k - plan.start)];
                for (std::size_t t = 0; t < plan.targets.size(); ++t) out[plan.targets[t]] = x[plan.targets[t]] + row[t];
                break;
            }
        }
    }
    return out;
}

std::string dump(const StepRecord& r) {
    std::ostringstream os;
    os << "step " << r.step << " x=" << to_string(r.x) << " measured=" << to_string(r.measured)
       << " corrected=" << to_string(r.corrected);
    if (r.info) os << " info=" << to_string(*r.info);
    return os.str();
}

}  // namespace

RunTrace run_scenario(const Model& model, const ScenarioConfig& sc, const SupervisorTable& table) {
    const auto& cfg = sc.plant;
    const bool resilient = table.kind == SupervisorKind::Resilient;
    const int horizon = sc.horizon > 0 ? sc.horizon : crossing_bound(model);
    Streams rng(sc.seed);

    RunTrace trace;
    trace.kind = table.kind;
    trace.seed = sc.seed;

    StateVec x = sample_initial(sc, rng);
    StateVec measured = x;
    DetectorState det = observe(model, make_detector(cfg.detector), measured);
    EstimatorState est = make_estimator(cfg, measured);
    std::optional<SynthesisState> node;
    if (resilient) node = initial_state(model, model.quantize(measured));

    bool deadlocked = false;
    bool measured_attacked = false;
    std::optional<std::size_t> last_action;

    for (int k = 0;; ++k) {
        StepRecord rec;
        rec.step = k;
        rec.x = x;
        rec.measured = measured;
        rec.C = det.C;
        rec.corrected = est.corrected;
        if (node) {
            rec.info = node->info;
            rec.refinement = model.quantize_set(est.corrected) == node->info;
        }
        rec.attacked = measured_attacked;

        auto finish = [&](Outcome o) {
            trace.steps.push_back(std::move(rec));
            trace.outcome = o;
            return trace;
        };
        if (all_crossed(model, x)) return finish(deadlocked ? Outcome::Deadlock : Outcome::SafeMarked);
        if (k >= horizon) return finish(deadlocked ? Outcome::Deadlock : Outcome::Horizon);

        std::size_t chosen;
        if (!deadlocked) {
            CellSet key = resilient ? node->info : CellSet({model.quantize(measured)});
            const auto* adm = table.find(key);
            if (!adm)
                throw RuntimeFault("supervisor table has no entry for " + to_string(key) + " at " + dump(rec));
            rec.admissible = *adm;
            if (adm->empty()) {
                deadlocked = true;
                trace.deadlock_seen = true;
                chosen = last_action.value_or(0);
            } else {
                chosen = adm->front();
                bool scripted = static_cast<std::size_t>(k) < sc.input_script.size();
                if (scripted) {
                    std::size_t want = *model.action_index(sc.input_script[k]);
                    if (std::find(adm->begin(), adm->end(), want) != adm->end())
                        chosen = want;
                    else
                        rec.script_overridden = true;
                }
                if (!scripted && sc.input_policy == InputPolicy::Random) {
                    std::uniform_int_distribution<std::size_t> d(0, adm->size() - 1);
                    chosen = (*adm)[d(rng.input)];
                }
            }
        } else {
            chosen = *last_action;
        }
        rec.chosen = chosen;
        last_action = chosen;
        const Action& action = model.actions()[chosen];
        InputVec u = model.input(action, sample_uncontrolled(model, sc, k, rng));
        rec.input = u;
        rec.disturbance = sample_disturbance(sc, k, rng);
        StateVec x_next = model.step_dynamics(x, u, rec.disturbance);

        bool hit = model.segment_hits_bad_set(x, x_next);
        trace.steps.push_back(rec);
        x = x_next;
        if (hit) {
            StepRecord last;
            last.step = k + 1;
            last.x = x;
            last.measured = x;
            last.C = det.C;
            last.corrected = est.corrected;
            trace.steps.push_back(std::move(last));
            trace.outcome = Outcome::Collision;
            return trace;
        }

        measured_attacked = false;
        measured = corrupt(model, sc, k + 1, x, det, action, rng, measured_attacked);
        if (deadlocked) continue;
        std::vector<Rational> prev_C = det.C;
        det = observe(model, record_input(std::move(det), action), measured);
        // the baseline loop has no detector or estimator, C is only logged
        if (!resilient) continue;
        if (decide(det) == Decision::H1) {
            StepRecord last;
            last.step = k + 1;
            last.x = x;
            last.measured = measured;
            last.C = det.C;
            last.corrected = est.corrected;
            last.attacked = measured_attacked;
            trace.steps.push_back(std::move(last));
            trace.outcome = Outcome::Detected;
            return trace;
        }
        auto stepped = estimator_step(model, est, measured, action, cfg.detector, prev_C);
        if (std::holds_alternative<Detected>(stepped))
            throw InternalFault("estimator flagged a measurement the detector accepted at step " + std::to_string(k + 1));
        est = std::get<EstimatorState>(std::move(stepped));
        if (node) {
            ObserverStep st = observer_step(model, *node, action, model.quantize(measured), table.t_max, cfg.detector);
            if (st.kind == ObserverStep::Kind::Detected)
                throw InternalFault("observer flagged a measurement the detector accepted at step " + std::to_string(k + 1));
            if (st.kind == ObserverStep::Kind::Infeasible)
                throw RuntimeFault("observer has no successor for measured cell " + to_string(model.quantize(measured)) +
                                   " after " + dump(trace.steps.back()));
            node = std::move(st.next);
        }
    }
}

}  // namespace rsc

namespace rsc {

RunTrace run_scenario(const ScenarioConfig& sc, SupervisorKind kind) {
    Model model(sc.plant);
    SupervisorTable table = kind == SupervisorKind::Baseline
                                ? baseline_supervisor(model)
                                : synthesize(model, build_observer(model, {sc.plant.t_max}));
    if (!table.success) throw ContractViolation("supervisor synthesis failed for this configuration");
    return run_scenario(model, sc, table);
}

std::vector<AttackPlan> random_attack_schedule(std::mt19937_64& rng, std::size_t n, int t_max, int horizon,
                                               const std::vector<AttackStrategy>& strategies,
                                               const Rational& cell_width) {
    std::vector<AttackPlan> plans;
    if (t_max <= 0 || strategies.empty() || n == 0) return plans;
    auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    const Rational res = cell_width / 4;
    int k = uni(1, 3);
    while (k < horizon) {
        AttackPlan p;
        p.start = k;
        p.end = k + uni(1, t_max);
        for (std::size_t i = 0; i < n; ++i)
            if (uni(0, 1)) p.targets.push_back(i);
        if (p.targets.empty()) p.targets.push_back(static_cast<std::size_t>(uni(0, static_cast<int>(n) - 1)));
        p.strategy = strategies[static_cast<std::size_t>(uni(0, static_cast<int>(strategies.size()) - 1))];
        p.sign = uni(0, 1) ? 1 : -1;
        if (p.strategy == AttackStrategy::Offset)
            for (std::size_t t = 0; t < p.targets.size(); ++t) p.offset.push_back(res * uni(-8, 8));
        if (p.strategy == AttackStrategy::Trace) {
            for (int s = p.start; s < p.end; ++s) {
                std::vector<Rational> row;
                for (std::size_t t = 0; t < p.targets.size(); ++t) row.push_back(res * uni(-8, 8));
                p.trace.push_back(std::move(row));
            }
        }
        k = p.end + t_max + uni(0, 3);
        plans.push_back(std::move(p));
    }
    return plans;
}

void write_trace_csv(std::ostream& os, const Model& model, const RunTrace& trace) {
    const std::size_t n = model.size();
    os << "step";
    for (const char* col : {"x", "meas", "err", "C", "speed", "delta"})
        for (std::size_t i = 0; i < n; ++i) os << "," << col << "_" << i;
    os << ",admissible_count,chosen,attacked,info,refinement,outcome\n";
    for (const auto& r : trace.steps) {
        os << r.step;
        for (std::size_t i = 0; i < n; ++i) os << "," << to_string(r.x[i]);
        for (std::size_t i = 0; i < n; ++i) os << "," << to_string(r.measured[i]);
        for (std::size_t i = 0; i < n; ++i) os << "," << to_string(r.measured[i] - r.x[i]);
        for (std::size_t i = 0; i < n; ++i) os << "," << (i < r.C.size() ? to_string(r.C[i]) : "");
        for (std::size_t i = 0; i < n; ++i) os << "," << (r.input ? to_string((*r.input)[i] / model.config().tau) : "");
        for (std::size_t i = 0; i < n; ++i) os << "," << (i < r.disturbance.size() ? to_string(r.disturbance[i]) : "");
        os << "," << r.admissible.size() << ","
           << (r.chosen ? model.action_label(model.actions()[*r.chosen]) : "") << "," << (r.attacked ? 1 : 0) << ","
           << (r.info ? "\"" + to_string(*r.info) + "\"" : "") << ","
           << (r.refinement ? (*r.refinement ? "1" : "0") : "") << "," << to_string(trace.outcome) << "\n";
    }
}

unsigned worker_count() {
    if (const char* env = std::getenv("RSC_WORKERS")) {
        try {
            int v = std::stoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

struct SweepCell {
    IntersectionConfig cfg;
    std::optional<Model> model;
    std::optional<SupervisorTable> table;
};

}  // namespace

std::vector<SweepRow> sweep(const ScenarioConfig& base, const SweepOptions& opt) {
    std::vector<std::optional<Rational>> etas;
    if (opt.eta_values.empty()) etas.push_back(std::nullopt);
    for (const auto& e : opt.eta_values) etas.push_back(e);

    std::vector<SweepRow> rows;
    std::vector<SweepCell> cells;
    for (int t : opt.t_values) {
        for (const auto& e : etas) {
            SweepRow r;
            r.t_max = t;
            r.eta = e;
            rows.push_back(r);
            SweepCell c;
            c.cfg = base.plant;
            c.cfg.t_max = t;
            if (e)
                for (auto& th : c.cfg.detector.threshold) th = *e;
            cells.push_back(std::move(c));
        }
    }
    const unsigned workers = opt.workers ? opt.workers : worker_count();
    parallel_for(cells.size(), workers, [&](std::size_t idx) {
        SweepCell& c = cells[idx];
        SweepRow& r = rows[idx];
        try {
            c.model.emplace(c.cfg);
            ObserverAutomaton obs = build_observer(*c.model, {c.cfg.t_max, opt.max_states});
            c.table = synthesize(*c.model, obs);
            r.observer_states = obs.states.size();
            r.info_states = c.table->admissible.size();
            r.synthesis_ok = c.table->success;
            if (!r.synthesis_ok) r.error = "initial state pruned";
            for (const auto& k : c.table->initial)
                if (const auto* a = c.table->find(k)) r.initial_admissible = std::max(r.initial_admissible, a->size());
            for (auto id : supervised_reachable(obs, *c.table)) {
                if (obs.marked(id)) continue;
                if (std::find(obs.initial.begin(), obs.initial.end(), id) != obs.initial.end()) continue;
                if (!conflict_possible(*c.model, obs.states[id].info)) continue;
                if (const auto* a = c.table->find(obs.states[id].info))
                    r.max_live_admissible = std::max(r.max_live_admissible, a->size());
            }
        } catch (const ResourceError& e) {
            r.synthesis_ok = false;
            r.error = e.what();
        }
    });

    std::map<CellSet, std::size_t> shared_count;
    std::size_t ok_tables = 0;
    for (const auto& c : cells) {
        if (!c.table || !c.table->success) continue;
        ++ok_tables;
        for (const auto& [k, v] : c.table->admissible) ++shared_count[k];
    }
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        if (!cells[idx].table || !cells[idx].table->success) continue;
        for (const auto& [k, v] : cells[idx].table->admissible)
            if (shared_count[k] == ok_tables) rows[idx].permissiveness_shared += v.size();
    }

    if (opt.runs > 0) {
        const std::size_t runs = static_cast<std::size_t>(opt.runs);
        std::vector<Outcome> outcomes(cells.size() * runs, Outcome::Horizon);
        std::vector<char> done(cells.size() * runs, 0);
        const std::vector<AttackStrategy> all{AttackStrategy::Surge, AttackStrategy::Offset,
                                              AttackStrategy::RandomStealthy, AttackStrategy::Trace};
        parallel_for(cells.size() * runs, workers, [&](std::size_t job) {
            const SweepCell& c = cells[job / runs];
            if (!c.table || !c.table->success) return;
            ScenarioConfig sc = base;
            sc.plant = c.cfg;
            sc.seed = opt.seed + job % runs;
            sc.input_script.clear();
            sc.input_policy = InputPolicy::Random;
            std::mt19937_64 rng(sc.seed * 7919 + 17);
            sc.attacks = random_attack_schedule(rng, c.cfg.size(), c.cfg.t_max, crossing_bound(*c.model), all,
                                                c.cfg.cell_width());
            outcomes[job] = run_scenario(*c.model, sc, *c.table).outcome;
            done[job] = 1;
        });
        for (std::size_t job = 0; job < outcomes.size(); ++job)
            if (done[job]) ++rows[job / runs].counts[static_cast<int>(outcomes[job])];
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "t_max,eta,synthesis_ok,observer_states,info_states,initial_admissible,permissiveness_shared,"
          "max_live_admissible,safe_marked,collision,deadlock,detected,horizon,error\n";
    for (const auto& r : rows) {
        os << r.t_max << "," << (r.eta ? to_string(*r.eta) : "config") << "," << (r.synthesis_ok ? 1 : 0) << ","
           << r.observer_states << "," << r.info_states << "," << r.initial_admissible << ","
           << r.permissiveness_shared << "," << r.max_live_admissible;
        for (auto c : r.counts) os << "," << c;
        os << "," << r.error << "\n";
    }
}

bool trace_pairwise_safe(const Model& model, const RunTrace& trace) {
    const std::size_t n = model.size();
    for (std::size_t s = 0; s + 1 < trace.steps.size(); ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                IntersectionConfig pc;
                const auto& cfg = model.config();
                pc.roads = cfg.roads;
                pc.vehicles = {cfg.vehicles[i], cfg.vehicles[j]};
                pc.gap = cfg.gap;
                pc.tau = cfg.tau;
                pc.mu = cfg.mu;
                pc.d_min = cfg.d_min;
                pc.d_max = cfg.d_max;
                Model pm(pc);
                StateVec a{trace.steps[s].x[i], trace.steps[s].x[j]};
                StateVec b{trace.steps[s + 1].x[i], trace.steps[s + 1].x[j]};
                if (pm.segment_hits_bad_set(a, b)) return false;
            }
        }
    }
    return true;
}

namespace {

ScenarioConfig project_pair(const ScenarioConfig& sc, std::size_t i, std::size_t j) {
    const auto& cfg = sc.plant;
    ScenarioConfig out;
    IntersectionConfig& pc = out.plant;
    pc.roads = cfg.roads;
    pc.vehicles = {cfg.vehicles[i], cfg.vehicles[j]};
    pc.gap = cfg.gap;
    pc.tau = cfg.tau;
    pc.mu = cfg.mu;
    pc.d_min = cfg.d_min;
    pc.d_max = cfg.d_max;
    pc.t_max = cfg.t_max;
    pc.scale = cfg.scale;
    pc.detector.bias = {cfg.detector.bias[i], cfg.detector.bias[j]};
    pc.detector.threshold = {cfg.detector.threshold[i], cfg.detector.threshold[j]};
    std::vector<Box> boxes;
    for (const auto& b : cfg.x0.boxes()) boxes.push_back(Box({b[i], b[j]}));
    pc.x0 = BoxUnion(2, std::move(boxes));
    if (sc.initial_state) out.initial_state = StateVec{(*sc.initial_state)[i], (*sc.initial_state)[j]};
    out.disturbance = sc.disturbance;
    out.input_policy = sc.input_policy == InputPolicy::Scripted ? InputPolicy::First : sc.input_policy;
    for (const auto& plan : sc.attacks) {
        AttackPlan p = plan;
        p.targets.clear();
        p.offset.clear();
        p.trace.assign(plan.trace.size(), {});
        for (std::size_t t = 0; t < plan.targets.size(); ++t) {
            std::size_t v = plan.targets[t];
            if (v != i && v != j) continue;
            p.targets.push_back(v == i ? 0 : 1);
            if (t < plan.offset.size()) p.offset.push_back(plan.offset[t]);
            for (std::size_t s = 0; s < plan.trace.size(); ++s) p.trace[s].push_back(plan.trace[s][t]);
        }
        if (!p.targets.empty()) out.attacks.push_back(std::move(p));
    }
    return out;
}

}  // namespace

PairwiseReport pairwise_check(const ScenarioConfig& sc, SupervisorKind kind, int runs) {
    PairwiseReport rep;
    const std::size_t n = sc.plant.size();
    if (n < 2) throw ContractViolation("pairwise check needs at least two vehicles");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            ScenarioConfig pair = project_pair(sc, i, j);
            std::string tag = "pair (" + std::to_string(i) + "," + std::to_string(j) + ")";
            Model pm(pair.plant);
            SupervisorTable table = kind == SupervisorKind::Baseline
                                        ? baseline_supervisor(pm)
                                        : synthesize(pm, build_observer(pm, {pair.plant.t_max}));
            if (!table.success) {
                rep.safe = false;
                rep.lines.push_back(tag + ": synthesis failed");
                continue;
            }
            std::size_t counts[5] = {0, 0, 0, 0, 0};
            for (int r = 0; r < runs; ++r) {
                pair.seed = sc.seed + static_cast<std::uint64_t>(r);
                RunTrace t = run_scenario(pm, pair, table);
                ++counts[static_cast<int>(t.outcome)];
                if (t.outcome == Outcome::Collision || t.outcome == Outcome::Deadlock) rep.safe = false;
            }
            std::string line = tag + ":";
            for (int o = 0; o < 5; ++o)
                line += " " + to_string(static_cast<Outcome>(o)) + "=" + std::to_string(counts[o]);
            rep.lines.push_back(line);
        }
    }
    return rep;
}

}  // namespace rsc
