#include "rsc/supervisor.hpp"

#include "rsc/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rsc {

std::string to_string(SupervisorKind k) { return k == SupervisorKind::Baseline ? "baseline" : "resilient"; }

SupervisorKind parse_supervisor_kind(const std::string& s) {
    if (s == "baseline") return SupervisorKind::Baseline;
    if (s == "resilient") return SupervisorKind::Resilient;
    throw std::invalid_argument("unknown supervisor kind '" + s + "' (expected baseline or resilient)");
}

const std::vector<std::size_t>* SupervisorTable::find(const CellSet& key) const {
    auto it = admissible.find(key);
    return it == admissible.end() ? nullptr : &it->second;
}

std::size_t SupervisorTable::permissiveness() const {
    std::size_t total = 0;
    for (const auto& [k, v] : admissible) total += v.size();
    return total;
}

bool SafetyCache::safe(const CellVec& q, std::size_t action) {
    auto key = std::make_pair(q, action);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool ok = model_.cell_action_safe(q, model_.actions()[action]);
    memo_.emplace(std::move(key), ok);
    return ok;
}

bool safe_des(const Model& model, const CellSet& iota, const Action& a) {
    return std::all_of(iota.begin(), iota.end(), [&](const CellVec& q) { return model.cell_action_safe(q, a); });
}

bool safe_des(const Model& model, const CellSet& iota, const Action& a, const CellSet& iota_next) {
    for (const auto& q : iota) {
        if (all_marked(q)) continue;
        for (const auto& uc : model.uncontrolled_choices()) {
            InputVec u = model.input(a, uc);
            for (const auto& qn : model.cell_successors(q, a, uc))
                if (iota_next.contains(qn) && !model.cell_transition_safe(q, u, qn)) return false;
        }
    }
    return true;
}

std::vector<std::vector<std::size_t>> solve_game(const KeyedGame& game) {
    const std::size_t n = game.keys.size();
    std::vector<std::vector<std::size_t>> S(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t a = 0; a < game.safe[k].size(); ++a)
            if (game.safe[k][a]) S[k].push_back(a);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 0; k < n; ++k) {
            auto keep_end = std::remove_if(S[k].begin(), S[k].end(), [&](std::size_t a) {
                const auto& succ = game.successors[k][a];
                return std::any_of(succ.begin(), succ.end(), [&](std::size_t t) { return S[t].empty(); });
            });
            if (keep_end != S[k].end()) {
                S[k].erase(keep_end, S[k].end());
                changed = true;
            }
        }
        // co-reachability of the marked state under the remaining choices
        std::vector<char> coreach(n, 0);
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t k = 0; k < n; ++k) {
                if (coreach[k]) continue;
                for (auto a : S[k]) {
                    const auto& succ = game.successors[k][a];
                    if (succ.empty() ||
                        std::any_of(succ.begin(), succ.end(), [&](std::size_t t) { return coreach[t] != 0; })) {
                        coreach[k] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!coreach[k] && !S[k].empty()) {
                S[k].clear();
                changed = true;
            }
        }
    }
    return S;
}

namespace {

SupervisorTable finish(const Model& model, SupervisorKind kind, const KeyedGame& game,
                       std::vector<CellSet> initial) {
    auto S = solve_game(game);
    SupervisorTable t;
    t.kind = kind;
    t.t_max = model.config().t_max;
    t.fingerprint = config_fingerprint(model.config());
    t.actions = model.actions();
    for (std::size_t k = 0; k < game.keys.size(); ++k) t.admissible.emplace(game.keys[k], S[k]);
    t.initial = std::move(initial);
    t.success = !t.initial.empty();
    for (const auto& key : t.initial) {
        if (key.is_marked()) continue;
        const auto* adm = t.find(key);
        if (!adm || adm->empty()) t.success = false;
    }
    return t;
}

}  // namespace

SupervisorTable synthesize(const Model& model, const ObserverAutomaton& obs) {
    std::map<CellSet, std::size_t> key_of;
    for (std::size_t id = 0; id < obs.states.size(); ++id)
        if (!obs.marked(id)) key_of.emplace(obs.states[id].info, 0);
    KeyedGame game;
    for (auto& [k, idx] : key_of) {
        idx = game.keys.size();
        game.keys.push_back(k);
    }
    const std::size_t A = model.actions().size();
    std::vector<std::vector<std::set<std::size_t>>> succ(game.keys.size(), std::vector<std::set<std::size_t>>(A));
    for (std::size_t id = 0; id < obs.states.size(); ++id) {
        if (obs.marked(id)) continue;
        std::size_t k = key_of.at(obs.states[id].info);
        for (const auto& e : obs.edges[id])
            if (!obs.marked(e.target)) succ[k][e.action].insert(key_of.at(obs.states[e.target].info));
    }
    SafetyCache cache(model);
    game.successors.resize(game.keys.size());
    game.safe.resize(game.keys.size());
    for (std::size_t k = 0; k < game.keys.size(); ++k) {
        for (std::size_t a = 0; a < A; ++a) {
            game.successors[k].emplace_back(succ[k][a].begin(), succ[k][a].end());
            bool ok = std::all_of(game.keys[k].begin(), game.keys[k].end(),
                                  [&](const CellVec& q) { return cache.safe(q, a); });
            game.safe[k].push_back(ok ? 1 : 0);
        }
    }
    std::vector<CellSet> initial;
    for (auto id : obs.initial)
        if (std::find(initial.begin(), initial.end(), obs.states[id].info) == initial.end())
            initial.push_back(obs.states[id].info);
    SupervisorTable t = finish(model, SupervisorKind::Resilient, game, std::move(initial));
    t.t_max = obs.t_max;
    return t;
}

SupervisorTable baseline_supervisor(const Model& model, std::size_t max_states) {
    const auto& cfg = model.config();
    const Rational g = cfg.cell_width();
    Rational slack = 0;
    for (std::size_t i = 0; i < cfg.detector.bias.size(); ++i)
        slack = rmax(slack, cfg.detector.bias[i] + cfg.detector.threshold[i]);
    const std::int64_t pad = ceil_int(slack / g) + 1;

    CellSet init_cells = model.quantize_set(cfg.x0);
    std::vector<std::vector<Cell>> axes(model.size());
    std::size_t total = 1;
    for (std::size_t i = 0; i < model.size(); ++i) {
        Cell lo = model.marked_from(i);
        for (const auto& q : init_cells)
            if (q[i] != kMarkedCell) lo = std::min(lo, q[i]);
        for (Cell c = lo - pad; c < model.marked_from(i); ++c) axes[i].push_back(c);
        axes[i].push_back(kMarkedCell);
        total *= axes[i].size();
        if (total > max_states)
            throw ResourceError("baseline grid exceeds the state budget of " + std::to_string(max_states) + " cells");
    }
    KeyedGame game;
    std::map<CellVec, std::size_t> key_of;
    for (const auto& q : CellSet::product(axes)) {
        if (all_marked(q)) continue;
        key_of.emplace(q, game.keys.size());
        game.keys.push_back(CellSet({q}));
    }
    const std::size_t A = model.actions().size();
    SafetyCache cache(model);
    game.successors.resize(game.keys.size());
    game.safe.resize(game.keys.size());
    for (std::size_t k = 0; k < game.keys.size(); ++k) {
        const CellVec& q = game.keys[k].cells().front();
        for (std::size_t a = 0; a < A; ++a) {
            std::set<std::size_t> succ;
            for (const auto& uc : model.uncontrolled_choices())
                for (const auto& qn : model.cell_successors(q, model.actions()[a], uc)) {
                    if (all_marked(qn)) continue;
                    auto it = key_of.find(qn);
                    if (it == key_of.end()) throw InternalFault("baseline successor outside the grid: " + to_string(qn));
                    succ.insert(it->second);
                }
            game.successors[k].emplace_back(succ.begin(), succ.end());
            game.safe[k].push_back(cache.safe(q, a) ? 1 : 0);
        }
    }
    std::vector<CellSet> initial;
    for (const auto& q : init_cells) initial.push_back(CellSet({q}));
    SupervisorTable t = finish(model, SupervisorKind::Baseline, game, std::move(initial));
    t.t_max = 0;
    return t;
}

std::vector<std::vector<Rational>> sigma(const Model& model, const SupervisorTable& table, const CellSet& key) {
    const auto* adm = table.find(key);
    if (!adm) throw RuntimeFault("information state " + to_string(key) + " is not in the supervisor table");
    std::vector<std::vector<Rational>> out;
    for (auto a : *adm) out.push_back(model.speeds(table.actions[a]));
    return out;
}

void write_table(std::ostream& os, const Model& model, const SupervisorTable& t) {
    os << "rsc-table v1\n";
    os << "kind " << to_string(t.kind) << "\n";
    os << "t_max " << t.t_max << "\n";
    os << "fingerprint " << t.fingerprint << "\n";
    os << "status " << (t.success ? "ok" : "failed") << "\n";
    os << "actions";
    for (const auto& a : t.actions) os << " " << model.action_label(a);
    os << "\n";
    for (const auto& k : t.initial) os << "initial " << to_string(k) << "\n";
    for (const auto& [key, adm] : t.admissible) {
        os << "state " << to_string(key) << " :";
        if (adm.empty()) os << " -";
        for (auto a : adm) os << " " << model.action_label(t.actions[a]);
        os << "\n";
    }
}

SupervisorTable read_table(std::istream& is, const Model& model) {
    SupervisorTable t;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("table line " + std::to_string(lineno) + ": " + why);
    };
    std::map<std::string, std::size_t> by_label;
    for (std::size_t a = 0; a < model.actions().size(); ++a) by_label[model.action_label(model.actions()[a])] = a;
    bool header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (!header) {
            if (line != "rsc-table v1") fail("not a supervisor table");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        std::string rest;
        std::getline(ls, rest);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        if (tag == "kind") {
            t.kind = parse_supervisor_kind(rest);
        } else if (tag == "t_max") {
            t.t_max = std::stoi(rest);
        } else if (tag == "fingerprint") {
            t.fingerprint = rest;
        } else if (tag == "status") {
            t.success = rest == "ok";
        } else if (tag == "actions") {
            std::istringstream as(rest);
            std::string lab;
            while (as >> lab) {
                auto it = by_label.find(lab);
                if (it == by_label.end()) fail("unknown action " + lab);
                t.actions.push_back(model.actions()[it->second]);
            }
            if (t.actions != model.actions()) fail("action list differs from the configuration");
        } else if (tag == "initial") {
            t.initial.push_back(parse_cell_set(rest));
        } else if (tag == "state") {
            auto colon = rest.rfind(" :");
            if (colon == std::string::npos) fail("missing ':'");
            CellSet key = parse_cell_set(rest.substr(0, colon));
            std::istringstream as(rest.substr(colon + 2));
            std::vector<std::size_t> adm;
            std::string lab;
            while (as >> lab) {
                if (lab == "-") continue;
                auto it = by_label.find(lab);
                if (it == by_label.end()) fail("unknown action " + lab);
                adm.push_back(it->second);
            }
            t.admissible[key] = adm;
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    if (!header) throw std::invalid_argument("empty supervisor table");
    if (t.fingerprint != config_fingerprint(model.config()))
        throw std::invalid_argument("supervisor table was synthesized for a different configuration");
    return t;
}

}  // namespace rsc

namespace rsc {

bool conflict_possible(const Model& model, const CellSet& key) {
    for (const auto& q : key)
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = i + 1; j < q.size(); ++j)
                if (q[i] != kMarkedCell && q[j] != kMarkedCell &&
                    (model.config().vehicles[i].road != model.config().vehicles[j].road ||
                     model.config().gap > 0))
                    return true;
    return false;
}

std::vector<std::size_t> supervised_reachable(const ObserverAutomaton& obs, const SupervisorTable& table) {
    std::vector<char> seen(obs.states.size(), 0);
    std::vector<std::size_t> stack(obs.initial.begin(), obs.initial.end()), out;
    for (auto id : stack) seen[id] = 1;
    while (!stack.empty()) {
        std::size_t id = stack.back();
        stack.pop_back();
        out.push_back(id);
        if (obs.marked(id)) continue;
        const auto* adm = table.find(obs.states[id].info);
        if (!adm) continue;
        for (const auto& e : obs.edges[id]) {
            if (std::find(adm->begin(), adm->end(), e.action) == adm->end()) continue;
            if (!seen[e.target]) {
                seen[e.target] = 1;
                stack.push_back(e.target);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace rsc
