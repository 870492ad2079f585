#include "rsc/des.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace rsc {

namespace {

std::vector<std::vector<Cell>> image_axes(const Model& model, const CellVec& anchor, int m) {
    auto adv = advance_sets(model, m, true);
    std::vector<std::vector<Cell>> axes(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        std::set<Cell> cells;
        if (anchor[i] == kMarkedCell) {
            cells.insert(kMarkedCell);
        } else {
            for (auto o : adv[i])
                for (Cell c : model.settle(i, anchor[i] + o)) cells.insert(c);
        }
        axes[i].assign(cells.begin(), cells.end());
    }
    return axes;
}

std::optional<CellVec> shift(const Model& model, const std::optional<CellVec>& a, const Action& action) {
    if (!a) return a;
    CellVec out = *a;
    for (std::size_t k = 0; k < model.controlled().size(); ++k) {
        std::size_t i = model.controlled()[k];
        if (out[i] != kMarkedCell) out[i] += action.steps[k];
    }
    return out;
}

}  // namespace

std::string to_string(const SynthesisState& s) {
    std::string h = "[";
    for (std::size_t j = 0; j < s.history.size(); ++j) {
        if (j) h += ",";
        h += s.history[j] ? to_string(*s.history[j]) : std::string("-");
    }
    return "info=" + to_string(s.info) + " history=" + h + "] age=" + std::to_string(s.age);
}

std::vector<Rational> build_w_set(const Model& model) { return model.w_set(); }

std::vector<std::vector<std::int64_t>> advance_sets(const Model& model, int m, bool controlled_shifted) {
    std::vector<std::vector<std::int64_t>> out(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        std::set<std::int64_t> one;
        bool ctrl = model.config().vehicles[i].controlled;
        for (auto k : model.speed_steps(i)) {
            std::int64_t base = (ctrl && controlled_shifted) ? 0 : k;
            for (auto w = model.w_lo(); w <= model.w_hi(); ++w) one.insert(base + w);
        }
        std::set<std::int64_t> acc{0};
        for (int step = 0; step < m; ++step) {
            std::set<std::int64_t> nxt;
            for (auto a : acc)
                for (auto b : one) nxt.insert(a + b);
            acc = std::move(nxt);
        }
        out[i].assign(acc.begin(), acc.end());
    }
    return out;
}

CellSet stealthy_cells(const Model& model, const CellVec& last, const DetectorParams& params) {
    const Rational g = model.config().cell_width();
    auto adv = advance_sets(model, 1, true);
    std::vector<std::vector<Cell>> axes(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (last[i] == kMarkedCell) {
            axes[i] = {kMarkedCell};
            continue;
        }
        Rational slack = params.threshold[i] + params.bias[i];
        Rational lo = (Rational(last[i] + adv[i].front()) - Rational(1, 2)) * g - slack;  // open
        Rational hi = (Rational(last[i] + adv[i].back()) + Rational(1, 2)) * g + slack;    // closed
        Cell c0 = floor_int(lo / g - Rational(1, 2)) + 1;
        Cell c1 = ceil_int(hi / g - Rational(1, 2));
        std::set<Cell> cells;
        for (Cell c = c0; c <= c1; ++c)
            for (Cell s : model.settle(i, c)) cells.insert(s);
        axes[i].assign(cells.begin(), cells.end());
    }
    return CellSet::product(axes);
}

Decision lambda_d_outcome(const CellSet& stealthy, const CellVec& measured) {
    return stealthy.contains(measured) ? Decision::H0 : Decision::H1;
}

CellSet lambda_c_image(const Model& model, const CellVec& prev, std::span<const Action> seq, const CellVec& cur) {
    std::optional<CellVec> anchor = prev;
    for (const auto& a : seq) anchor = shift(model, anchor, a);
    CellSet img({cur});
    if (seq.empty()) return img;
    return img.unite(CellSet::product(image_axes(model, *anchor, static_cast<int>(seq.size()))));
}

SynthesisState initial_state(const Model& model, const CellVec& first_measured) {
    SynthesisState s;
    s.info = model.quantize_set(model.config().x0);
    s.history = {first_measured};
    return s;
}

ObserverStep observer_step(const Model& model, const SynthesisState& s, const Action& action,
                           const CellVec& measured, int t_max, const DetectorParams& params) {
    ObserverStep r;
    if (s.info.is_marked() || s.history.empty() || !s.history.back()) {
        r.kind = ObserverStep::Kind::Infeasible;
        return r;
    }
    CellSet pred = model.cell_post(s.info, action);

    std::vector<std::optional<CellVec>> hist;
    for (const auto& a : s.history) hist.push_back(shift(model, a, action));
    if (lambda_d_outcome(stealthy_cells(model, *hist.back(), params), measured) == Decision::H1) {
        r.kind = ObserverStep::Kind::Detected;
        return r;
    }
    hist.push_back(measured);
    const int k_next = s.age + 1;

    CellSet info;
    if (t_max == 0) {
        r.image = CellSet({measured});
    } else if (k_next >= t_max) {
        const auto& old = hist[hist.size() - 1 - static_cast<std::size_t>(t_max)];
        if (old) {
            auto axes = image_axes(model, *old, t_max);
            r.image = CellSet::product(axes).unite(CellSet({measured}));
        } else if (!pred.is_marked()) {
            throw InternalFault("dropped history entry needed before all vehicles are marked");
        }
    }
    info = r.image ? pred.intersect(*r.image) : pred;
    if (info.empty()) {
        r.kind = ObserverStep::Kind::Infeasible;
        return r;
    }

    const std::size_t keep = static_cast<std::size_t>(std::max(t_max, 1));
    if (hist.size() > keep) hist.erase(hist.begin(), hist.end() - static_cast<std::ptrdiff_t>(keep));
    const std::int64_t horizon = model.steps_to_marked(info);
    const std::size_t L = hist.size();
    for (std::size_t j = 0; j + 1 < L; ++j) {
        std::int64_t uses_in = t_max - static_cast<std::int64_t>(L - 1 - j);
        if (uses_in >= horizon) hist[j].reset();
    }
    r.next.info = std::move(info);
    r.next.history = std::move(hist);
    r.next.age = std::min(k_next, t_max);
    return r;
}

ObserverAutomaton build_observer(const Model& model, const ObserverOptions& opt) {
    ObserverAutomaton obs;
    obs.t_max = opt.t_max;
    const auto& params = model.config().detector;
    auto intern = [&](SynthesisState s) {
        auto [it, fresh] = obs.index.emplace(s, obs.states.size());
        if (fresh) {
            if (obs.states.size() >= opt.max_states)
                throw ResourceError("observer exceeds the state budget of " + std::to_string(opt.max_states) +
                                    " states");
            obs.states.push_back(std::move(s));
            obs.edges.emplace_back();
        }
        return it->second;
    };
    for (const auto& q0 : model.quantize_set(model.config().x0)) {
        std::size_t id = intern(initial_state(model, q0));
        if (std::find(obs.initial.begin(), obs.initial.end(), id) == obs.initial.end()) obs.initial.push_back(id);
    }
    for (std::size_t cur = 0; cur < obs.states.size(); ++cur) {
        if (obs.marked(cur)) continue;
        const SynthesisState src = obs.states[cur];
        for (std::size_t a = 0; a < model.actions().size(); ++a) {
            const Action& action = model.actions()[a];
            auto newest = *src.history.back();
            for (std::size_t c = 0; c < model.controlled().size(); ++c) {
                std::size_t i = model.controlled()[c];
                if (newest[i] != kMarkedCell) newest[i] += action.steps[c];
            }
            for (const auto& y : stealthy_cells(model, newest, params)) {
                ObserverStep st = observer_step(model, src, action, y, opt.t_max, params);
                if (st.kind != ObserverStep::Kind::Ok) continue;
                std::size_t tgt = intern(std::move(st.next));
                obs.edges[cur].push_back({a, y, tgt});
            }
        }
    }
    return obs;
}

void write_observer(std::ostream& os, const Model& model, const ObserverAutomaton& obs) {
    std::size_t n_edges = 0;
    for (const auto& e : obs.edges) n_edges += e.size();
    os << "observer t_max=" << obs.t_max << " states=" << obs.states.size() << " transitions=" << n_edges << "\n";
    for (std::size_t a = 0; a < model.actions().size(); ++a)
        os << "action " << a << " " << model.action_label(model.actions()[a]) << "\n";
    for (std::size_t id = 0; id < obs.states.size(); ++id) {
        os << "state " << id << " " << to_string(obs.states[id]);
        if (std::find(obs.initial.begin(), obs.initial.end(), id) != obs.initial.end()) os << " initial";
        if (obs.marked(id)) os << " marked";
        os << "\n";
    }
    const auto& params = model.config().detector;
    for (std::size_t id = 0; id < obs.states.size(); ++id) {
        for (const auto& e : obs.edges[id]) {
            ObserverStep st = observer_step(model, obs.states[id], model.actions()[e.action], e.measured,
                                            obs.t_max, params);
            os << "edge " << id << " u=" << model.action_label(model.actions()[e.action])
               << " y=" << to_string(e.measured) << " image=" << (st.image ? to_string(*st.image) : "*")
               << " -> " << e.target << "\n";
        }
    }
}

std::optional<int> first_refinement_breach(const Model& model, std::span<const RefinementPoint> points) {
    for (const auto& p : points)
        if (!(model.quantize_set(p.corrected) == p.info)) return p.step;
    return std::nullopt;
}

bool check_refinement(const Model& model, std::span<const RefinementPoint> points) {
    return !first_refinement_breach(model, points).has_value();
}

}  // namespace rsc
