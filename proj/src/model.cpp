#include "rsc/model.hpp"

#include <algorithm>
#include <set>

namespace rsc {

namespace {

template <class T>
std::vector<std::vector<T>> cartesian(const std::vector<std::vector<T>>& axes) {
    std::vector<std::vector<T>> out;
    for (const auto& a : axes)
        if (a.empty()) return out;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        std::vector<T> v(axes.size());
        for (std::size_t i = 0; i < axes.size(); ++i) v[i] = axes[i][idx[i]];
        out.push_back(std::move(v));
        // last axis varies fastest so the first vehicle is the most significant digit
        std::size_t d = axes.size();
        while (d > 0) {
            --d;
            if (++idx[d] < axes[d].size()) break;
            idx[d] = 0;
            if (d == 0) return out;
        }
        if (axes.empty()) return out;
    }
}

// Set of times t in [0, 1] described by interval end points with open/closed flags.
struct TimeSet {
    Rational lo{0}, hi{1};
    bool lo_open = false, hi_open = false;
    bool none = false;

    bool empty() const { return none || hi < lo || (lo == hi && (lo_open || hi_open)); }

    // p + q*t <= r, or < r when strict
    void at_most(const Rational& p, const Rational& q, const Rational& r, bool strict) {
        if (q == 0) {
            if (strict ? !(p < r) : r < p) none = true;
            return;
        }
        Rational b = (r - p) / q;
        if (q > 0) {
            if (b < hi) { hi = b; hi_open = strict; }
            else if (b == hi) hi_open = hi_open || strict;
        } else {
            if (lo < b) { lo = b; lo_open = strict; }
            else if (b == lo) lo_open = lo_open || strict;
        }
    }
    void at_least(const Rational& p, const Rational& q, const Rational& r, bool strict) {
        at_most(-p, -q, -r, strict);
    }
};

struct Window {
    Rational begin, end;
    bool end_open = false;
};

// a enters no later than b leaves
bool precedes(const Window& a, const Window& b) {
    return a.begin < b.end || (a.begin == b.end && !b.end_open);
}

}  // namespace

Model::Model(IntersectionConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.vehicles.empty()) throw ContractViolation("model needs at least one vehicle");
    if (!(cfg_.tau > 0) || !(cfg_.mu > 0)) throw ContractViolation("tau and mu must be positive");
    if (cfg_.d_max < cfg_.d_min) throw ContractViolation("d_min exceeds d_max");
    for (std::size_t i = 0; i < cfg_.size(); ++i) {
        auto& v = cfg_.vehicles[i];
        if (v.road >= cfg_.roads.size()) throw ContractViolation("vehicle road index out of range");
        if (v.speed_steps.empty()) throw ContractViolation("vehicle without speeds");
        std::sort(v.speed_steps.begin(), v.speed_steps.end());
        v.speed_steps.erase(std::unique(v.speed_steps.begin(), v.speed_steps.end()), v.speed_steps.end());
        (v.controlled ? controlled_ : uncontrolled_).push_back(i);
    }
    std::vector<std::vector<std::int64_t>> c_axes, uc_axes;
    for (auto i : controlled_) c_axes.push_back(cfg_.vehicles[i].speed_steps);
    for (auto i : uncontrolled_) uc_axes.push_back(cfg_.vehicles[i].speed_steps);
    if (c_axes.empty()) {
        actions_.push_back(Action{});
    } else {
        for (auto& s : cartesian(c_axes)) actions_.push_back(Action{std::move(s)});
    }
    uc_choices_ = uc_axes.empty() ? std::vector<std::vector<std::int64_t>>{{}} : cartesian(uc_axes);

    const Rational g = cfg_.cell_width();
    w_lo_ = floor_int(cfg_.delta_min() / g);
    w_hi_ = ceil_int(cfg_.delta_max() / g);
    for (const auto& v : cfg_.vehicles)
        marked_from_.push_back(ceil_int(cfg_.roads[v.road].exit / g + Rational(1, 2)));
}

std::optional<std::size_t> Model::action_index(const Action& a) const {
    auto it = std::find(actions_.begin(), actions_.end(), a);
    if (it == actions_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - actions_.begin());
}

InputVec Model::input(const Action& a, const std::vector<std::int64_t>& uc_steps) const {
    if (a.steps.size() != controlled_.size() || uc_steps.size() != uncontrolled_.size())
        throw ContractViolation("input arity mismatch");
    const Rational g = cfg_.cell_width();
    InputVec u(size());
    for (std::size_t k = 0; k < controlled_.size(); ++k) u[controlled_[k]] = g * a.steps[k];
    for (std::size_t k = 0; k < uncontrolled_.size(); ++k) u[uncontrolled_[k]] = g * uc_steps[k];
    return u;
}

std::vector<Rational> Model::speeds(const Action& a) const {
    std::vector<Rational> v;
    for (auto s : a.steps) v.push_back(cfg_.mu * s);
    return v;
}

std::string Model::action_label(const Action& a) const {
    std::string s = "(";
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
        if (k) s += ",";
        s += to_string(cfg_.cell_width() * a.steps[k]);
    }
    return s + ")";
}

StateVec Model::step_dynamics(const StateVec& x, const InputVec& u, const std::vector<Rational>& delta) const {
    if (x.size() != size() || u.size() != size() || delta.size() != size())
        throw ContractViolation("step_dynamics arity mismatch");
    StateVec out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        if (delta[i] < cfg_.delta_min() || cfg_.delta_max() < delta[i])
            throw ContractViolation("disturbance " + to_string(delta[i]) + " outside [" +
                                    to_string(cfg_.delta_min()) + "," + to_string(cfg_.delta_max()) + "]");
        out[i] = x[i] + u[i] + delta[i];
    }
    return out;
}

BoxUnion Model::post(const BoxUnion& s, const Action& a) const {
    std::vector<Box> out;
    for (const auto& b : s.boxes()) {
        for (const auto& uc : uc_choices_) {
            InputVec u = input(a, uc);
            Box nb = b;
            for (std::size_t i = 0; i < size(); ++i)
                nb[i] = {b[i].lo + u[i] + cfg_.delta_min(), b[i].hi + u[i] + cfg_.delta_max()};
            out.push_back(std::move(nb));
        }
    }
    return BoxUnion(size(), std::move(out));
}

BoxUnion Model::post_seq(const BoxUnion& s, std::span<const Action> seq) const {
    if (seq.empty()) throw ContractViolation("post_seq needs a nonempty input sequence");
    BoxUnion r = s;
    for (const auto& a : seq) r = post(r, a);
    return r;
}

Box Model::post_hull(const StateVec& x, const Action& a) const {
    const Rational g = cfg_.cell_width();
    std::vector<Interval> d(size());
    for (std::size_t k = 0; k < controlled_.size(); ++k) {
        std::size_t i = controlled_[k];
        d[i] = {x[i] + g * a.steps[k] + cfg_.delta_min(), x[i] + g * a.steps[k] + cfg_.delta_max()};
    }
    for (auto i : uncontrolled_) {
        const auto& sp = cfg_.vehicles[i].speed_steps;
        d[i] = {x[i] + g * sp.front() + cfg_.delta_min(), x[i] + g * sp.back() + cfg_.delta_max()};
    }
    return Box(std::move(d));
}

bool Model::in_bad_set(const StateVec& x) const {
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            const Road& ri = cfg_.roads[cfg_.vehicles[i].road];
            const Road& rj = cfg_.roads[cfg_.vehicles[j].road];
            if (cfg_.vehicles[i].road != cfg_.vehicles[j].road) {
                if (ri.entry <= x[i] && x[i] <= ri.exit && rj.entry <= x[j] && x[j] <= rj.exit) return true;
            } else if (rabs(x[i] - x[j]) < cfg_.gap && x[i] <= ri.exit && x[j] <= ri.exit) {
                return true;
            }
        }
    }
    return false;
}

bool Model::segment_hits_bad_set(const StateVec& from, const StateVec& to) const {
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = i + 1; j < size(); ++j) {
            const Rational di = to[i] - from[i], dj = to[j] - from[j];
            const Road& ri = cfg_.roads[cfg_.vehicles[i].road];
            const Road& rj = cfg_.roads[cfg_.vehicles[j].road];
            TimeSet t;
            if (cfg_.vehicles[i].road != cfg_.vehicles[j].road) {
                t.at_least(from[i], di, ri.entry, false);
                t.at_most(from[i], di, ri.exit, false);
                t.at_least(from[j], dj, rj.entry, false);
                t.at_most(from[j], dj, rj.exit, false);
            } else {
                t.at_most(from[i] - from[j], di - dj, cfg_.gap, true);
                t.at_least(from[i] - from[j], di - dj, -cfg_.gap, true);
                t.at_most(from[i], di, ri.exit, false);
                t.at_most(from[j], dj, ri.exit, false);
            }
            if (!t.empty()) return true;
        }
    }
    return false;
}

bool Model::ranges_safe(const std::vector<PositionRange>& start, const InputVec& u,
                        const std::vector<PositionRange>& end) const {
    const Rational tau = cfg_.tau;
    const std::size_t n = size();
    std::vector<Rational> smin(n), smax(n);
    for (std::size_t i = 0; i < n; ++i) {
        smin[i] = (u[i] + cfg_.delta_min()) / tau;
        smax[i] = (u[i] + cfg_.delta_max()) / tau;
    }
    std::vector<std::optional<Window>> win(n);
    for (std::size_t i = 0; i < n; ++i) {
        const PositionRange& s = start[i];
        const PositionRange& e = end[i];
        const Road& r = cfg_.roads[cfg_.vehicles[i].road];
        if (s.unbounded) continue;
        if (s.lo_open ? r.exit <= s.lo : r.exit < s.lo) continue;
        Rational reach = s.hi + smax[i] * tau;
        if (!e.unbounded) reach = rmin(reach, e.hi);
        if (reach < r.entry) continue;
        Window w;
        w.begin = (r.entry <= s.hi || !(smax[i] > 0)) ? Rational(0) : (r.entry - s.hi) / smax[i];
        if (smin[i] > 0) {
            w.end = (r.exit - s.lo) / smin[i];
            w.end_open = s.lo_open;
        }
        if (!(smin[i] > 0) || tau < w.end) {
            w.end = tau;
            w.end_open = false;
        }
        if (w.end < w.begin || (w.begin == w.end && w.end_open)) continue;
        win[i] = w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (cfg_.vehicles[i].road != cfg_.vehicles[j].road) {
                if (win[i] && win[j] && precedes(*win[i], *win[j]) && precedes(*win[j], *win[i])) return false;
                continue;
            }
            const PositionRange& a = start[i];
            const PositionRange& b = start[j];
            if (a.unbounded || b.unbounded) continue;
            const Rational beta = cfg_.roads[cfg_.vehicles[i].road].exit;
            bool a_in = a.lo_open ? a.lo < beta : a.lo <= beta;
            bool b_in = b.lo_open ? b.lo < beta : b.lo <= beta;
            if (!a_in || !b_in) continue;
            Rational lo0 = a.lo - b.hi, hi0 = a.hi - b.lo;
            Rational lo1 = a.lo + smin[i] * tau - (b.hi + smax[j] * tau);
            Rational hi1 = a.hi + smax[i] * tau - (b.lo + smin[j] * tau);
            Rational lo = rmin(lo0, lo1), hi = rmax(hi0, hi1);
            if (lo < cfg_.gap && -cfg_.gap < hi) return false;
        }
    }
    return true;
}

bool Model::transition_safe(const BoxUnion& s, const InputVec& u, const BoxUnion& s_next) const {
    for (const auto& b : s.boxes()) {
        for (const auto& bn : s_next.boxes()) {
            std::vector<PositionRange> st(size()), en(size());
            for (std::size_t i = 0; i < size(); ++i) {
                st[i] = {b[i].lo, b[i].hi, false, false};
                en[i] = {bn[i].lo, bn[i].hi, false, false};
            }
            if (!ranges_safe(st, u, en)) return false;
        }
    }
    return true;
}

Cell Model::quantize_component(std::size_t i, const Rational& x) const {
    if (cfg_.roads[cfg_.vehicles[i].road].exit < x) return kMarkedCell;
    return ceil_int(x / cfg_.cell_width() - Rational(1, 2));
}

CellVec Model::quantize(const StateVec& x) const {
    CellVec q(size());
    for (std::size_t i = 0; i < size(); ++i) q[i] = quantize_component(i, x[i]);
    return q;
}

CellSet Model::quantize_set(const BoxUnion& s) const {
    CellSet out;
    for (const auto& b : s.boxes()) {
        std::vector<std::vector<Cell>> axes(size());
        for (std::size_t i = 0; i < size(); ++i) {
            const Rational beta = cfg_.roads[cfg_.vehicles[i].road].exit;
            if (b[i].lo <= beta) {
                Cell c0 = quantize_component(i, b[i].lo);
                Cell c1 = quantize_component(i, rmin(b[i].hi, beta));
                for (Cell c = c0; c <= c1; ++c) axes[i].push_back(c);
            }
            if (beta < b[i].hi) axes[i].push_back(kMarkedCell);
        }
        out = out.unite(CellSet::product(axes));
    }
    return out;
}

std::vector<Rational> Model::w_set() const {
    std::vector<Rational> w;
    for (std::int64_t k = w_lo_; k <= w_hi_; ++k) w.push_back(cfg_.cell_width() * k);
    return w;
}

std::vector<Cell> Model::settle(std::size_t i, Cell raw) const {
    if (raw == kMarkedCell || raw >= marked_from_[i]) return {kMarkedCell};
    const Rational g = cfg_.cell_width();
    const Rational beta = cfg_.roads[cfg_.vehicles[i].road].exit;
    if (beta < (Rational(raw) + Rational(1, 2)) * g) return {raw, kMarkedCell};
    return {raw};
}

PositionRange Model::cell_range(std::size_t i, Cell c) const {
    const Rational beta = cfg_.roads[cfg_.vehicles[i].road].exit;
    if (c == kMarkedCell) return {beta, beta, true, true};
    const Rational g = cfg_.cell_width();
    return {(Rational(c) - Rational(1, 2)) * g, rmin((Rational(c) + Rational(1, 2)) * g, beta), true, false};
}

std::int64_t Model::min_advance(std::size_t i) const { return cfg_.vehicles[i].speed_steps.front() + w_lo_; }
std::int64_t Model::max_advance(std::size_t i) const { return cfg_.vehicles[i].speed_steps.back() + w_hi_; }

std::vector<CellVec> Model::cell_successors(const CellVec& q, const Action& a,
                                            const std::vector<std::int64_t>& uc_steps) const {
    std::vector<std::vector<Cell>> axes(size());
    std::vector<std::int64_t> k(size());
    for (std::size_t c = 0; c < controlled_.size(); ++c) k[controlled_[c]] = a.steps[c];
    for (std::size_t c = 0; c < uncontrolled_.size(); ++c) k[uncontrolled_[c]] = uc_steps[c];
    for (std::size_t i = 0; i < size(); ++i) {
        if (q[i] == kMarkedCell) {
            axes[i] = {kMarkedCell};
            continue;
        }
        std::set<Cell> opts;
        for (std::int64_t w = w_lo_; w <= w_hi_; ++w)
            for (Cell c : settle(i, q[i] + k[i] + w)) opts.insert(c);
        axes[i].assign(opts.begin(), opts.end());
    }
    return CellSet::product(axes).cells();
}

bool Model::cell_transition_safe(const CellVec& q, const InputVec& u, const CellVec& q_next) const {
    std::vector<PositionRange> st(size()), en(size());
    for (std::size_t i = 0; i < size(); ++i) {
        st[i] = cell_range(i, q[i]);
        en[i] = cell_range(i, q_next[i]);
    }
    return ranges_safe(st, u, en);
}

bool Model::cell_action_safe(const CellVec& q, const Action& a) const {
    if (all_marked(q)) return true;
    for (const auto& uc : uc_choices_) {
        InputVec u = input(a, uc);
        for (const auto& qn : cell_successors(q, a, uc))
            if (!cell_transition_safe(q, u, qn)) return false;
    }
    return true;
}

CellSet Model::cell_post(const CellSet& iota, const Action& a) const {
    std::vector<CellVec> out;
    for (const auto& q : iota)
        for (const auto& uc : uc_choices_)
            for (auto& qn : cell_successors(q, a, uc)) out.push_back(std::move(qn));
    return CellSet(std::move(out));
}

std::int64_t Model::steps_to_marked(const CellSet& iota) const {
    std::int64_t k = 0;
    for (const auto& q : iota) {
        for (std::size_t i = 0; i < size(); ++i) {
            if (q[i] == kMarkedCell) continue;
            std::int64_t adv = min_advance(i);
            if (adv <= 0) throw ContractViolation("vehicle can stall; marking horizon undefined");
            k = std::max(k, ceil_int(Rational(marked_from_[i] - q[i], adv)));
        }
    }
    return k;
}

}  // namespace rsc

namespace rsc {

std::string canonical_text(const IntersectionConfig& cfg) {
    std::string s;
    for (std::size_t l = 0; l < cfg.roads.size(); ++l)
        s += "road " + std::to_string(l) + " " + to_string(cfg.roads[l].entry) + " " + to_string(cfg.roads[l].exit) + "\n";
    for (std::size_t i = 0; i < cfg.vehicles.size(); ++i) {
        const auto& v = cfg.vehicles[i];
        s += "vehicle " + std::to_string(i) + " road=" + std::to_string(v.road) +
             (v.controlled ? " controlled" : " uncontrolled") + " speeds=";
        for (auto k : v.speed_steps) s += std::to_string(k) + ",";
        s += "\n";
    }
    s += "gap " + to_string(cfg.gap) + "\ntau " + to_string(cfg.tau) + "\nmu " + to_string(cfg.mu) + "\n";
    s += "disturbance " + to_string(cfg.d_min) + " " + to_string(cfg.d_max) + "\n";
    s += "t_max " + std::to_string(cfg.t_max) + "\nx0 " + to_string(cfg.x0) + "\n";
    for (std::size_t i = 0; i < cfg.detector.bias.size(); ++i)
        s += "detector " + std::to_string(i) + " " + to_string(cfg.detector.bias[i]) + " " +
             to_string(cfg.detector.threshold[i]) + "\n";
    s += "scale " + std::to_string(cfg.scale) + "\n";
    return s;
}

std::string config_fingerprint(const IntersectionConfig& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_text(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    return out;
}

}  // namespace rsc
