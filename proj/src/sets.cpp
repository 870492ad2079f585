#include "rsc/sets.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace rsc {

namespace {

template <class V>
std::string vec_string(const V& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += to_string(v[i]);
    }
    return s + ")";
}

bool interval_less(const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.hi < b.hi;
}

}  // namespace

std::string to_string(const StateVec& x) { return vec_string(x); }
std::string to_string(const InputVec& u) { return vec_string(u); }

Box Box::point(const StateVec& x) {
    std::vector<Interval> d;
    d.reserve(x.size());
    for (const auto& v : x) d.push_back({v, v});
    return Box(std::move(d));
}

bool Box::empty() const {
    return std::any_of(dims_.begin(), dims_.end(), [](const Interval& i) { return i.empty(); });
}

bool Box::contains(const StateVec& x) const {
    if (x.size() != dims_.size()) throw ContractViolation("dimension mismatch in Box::contains");
    for (std::size_t i = 0; i < dims_.size(); ++i)
        if (!dims_[i].contains(x[i])) return false;
    return true;
}

bool Box::contains(const Box& o) const {
    for (std::size_t i = 0; i < dims_.size(); ++i)
        if (o.dims_[i].lo < dims_[i].lo || dims_[i].hi < o.dims_[i].hi) return false;
    return true;
}

Box Box::intersect(const Box& o) const {
    std::vector<Interval> d(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i)
        d[i] = {rmax(dims_[i].lo, o.dims_[i].lo), rmin(dims_[i].hi, o.dims_[i].hi)};
    return Box(std::move(d));
}

bool operator<(const Box& a, const Box& b) {
    return std::lexicographical_compare(a.dims_.begin(), a.dims_.end(), b.dims_.begin(), b.dims_.end(),
                                        interval_less);
}

BoxUnion::BoxUnion(std::size_t dim, std::vector<Box> boxes) : dim_(dim), boxes_(std::move(boxes)) {
    for (const auto& b : boxes_)
        if (b.size() != dim_) throw ContractViolation("box dimension mismatch");
    normalize();
}

BoxUnion BoxUnion::of(const Box& b) { return BoxUnion(b.size(), {b}); }
BoxUnion BoxUnion::point(const StateVec& x) { return of(Box::point(x)); }

void BoxUnion::normalize() {
    std::erase_if(boxes_, [](const Box& b) { return b.empty(); });
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < boxes_.size() && !changed; ++i) {
            for (std::size_t j = 0; j < boxes_.size() && !changed; ++j) {
                if (i == j) continue;
                if (boxes_[i].contains(boxes_[j])) {
                    boxes_.erase(boxes_.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                    break;
                }
                // merge when the boxes agree on every axis but one and touch or overlap there
                std::size_t diff = dim_, ndiff = 0;
                for (std::size_t d = 0; d < dim_; ++d)
                    if (!(boxes_[i][d] == boxes_[j][d])) { diff = d; ++ndiff; }
                if (ndiff == 1) {
                    const Interval& a = boxes_[i][diff];
                    const Interval& b = boxes_[j][diff];
                    if (a.lo <= b.hi && b.lo <= a.hi) {
                        boxes_[i][diff] = {rmin(a.lo, b.lo), rmax(a.hi, b.hi)};
                        boxes_.erase(boxes_.begin() + static_cast<std::ptrdiff_t>(j));
                        changed = true;
                    }
                }
            }
        }
    }
    std::sort(boxes_.begin(), boxes_.end());
}

bool BoxUnion::contains(const StateVec& x) const {
    return std::any_of(boxes_.begin(), boxes_.end(), [&](const Box& b) { return b.contains(x); });
}

BoxUnion BoxUnion::unite(const BoxUnion& other) const {
    if (empty()) return other;
    if (other.empty()) return *this;
    if (dim_ != other.dim_) throw ContractViolation("dimension mismatch in unite");
    std::vector<Box> all = boxes_;
    all.insert(all.end(), other.boxes_.begin(), other.boxes_.end());
    return BoxUnion(dim_, std::move(all));
}

BoxUnion BoxUnion::intersect(const BoxUnion& other) const {
    if (empty() || other.empty()) return BoxUnion(std::max(dim_, other.dim_));
    if (dim_ != other.dim_) throw ContractViolation("dimension mismatch in intersect");
    std::vector<Box> out;
    for (const auto& a : boxes_)
        for (const auto& b : other.boxes_) out.push_back(a.intersect(b));
    return BoxUnion(dim_, std::move(out));
}

// Exact test: split every axis at all box endpoints and probe each elementary piece
// (endpoint values and open gaps between consecutive endpoints).
bool BoxUnion::subset_of(const BoxUnion& other) const {
    if (empty()) return true;
    if (other.empty()) return false;
    for (const auto& box : boxes_) {
        std::vector<std::vector<Rational>> probes(dim_);
        for (std::size_t d = 0; d < dim_; ++d) {
            std::vector<Rational> cuts{box[d].lo, box[d].hi};
            for (const auto& o : other.boxes_)
                for (const auto& v : {o[d].lo, o[d].hi})
                    if (box[d].lo < v && v < box[d].hi) cuts.push_back(v);
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            for (std::size_t k = 0; k < cuts.size(); ++k) {
                probes[d].push_back(cuts[k]);
                if (k + 1 < cuts.size()) probes[d].push_back((cuts[k] + cuts[k + 1]) / 2);
            }
        }
        std::vector<std::size_t> idx(dim_, 0);
        while (true) {
            StateVec x(dim_);
            for (std::size_t d = 0; d < dim_; ++d) x[d] = probes[d][idx[d]];
            if (!other.contains(x)) return false;
            std::size_t d = 0;
            while (d < dim_ && ++idx[d] == probes[d].size()) idx[d++] = 0;
            if (d == dim_) break;
        }
    }
    return true;
}

Box BoxUnion::hull() const {
    if (empty()) throw ContractViolation("hull of an empty set");
    Box h = boxes_.front();
    for (const auto& b : boxes_)
        for (std::size_t d = 0; d < dim_; ++d)
            h[d] = {rmin(h[d].lo, b[d].lo), rmax(h[d].hi, b[d].hi)};
    return h;
}

std::string to_string(const Box& b) {
    std::string s = "[";
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) s += " x ";
        s += "[" + to_string(b[i].lo) + "," + to_string(b[i].hi) + "]";
    }
    return s + "]";
}

std::string to_string(const BoxUnion& s) {
    if (s.empty()) return "{}";
    std::string out;
    for (const auto& b : s.boxes()) {
        if (!out.empty()) out += " u ";
        out += to_string(b);
    }
    return out;
}

bool all_marked(const CellVec& q) {
    return std::all_of(q.begin(), q.end(), [](Cell c) { return c == kMarkedCell; });
}

std::string to_string(const CellVec& q) {
    std::string s = "(";
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i) s += ",";
        s += q[i] == kMarkedCell ? std::string("M") : std::to_string(q[i]);
    }
    return s + ")";
}

CellSet::CellSet(std::vector<CellVec> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

CellSet CellSet::product(const std::vector<std::vector<Cell>>& per_vehicle) {
    std::vector<CellVec> out;
    for (const auto& axis : per_vehicle)
        if (axis.empty()) return CellSet();
    std::vector<std::size_t> idx(per_vehicle.size(), 0);
    while (true) {
        CellVec q(per_vehicle.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = per_vehicle[i][idx[i]];
        out.push_back(std::move(q));
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == per_vehicle[d].size()) idx[d++] = 0;
        if (d == idx.size()) break;
    }
    return CellSet(std::move(out));
}

bool CellSet::contains(const CellVec& q) const { return std::binary_search(cells_.begin(), cells_.end(), q); }

CellSet CellSet::intersect(const CellSet& o) const {
    CellSet r;
    std::set_intersection(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(),
                          std::back_inserter(r.cells_));
    return r;
}

CellSet CellSet::unite(const CellSet& o) const {
    CellSet r;
    std::set_union(cells_.begin(), cells_.end(), o.cells_.begin(), o.cells_.end(), std::back_inserter(r.cells_));
    return r;
}

bool CellSet::subset_of(const CellSet& o) const {
    return std::includes(o.cells_.begin(), o.cells_.end(), cells_.begin(), cells_.end());
}

bool CellSet::is_marked() const { return cells_.size() == 1 && all_marked(cells_.front()); }

std::string to_string(const CellSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += to_string(s.cells()[i]);
    }
    return out + "}";
}

CellSet parse_cell_set(const std::string& text) {
    std::vector<CellVec> cells;
    std::size_t p = 0;
    auto skip = [&] { while (p < text.size() && text[p] == ' ') ++p; };
    auto expect = [&](char c) {
        skip();
        if (p >= text.size() || text[p] != c)
            throw std::invalid_argument("malformed cell set '" + text + "' at offset " + std::to_string(p));
        ++p;
    };
    expect('{');
    skip();
    if (p < text.size() && text[p] == '}') return CellSet();
    while (true) {
        expect('(');
        CellVec q;
        while (true) {
            skip();
            std::size_t start = p;
            while (p < text.size() && text[p] != ',' && text[p] != ')') ++p;
            std::string tok = text.substr(start, p - start);
            while (!tok.empty() && tok.back() == ' ') tok.pop_back();
            if (tok == "M") {
                q.push_back(kMarkedCell);
            } else {
                std::size_t used = 0;
                long long v = 0;
                try {
                    v = std::stoll(tok, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (tok.empty() || used != tok.size())
                    throw std::invalid_argument("bad cell value '" + tok + "' in '" + text + "'");
                q.push_back(v);
            }
            if (p < text.size() && text[p] == ',') { ++p; continue; }
            expect(')');
            break;
        }
        cells.push_back(std::move(q));
        skip();
        if (p < text.size() && text[p] == ',') { ++p; continue; }
        expect('}');
        break;
    }
    return CellSet(std::move(cells));
}

}  // namespace rsc
