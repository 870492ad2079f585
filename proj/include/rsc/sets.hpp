#pragma once

#include "rsc/rational.hpp"

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace rsc {

// Fixed-length vector of exact values, tagged so positions and displacements do not mix.
template <class Tag>
class TaggedVec {
public:
    TaggedVec() = default;
    explicit TaggedVec(std::size_t n, Rational fill = 0) : v_(n, fill) {}
    explicit TaggedVec(std::vector<Rational> v) : v_(std::move(v)) {}
    TaggedVec(std::initializer_list<Rational> v) : v_(v) {}

    std::size_t size() const { return v_.size(); }
    Rational& operator[](std::size_t i) { return v_[i]; }
    const Rational& operator[](std::size_t i) const { return v_[i]; }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }
    const std::vector<Rational>& values() const { return v_; }

    friend bool operator==(const TaggedVec&, const TaggedVec&) = default;

private:
    std::vector<Rational> v_;
};

struct PositionTag {};
struct DisplacementTag {};
using StateVec = TaggedVec<PositionTag>;
using InputVec = TaggedVec<DisplacementTag>;

std::string to_string(const StateVec& x);
std::string to_string(const InputVec& u);

struct Interval {
    Rational lo, hi;

    bool empty() const { return hi < lo; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Axis-aligned closed box over vehicle positions.
class Box {
public:
    Box() = default;
    explicit Box(std::vector<Interval> dims) : dims_(std::move(dims)) {}
    static Box point(const StateVec& x);

    std::size_t size() const { return dims_.size(); }
    const Interval& operator[](std::size_t i) const { return dims_[i]; }
    Interval& operator[](std::size_t i) { return dims_[i]; }
    const std::vector<Interval>& dims() const { return dims_; }

    bool empty() const;
    bool contains(const StateVec& x) const;
    bool contains(const Box& other) const;
    Box intersect(const Box& other) const;

    friend bool operator==(const Box&, const Box&) = default;
    friend bool operator<(const Box& a, const Box& b);

private:
    std::vector<Interval> dims_;
};

// Finite union of closed boxes kept in a normalized, canonical order.
class BoxUnion {
public:
    BoxUnion() = default;
    explicit BoxUnion(std::size_t dim) : dim_(dim) {}
    BoxUnion(std::size_t dim, std::vector<Box> boxes);
    static BoxUnion of(const Box& b);
    static BoxUnion point(const StateVec& x);

    std::size_t dim() const { return dim_; }
    bool empty() const { return boxes_.empty(); }
    const std::vector<Box>& boxes() const { return boxes_; }

    bool contains(const StateVec& x) const;
    BoxUnion unite(const BoxUnion& other) const;
    BoxUnion intersect(const BoxUnion& other) const;
    bool subset_of(const BoxUnion& other) const;
    // Per-vehicle interval hull; requires a nonempty union.
    Box hull() const;

    friend bool operator==(const BoxUnion& a, const BoxUnion& b) {
        return a.dim_ == b.dim_ && a.boxes_ == b.boxes_;
    }

private:
    void normalize();

    std::size_t dim_ = 0;
    std::vector<Box> boxes_;
};

std::string to_string(const Box& b);
std::string to_string(const BoxUnion& s);

using Cell = std::int64_t;
inline constexpr Cell kMarkedCell = std::numeric_limits<Cell>::max();
using CellVec = std::vector<Cell>;

bool all_marked(const CellVec& q);
std::string to_string(const CellVec& q);

// Sorted set of grid states; equality is structural.
class CellSet {
public:
    CellSet() = default;
    explicit CellSet(std::vector<CellVec> cells);
    static CellSet product(const std::vector<std::vector<Cell>>& per_vehicle);

    bool empty() const { return cells_.empty(); }
    std::size_t size() const { return cells_.size(); }
    bool contains(const CellVec& q) const;
    CellSet intersect(const CellSet& other) const;
    CellSet unite(const CellSet& other) const;
    bool subset_of(const CellSet& other) const;
    bool is_marked() const;
    const std::vector<CellVec>& cells() const { return cells_; }
    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

    friend bool operator==(const CellSet&, const CellSet&) = default;
    friend auto operator<=>(const CellSet& a, const CellSet& b) { return a.cells_ <=> b.cells_; }

private:
    std::vector<CellVec> cells_;
};

// Canonical text form, e.g. "{(2,4),(2,5)}"; "M" marks a crossed vehicle.
std::string to_string(const CellSet& s);
CellSet parse_cell_set(const std::string& text);

}  // namespace rsc
