#pragma once

#include "rsc/sets.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsc {

struct Road {
    Rational entry;  // alpha
    Rational exit;   // beta
};

struct VehicleSpec {
    std::size_t road = 0;
    bool controlled = true;
    // Admissible speeds as integer multiples of mu, sorted and unique.
    std::vector<std::int64_t> speed_steps;
};

struct DetectorParams {
    std::vector<Rational> bias;
    std::vector<Rational> threshold;
};

struct IntersectionConfig {
    std::vector<Road> roads;
    std::vector<VehicleSpec> vehicles;
    Rational gap{0};
    Rational tau{1};
    Rational mu{1};
    Rational d_min{0};
    Rational d_max{0};
    int t_max = 0;
    BoxUnion x0;
    DetectorParams detector;
    std::int64_t scale = 1000;

    std::size_t size() const { return vehicles.size(); }
    Rational cell_width() const { return tau * mu; }
    Rational delta_min() const { return d_min * tau; }
    Rational delta_max() const { return d_max * tau; }
    // Exactness grid for sampled disturbances and logged positions.
    Rational resolution() const { return cell_width() / scale; }
};

// One controlled input: per controlled vehicle, the speed as a multiple of mu.
struct Action {
    std::vector<std::int64_t> steps;
    friend bool operator==(const Action&, const Action&) = default;
    friend auto operator<=>(const Action&, const Action&) = default;
};

// Per-vehicle position range used by the time-window safety check.
struct PositionRange {
    Rational lo, hi;
    bool lo_open = false;
    bool unbounded = false;  // hi is +infinity
};

class Model {
public:
    explicit Model(IntersectionConfig cfg);

    const IntersectionConfig& config() const { return cfg_; }
    std::size_t size() const { return cfg_.size(); }
    const std::vector<std::size_t>& controlled() const { return controlled_; }
    const std::vector<std::size_t>& uncontrolled() const { return uncontrolled_; }

    // U_c in lexicographic order of the controlled vehicles' speed steps.
    const std::vector<Action>& actions() const { return actions_; }
    std::optional<std::size_t> action_index(const Action& a) const;
    // Every uncontrolled speed assignment, as steps per uncontrolled vehicle.
    const std::vector<std::vector<std::int64_t>>& uncontrolled_choices() const { return uc_choices_; }

    // Full displacement vector for a controlled action and an uncontrolled choice.
    InputVec input(const Action& a, const std::vector<std::int64_t>& uc_steps) const;
    std::vector<Rational> speeds(const Action& a) const;
    std::string action_label(const Action& a) const;

    StateVec step_dynamics(const StateVec& x, const InputVec& u, const std::vector<Rational>& delta) const;
    BoxUnion post(const BoxUnion& s, const Action& a) const;
    BoxUnion post_seq(const BoxUnion& s, std::span<const Action> seq) const;
    // Per-vehicle hull of post of a point: the interval [x̂_min, x̂_max].
    Box post_hull(const StateVec& x, const Action& a) const;

    bool in_bad_set(const StateVec& x) const;
    // Straight-line motion from `from` to `to` over one step touches the bad set.
    bool segment_hits_bad_set(const StateVec& from, const StateVec& to) const;
    bool transition_safe(const BoxUnion& s, const InputVec& u, const BoxUnion& s_next) const;

    CellVec quantize(const StateVec& x) const;
    CellSet quantize_set(const BoxUnion& s) const;
    Cell quantize_component(std::size_t i, const Rational& x) const;

    // W as integer multiples of the cell width.
    std::int64_t w_lo() const { return w_lo_; }
    std::int64_t w_hi() const { return w_hi_; }
    std::vector<Rational> w_set() const;

    // Smallest cell index lying entirely beyond the vehicle's exit.
    Cell marked_from(std::size_t i) const { return marked_from_[i]; }
    // Cells a raw grid index stands for: itself, the marked sentinel, or both when the cell straddles the exit.
    std::vector<Cell> settle(std::size_t i, Cell raw) const;
    PositionRange cell_range(std::size_t i, Cell c) const;
    // Smallest and largest per-step cell advance of a vehicle (speed plus W).
    std::int64_t min_advance(std::size_t i) const;
    std::int64_t max_advance(std::size_t i) const;
    // Advance options of an uncontrolled vehicle over one step before disturbance.
    const std::vector<std::int64_t>& speed_steps(std::size_t i) const { return cfg_.vehicles[i].speed_steps; }

    std::vector<CellVec> cell_successors(const CellVec& q, const Action& a,
                                         const std::vector<std::int64_t>& uc_steps) const;
    bool cell_transition_safe(const CellVec& q, const InputVec& u, const CellVec& q_next) const;
    // Safe for every uncontrolled choice and every disturbance cell; memo-free.
    bool cell_action_safe(const CellVec& q, const Action& a) const;
    CellSet cell_post(const CellSet& iota, const Action& a) const;
    // Steps after which every successor of iota is all-marked, at minimum progress.
    std::int64_t steps_to_marked(const CellSet& iota) const;

    bool ranges_safe(const std::vector<PositionRange>& start, const InputVec& u,
                     const std::vector<PositionRange>& end) const;

private:
    IntersectionConfig cfg_;
    std::vector<std::size_t> controlled_, uncontrolled_;
    std::vector<Action> actions_;
    std::vector<std::vector<std::int64_t>> uc_choices_;
    std::vector<Cell> marked_from_;
    std::int64_t w_lo_ = 0, w_hi_ = 0;
};

}  // namespace rsc

namespace rsc {

// Canonical one-line-per-field dump of every semantic config value.
std::string canonical_text(const IntersectionConfig& cfg);
// Hex FNV-1a digest of canonical_text.
std::string config_fingerprint(const IntersectionConfig& cfg);

}  // namespace rsc
