#pragma once

#include "rsc/detector.hpp"
#include "rsc/errors.hpp"
#include "rsc/model.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace rsc {

// Observer state. `history` holds the measured cells of the last max(T,1) steps, oldest
// first, each shifted by the controlled inputs applied since it was taken. An entry
// is dropped (nullopt) once it can only be used after every vehicle is marked.
struct SynthesisState {
    CellSet info;
    std::vector<std::optional<CellVec>> history;
    int age = 0;    // min(k, T_max)
    int phase = 0;  // decision phase; intermediate layers are composed, not stored

    friend bool operator==(const SynthesisState&, const SynthesisState&) = default;
    friend auto operator<=>(const SynthesisState&, const SynthesisState&) = default;
};

std::string to_string(const SynthesisState& s);

std::vector<Rational> build_w_set(const Model& model);

// Per-vehicle cell advances possible over m steps (speed grid plus W).
std::vector<std::vector<std::int64_t>> advance_sets(const Model& model, int m, bool controlled_shifted);

// Cells the next measurement may fall in without an alarm, for C = 0.
CellSet stealthy_cells(const Model& model, const CellVec& shifted_last_measured, const DetectorParams& params);
Decision lambda_d_outcome(const CellSet& stealthy, const CellVec& measured);

// ℓ(Î) for a measured cell `prev` followed by `seq` and the current measured cell.
CellSet lambda_c_image(const Model& model, const CellVec& prev, std::span<const Action> seq, const CellVec& cur);

struct ObserverStep {
    enum class Kind { Ok, Detected, Infeasible } kind = Kind::Ok;
    SynthesisState next;
    std::optional<CellSet> image;  // nullopt when the whole space is trusted
};

// Prediction with `action`, detector filtering, then correction by the measured cell.
ObserverStep observer_step(const Model& model, const SynthesisState& s, const Action& action,
                           const CellVec& measured, int t_max, const DetectorParams& params);

SynthesisState initial_state(const Model& model, const CellVec& first_measured);

struct ObserverEdge {
    std::size_t action = 0;
    CellVec measured;
    std::size_t target = 0;
};

struct ObserverAutomaton {
    int t_max = 0;
    std::vector<SynthesisState> states;
    std::vector<std::vector<ObserverEdge>> edges;
    std::vector<std::size_t> initial;
    std::map<SynthesisState, std::size_t> index;

    bool marked(std::size_t id) const { return states[id].info.is_marked(); }
};

struct ObserverOptions {
    int t_max = 0;
    std::size_t max_states = 2'000'000;
};

ObserverAutomaton build_observer(const Model& model, const ObserverOptions& opt);

// Plain-text automaton listing states, then labelled transitions.
void write_observer(std::ostream& os, const Model& model, const ObserverAutomaton& obs);

struct RefinementPoint {
    int step = 0;
    BoxUnion corrected;
    CellSet info;
};

std::optional<int> first_refinement_breach(const Model& model, std::span<const RefinementPoint> points);
bool check_refinement(const Model& model, std::span<const RefinementPoint> points);

}  // namespace rsc
