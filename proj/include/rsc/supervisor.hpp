#pragma once

#include "rsc/des.hpp"
#include "rsc/model.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace rsc {

enum class SupervisorKind { Baseline, Resilient };

std::string to_string(SupervisorKind k);
SupervisorKind parse_supervisor_kind(const std::string& s);

// Admissible controlled inputs per information state. Baseline keys are single cells.
struct SupervisorTable {
    SupervisorKind kind = SupervisorKind::Resilient;
    int t_max = 0;
    std::string fingerprint;
    std::vector<Action> actions;
    std::map<CellSet, std::vector<std::size_t>> admissible;
    std::vector<CellSet> initial;
    bool success = false;

    const std::vector<std::size_t>* find(const CellSet& key) const;
    std::size_t permissiveness() const;
};

// Memoized single-cell action safety.
class SafetyCache {
public:
    explicit SafetyCache(const Model& model) : model_(model) {}
    bool safe(const CellVec& q, std::size_t action);

private:
    const Model& model_;
    std::map<std::pair<CellVec, std::size_t>, bool> memo_;
};

bool safe_des(const Model& model, const CellSet& iota, const Action& a);
// Restricted to transitions that land in iota_next.
bool safe_des(const Model& model, const CellSet& iota, const Action& a, const CellSet& iota_next);

// Finite game over information states: per key and action, the non-marked successor keys.
struct KeyedGame {
    std::vector<CellSet> keys;
    std::vector<std::vector<std::vector<std::size_t>>> successors;
    std::vector<std::vector<char>> safe;
};

// Greatest fixpoint of "safe and every successor keeps a choice", then co-reachability
// trimming, repeated until stable. Returns admissible action indices per key.
std::vector<std::vector<std::size_t>> solve_game(const KeyedGame& game);

SupervisorTable synthesize(const Model& model, const ObserverAutomaton& obs);
SupervisorTable baseline_supervisor(const Model& model, std::size_t max_states = 2'000'000);

// Admissible speed vectors for an information state; throws RuntimeFault when absent.
std::vector<std::vector<Rational>> sigma(const Model& model, const SupervisorTable& table, const CellSet& key);

// True when some cell still has two vehicles that can meet (crossing roads or same road), both unmarked.
bool conflict_possible(const Model& model, const CellSet& key);

// Observer states reachable from the initial states when only admissible inputs are applied.
std::vector<std::size_t> supervised_reachable(const ObserverAutomaton& obs, const SupervisorTable& table);

void write_table(std::ostream& os, const Model& model, const SupervisorTable& table);
SupervisorTable read_table(std::istream& is, const Model& model);

}  // namespace rsc
