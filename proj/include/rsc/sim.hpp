#pragma once

#include "rsc/attacker.hpp"
#include "rsc/des.hpp"
#include "rsc/estimator.hpp"
#include "rsc/supervisor.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace rsc {

enum class Outcome { SafeMarked, Collision, Deadlock, Detected, Horizon };
std::string to_string(Outcome o);

enum class DisturbancePolicy { Uniform, Corners, Zero };
enum class InputPolicy { First, Random, Scripted };

std::string to_string(DisturbancePolicy p);
std::string to_string(InputPolicy p);

struct ScenarioConfig {
    IntersectionConfig plant;
    std::vector<AttackPlan> attacks;
    DisturbancePolicy disturbance = DisturbancePolicy::Uniform;
    std::vector<std::vector<Rational>> disturbance_script;  // per step, per vehicle; overrides the policy
    InputPolicy input_policy = InputPolicy::First;
    std::vector<Action> input_script;                       // per step
    std::vector<std::vector<std::int64_t>> uncontrolled_script;
    std::optional<StateVec> initial_state;                  // default: sampled from x0
    int horizon = 0;                                        // 0 selects the crossing bound
    std::uint64_t seed = 0;
};

// Steps within which every vehicle has crossed, at minimum progress from the lowest start.
int crossing_bound(const Model& model);
// Problems with scenario-level settings; empty when admissible.
std::vector<std::string> check_scenario(const Model& model, const ScenarioConfig& sc);

struct StepRecord {
    int step = 0;
    StateVec x;
    StateVec measured;
    std::vector<Rational> C;
    BoxUnion corrected;
    std::optional<CellSet> info;
    std::optional<bool> refinement;
    bool attacked = false;
    std::vector<std::size_t> admissible;
    std::optional<std::size_t> chosen;
    bool script_overridden = false;
    std::optional<InputVec> input;
    std::vector<Rational> disturbance;
};

struct RunTrace {
    SupervisorKind kind = SupervisorKind::Resilient;
    std::uint64_t seed = 0;
    std::vector<StepRecord> steps;
    Outcome outcome = Outcome::Horizon;
    bool deadlock_seen = false;

    std::vector<RefinementPoint> refinement_points() const;
};

RunTrace run_scenario(const Model& model, const ScenarioConfig& sc, const SupervisorTable& table);
// Builds the model and supervisor, then runs.
RunTrace run_scenario(const ScenarioConfig& sc, SupervisorKind kind);

// Random admissible attack schedule: windows of length <= t_max, >= t_max clean steps apart.
std::vector<AttackPlan> random_attack_schedule(std::mt19937_64& rng, std::size_t n, int t_max, int horizon,
                                               const std::vector<AttackStrategy>& strategies,
                                               const Rational& cell_width);

void write_trace_csv(std::ostream& os, const Model& model, const RunTrace& trace);

// Worker count from RSC_WORKERS, else hardware concurrency.
unsigned worker_count();
// Runs body(i) for i in [0, n) on a pool; exceptions propagate after all workers join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

struct SweepOptions {
    std::vector<int> t_values;
    std::vector<Rational> eta_values;  // empty keeps the configured thresholds
    int runs = 0;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::size_t max_states = 2'000'000;
};

struct SweepRow {
    int t_max = 0;
    std::optional<Rational> eta;
    bool synthesis_ok = false;
    std::string error;
    std::size_t observer_states = 0;
    std::size_t info_states = 0;
    std::size_t initial_admissible = 0;
    std::size_t permissiveness_shared = 0;
    std::size_t max_live_admissible = 0;  // over supervised-reachable non-initial states with a live conflict
    std::size_t counts[5] = {0, 0, 0, 0, 0};
};

std::vector<SweepRow> sweep(const ScenarioConfig& base, const SweepOptions& opt);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// True iff no trace segment brings any vehicle pair into collision.
bool trace_pairwise_safe(const Model& model, const RunTrace& trace);

struct PairwiseReport {
    bool safe = true;
    std::vector<std::string> lines;
};

// Synthesizes and runs each conflicting pair's projected scenario for `runs` seeds.
PairwiseReport pairwise_check(const ScenarioConfig& sc, SupervisorKind kind, int runs);

}  // namespace rsc
