#include "rsc/config.hpp"
#include "rsc/verification/criteria.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace rsc;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kRuntime = 2, kVerify = 3 };

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::string supervisor = "resilient";
    std::vector<int> tmax;
    std::vector<std::string> eta;
    std::string format = "csv";
    std::string table;
    int runs = 100;
    std::vector<int> criteria;
};

// Thrown for user-facing failures that map to exit code 1.
struct Invalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ScenarioConfig load(const Options& o, bool apply_overrides = true) {
    LoadedScenario loaded = load_scenario(o.config);
    if (apply_overrides) {
        if (o.tmax.size() > 1) throw Invalid("--tmax takes a single value for this command");
        if (o.eta.size() > 1) throw Invalid("--eta takes a single value for this command");
        if (!o.tmax.empty()) loaded.scenario.plant.t_max = o.tmax.front();
        if (!o.eta.empty())
            for (auto& t : loaded.scenario.plant.detector.threshold) t = parse_rational(o.eta.front());
    }
    if (o.seed) loaded.scenario.seed = *o.seed;
    auto diags = validate(loaded);
    if (!diags.empty()) throw ConfigError(std::move(diags));
    return loaded.scenario;
}

fs::path output_dir(const Options& o) {
    fs::path dir(o.out);
    fs::create_directories(dir);
    return dir;
}

fs::path table_path(const Options& o, SupervisorKind kind) {
    if (!o.table.empty()) return o.table;
    return fs::path(o.out) / ("table-" + to_string(kind) + ".txt");
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
}

int cmd_validate(const Options& o) {
    ScenarioConfig sc = load(o);
    std::cout << o.config << ": valid (fingerprint " << config_fingerprint(sc.plant) << ")\n";
    return kOk;
}

int cmd_synthesize(const Options& o) {
    ScenarioConfig sc = load(o);
    const SupervisorKind kind = parse_supervisor_kind(o.supervisor);
    const Model model(sc.plant);
    std::size_t observer_states = 0;
    SupervisorTable table;
    if (kind == SupervisorKind::Baseline) {
        table = baseline_supervisor(model);
    } else {
        ObserverAutomaton obs = build_observer(model, {sc.plant.t_max});
        observer_states = obs.states.size();
        table = synthesize(model, obs);
    }
    std::ostringstream text;
    write_table(text, model, table);
    const fs::path path = table_path(o, kind);
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    write_file(path, text.str());

    std::map<std::size_t, std::size_t> histogram;
    for (const auto& [k, v] : table.admissible) ++histogram[v.size()];
    std::cout << "supervisor: " << to_string(kind) << "\n"
              << "t_max: " << table.t_max << "\n";
    if (kind == SupervisorKind::Resilient) std::cout << "observer states: " << observer_states << "\n";
    std::cout << "table states: " << table.admissible.size() << "\n"
              << "permissiveness: " << table.permissiveness() << "\n"
              << "admissible-set sizes:";
    for (const auto& [size, count] : histogram) std::cout << " " << size << "x" << count;
    std::cout << "\nstatus: " << (table.success ? "ok" : "failed (initial state pruned)") << "\n"
              << "written: " << path.string() << "\n";
    return table.success ? kOk : kInvalid;
}

void write_trace_text(std::ostream& os, const Model& model, const RunTrace& t) {
    for (const auto& r : t.steps) {
        os << "step " << r.step << ": x=" << to_string(r.x) << " measured=" << to_string(r.measured);
        if (r.attacked) os << " (attacked)";
        os << " C=(";
        for (std::size_t i = 0; i < r.C.size(); ++i) os << (i ? "," : "") << to_string(r.C[i]);
        os << ")";
        if (r.info) os << " info=" << to_string(*r.info);
        os << " admissible={";
        for (std::size_t i = 0; i < r.admissible.size(); ++i)
            os << (i ? "," : "") << model.action_label(model.actions()[r.admissible[i]]);
        os << "}";
        if (r.chosen) os << " chosen=" << model.action_label(model.actions()[*r.chosen]);
        if (r.script_overridden) os << " (script not admissible)";
        os << "\n";
    }
    os << "outcome: " << to_string(t.outcome) << "\n";
}

int cmd_run(const Options& o) {
    ScenarioConfig sc = load(o);
    const SupervisorKind kind = parse_supervisor_kind(o.supervisor);
    const Model model(sc.plant);
    const fs::path tp = table_path(o, kind);
    std::ifstream in(tp);
    if (!in)
        throw Invalid("no supervisor table at " + tp.string() + "; run `rsc synthesize --config " + o.config +
                      " --out " + o.out + " --supervisor " + to_string(kind) + "` first");
    SupervisorTable table;
    try {
        table = read_table(in, model);
    } catch (const std::invalid_argument& e) {
        throw Invalid(tp.string() + ": " + e.what() + "; synthesize again with the same config and flags");
    }
    if (table.kind != kind) throw Invalid(tp.string() + " holds a " + to_string(table.kind) + " table");
    if (!table.success) throw Invalid(tp.string() + " records a failed synthesis");

    const RunTrace trace = run_scenario(model, sc, table);
    std::ostringstream text;
    const bool csv = o.format == "csv";
    if (csv)
        write_trace_csv(text, model, trace);
    else
        write_trace_text(text, model, trace);
    const fs::path path =
        output_dir(o) / ("trace-" + to_string(kind) + "-" + std::to_string(sc.seed) + (csv ? ".csv" : ".txt"));
    write_file(path, text.str());
    std::cout << "outcome: " << to_string(trace.outcome) << "\nsteps: " << trace.steps.size() - 1
              << "\nwritten: " << path.string() << "\n";
    return kOk;
}

int cmd_sweep(const Options& o) {
    ScenarioConfig sc = load(o, false);
    SweepOptions opt;
    opt.t_values = o.tmax;
    if (opt.t_values.empty())
        for (int t = 1; t <= 12; ++t) opt.t_values.push_back(t);
    for (const auto& e : o.eta) opt.eta_values.push_back(parse_rational(e));
    opt.runs = o.runs;
    opt.seed = sc.seed;
    opt.workers = worker_count();
    const auto rows = sweep(sc, opt);

    std::ostringstream text;
    const bool csv = o.format == "csv";
    if (csv) {
        write_sweep_csv(text, rows);
    } else {
        for (const auto& r : rows) {
            text << "t_max=" << r.t_max << " eta=" << (r.eta ? to_string(*r.eta) : "config")
                 << " synthesis=" << (r.synthesis_ok ? "ok" : "failed") << " observer_states=" << r.observer_states
                 << " info_states=" << r.info_states << " shared_permissiveness=" << r.permissiveness_shared
                 << " max_live_admissible=" << r.max_live_admissible;
            for (int k = 0; k < 5; ++k) text << " " << to_string(static_cast<Outcome>(k)) << "=" << r.counts[k];
            if (!r.error.empty()) text << " error=\"" << r.error << "\"";
            text << "\n";
        }
    }
    const fs::path path = output_dir(o) / (csv ? "sweep.csv" : "sweep.txt");
    write_file(path, text.str());
    std::cout << text.str() << "written: " << path.string() << "\n";
    return kOk;
}

int cmd_verify(const Options& o) {
    int failures = 0;
    for (const auto& c : verification::criteria()) {
        if (!o.criteria.empty() && std::find(o.criteria.begin(), o.criteria.end(), c.id) == o.criteria.end())
            continue;
        const auto r = verification::run_criterion(c);
        std::cout << verification::format_result(r) << std::endl;
        failures += r.passed ? 0 : 1;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << "\n";
    return failures ? kVerify : kOk;
}

int cmd_export(const Options& o) {
    ScenarioConfig sc = load(o);
    const Model model(sc.plant);
    const ObserverAutomaton obs = build_observer(model, {sc.plant.t_max});
    std::ostringstream text;
    const bool csv = o.format == "csv";
    if (csv) {
        text << "source,action,measured,target,source_info,target_info\n";
        for (std::size_t id = 0; id < obs.states.size(); ++id)
            for (const auto& e : obs.edges[id])
                text << id << "," << model.action_label(model.actions()[e.action]) << ",\"" << to_string(e.measured)
                     << "\"," << e.target << ",\"" << to_string(obs.states[id].info) << "\",\""
                     << to_string(obs.states[e.target].info) << "\"\n";
    } else {
        write_observer(text, model, obs);
    }
    const fs::path path =
        output_dir(o) / ("observer-t" + std::to_string(sc.plant.t_max) + (csv ? ".csv" : ".txt"));
    write_file(path, text.str());
    std::cout << "observer states: " << obs.states.size() << "\nwritten: " << path.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resilient supervisory control of an autonomous intersection"};
    app.require_subcommand(1);
    Options o;

    auto add_config = [&](CLI::App* c) { c->add_option("--config", o.config, "scenario YAML file")->required(); };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "output directory")->capture_default_str(); };
    auto add_kind = [&](CLI::App* c) {
        c->add_option("--supervisor", o.supervisor, "baseline or resilient")
            ->check(CLI::IsMember({"baseline", "resilient"}))
            ->capture_default_str();
    };
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "override scenario.seed"); };
    auto add_tmax = [&](CLI::App* c, const char* help) { c->add_option("--tmax", o.tmax, help); };
    auto add_eta = [&](CLI::App* c, const char* help) { c->add_option("--eta", o.eta, help); };

    auto* validate_cmd = app.add_subcommand("validate", "check a config against the model assumptions");
    add_config(validate_cmd);
    add_tmax(validate_cmd, "override t_max");
    add_eta(validate_cmd, "override every detector threshold");

    auto* synth = app.add_subcommand("synthesize", "synthesize a supervisor table");
    add_config(synth);
    add_out(synth);
    add_kind(synth);
    add_tmax(synth, "override t_max");
    add_eta(synth, "override every detector threshold");
    synth->add_option("--table", o.table, "table file path (default OUT/table-KIND.txt)");

    auto* run = app.add_subcommand("run", "simulate the scenario under a synthesized table");
    add_config(run);
    add_out(run);
    add_kind(run);
    add_seed(run);
    add_tmax(run, "override t_max (must match the table)");
    add_eta(run, "override every detector threshold (must match the table)");
    add_format(run);
    run->add_option("--table", o.table, "table file path (default OUT/table-KIND.txt)");

    auto* sweep_cmd = app.add_subcommand("sweep", "synthesize and simulate over t_max and threshold grids");
    add_config(sweep_cmd);
    add_out(sweep_cmd);
    add_seed(sweep_cmd);
    add_tmax(sweep_cmd, "t_max values (default 1..12)");
    add_eta(sweep_cmd, "threshold values (default: as configured)");
    add_format(sweep_cmd);
    sweep_cmd->add_option("--runs", o.runs, "random runs per grid point")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
    verify->add_option("--criterion", o.criteria, "only these criterion ids");

    auto* exp = app.add_subcommand("export", "write the observer automaton");
    add_config(exp);
    add_out(exp);
    add_tmax(exp, "override t_max");
    add_eta(exp, "override every detector threshold");
    exp->add_option("--format", o.format, "text or csv")->check(CLI::IsMember({"csv", "text"}))->default_str("text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }
    if (exp->parsed() && exp->count("--format") == 0) o.format = "text";

    try {
        if (validate_cmd->parsed()) return cmd_validate(o);
        if (synth->parsed()) return cmd_synthesize(o);
        if (run->parsed()) return cmd_run(o);
        if (sweep_cmd->parsed()) return cmd_sweep(o);
        if (verify->parsed()) return cmd_verify(o);
        if (exp->parsed()) return cmd_export(o);
    } catch (const ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << o.config << ": " << to_string(d) << "\n";
        return kInvalid;
    } catch (const Invalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const ContractViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const RuntimeFault& e) {
        std::cerr << "runtime fault: " << e.what() << "\n";
        return kRuntime;
    } catch (const InternalFault& e) {
        std::cerr << "internal fault: " << e.what() << "\n";
        return kRuntime;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kInvalid;
}
