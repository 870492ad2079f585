#include "rsc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace rsc {

std::string to_string(const Diagnostic& d) {
    std::string s = d.line > 0 ? "line " + std::to_string(d.line) + ": " : "";
    return s + d.key + ": " + d.message;
}

namespace {

std::string join(const std::vector<Diagnostic>& diags) {
    std::string s;
    for (const auto& d : diags) s += (s.empty() ? "" : "\n") + to_string(d);
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<Diagnostic> diags) : std::runtime_error(join(diags)), diags_(std::move(diags)) {}

namespace {

class Reader {
public:
    std::map<std::string, int> lines;

    [[noreturn]] void fail(const std::string& key, const YAML::Node& n, const std::string& msg) const {
        throw ConfigError({{key, msg, n.Mark().is_null() ? 0 : n.Mark().line + 1}});
    }

    void mark(const std::string& key, const YAML::Node& n) {
        if (!n.Mark().is_null()) lines.emplace(key, n.Mark().line + 1);
    }

    void only_keys(const std::string& key, const YAML::Node& n, std::initializer_list<const char*> allowed) {
        if (!n.IsMap()) fail(key, n, "expected a mapping");
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : n) {
            auto k = kv.first.as<std::string>();
            if (!ok.count(k)) {
                std::string list;
                for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
                fail(key.empty() ? k : key + "." + k, kv.first, "unknown key (allowed: " + list + ")");
            }
        }
    }

    Rational number(const std::string& key, const YAML::Node& n) {
        mark(key, n);
        if (!n.IsScalar()) fail(key, n, "expected a number");
        try {
            return parse_rational(n.Scalar());
        } catch (const std::exception& e) {
            fail(key, n, e.what());
        }
    }

    std::int64_t integer(const std::string& key, const YAML::Node& n) {
        Rational r = number(key, n);
        if (r.denominator() != 1) fail(key, n, "expected an integer, got " + to_string(r));
        return r.numerator();
    }

    bool boolean(const std::string& key, const YAML::Node& n) {
        mark(key, n);
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            fail(key, n, "expected true or false");
        }
    }

    std::string text(const std::string& key, const YAML::Node& n) {
        mark(key, n);
        if (!n.IsScalar()) fail(key, n, "expected a string");
        return n.Scalar();
    }

    const YAML::Node& sequence(const std::string& key, const YAML::Node& n) {
        mark(key, n);
        if (!n.IsSequence()) fail(key, n, "expected a list");
        return n;
    }

    std::vector<Rational> numbers(const std::string& key, const YAML::Node& n) {
        std::vector<Rational> out;
        std::size_t i = 0;
        for (const auto& e : sequence(key, n)) out.push_back(number(key + "[" + std::to_string(i++) + "]", e));
        return out;
    }

    std::pair<Rational, Rational> pair(const std::string& key, const YAML::Node& n) {
        auto v = numbers(key, n);
        if (v.size() != 2) fail(key, n, "expected [lower, upper]");
        return {v[0], v[1]};
    }

    // scalar applies to every vehicle
    std::vector<Rational> per_vehicle(const std::string& key, const YAML::Node& n, std::size_t count) {
        if (n.IsScalar()) return std::vector<Rational>(count, number(key, n));
        auto v = numbers(key, n);
        if (v.size() != count) fail(key, n, "expected one value per vehicle (" + std::to_string(count) + ")");
        return v;
    }
};

Action speeds_to_action(Reader& rd, const std::string& key, const YAML::Node& n, const Rational& mu) {
    Action a;
    auto v = rd.numbers(key, n);
    for (const auto& s : v) {
        Rational steps = s / mu;
        if (steps.denominator() != 1) rd.fail(key, n, "speed " + to_string(s) + " is not a multiple of mu");
        a.steps.push_back(steps.numerator());
    }
    return a;
}

}  // namespace

LoadedScenario parse_scenario(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({{"<document>", e.msg, e.mark.is_null() ? 0 : e.mark.line + 1}});
    }
    Reader rd;
    rd.only_keys("", root, {"roads", "vehicles", "gap", "tau", "mu", "disturbance", "t_max", "x0", "detector",
                            "scale", "scenario"});
    for (const char* req : {"roads", "vehicles", "tau", "mu", "disturbance", "x0"})
        if (!root[req]) throw ConfigError({{req, "required key is missing", 0}});

    LoadedScenario out;
    ScenarioConfig& sc = out.scenario;
    IntersectionConfig& cfg = sc.plant;

    std::size_t idx = 0;
    for (const auto& r : rd.sequence("roads", root["roads"])) {
        std::string key = "roads[" + std::to_string(idx++) + "]";
        if (r.IsMap()) {
            rd.only_keys(key, r, {"entry", "exit"});
            if (!r["entry"] || !r["exit"]) rd.fail(key, r, "needs entry and exit");
            cfg.roads.push_back({rd.number(key + ".entry", r["entry"]), rd.number(key + ".exit", r["exit"])});
        } else {
            auto [a, b] = rd.pair(key, r);
            cfg.roads.push_back({a, b});
        }
    }
    cfg.tau = rd.number("tau", root["tau"]);
    cfg.mu = rd.number("mu", root["mu"]);
    idx = 0;
    for (const auto& v : rd.sequence("vehicles", root["vehicles"])) {
        std::string key = "vehicles[" + std::to_string(idx++) + "]";
        rd.only_keys(key, v, {"road", "controlled", "speeds", "speed_range"});
        rd.mark(key, v);
        VehicleSpec spec;
        if (!v["road"]) rd.fail(key, v, "needs a road index");
        std::int64_t road = rd.integer(key + ".road", v["road"]);
        if (road < 0) rd.fail(key + ".road", v["road"], "road index must be nonnegative");
        spec.road = static_cast<std::size_t>(road);
        spec.controlled = v["controlled"] ? rd.boolean(key + ".controlled", v["controlled"]) : true;
        if (v["speeds"] && v["speed_range"]) rd.fail(key, v, "give either speeds or speed_range, not both");
        if (v["speeds"]) {
            std::size_t j = 0;
            for (const auto& s : rd.sequence(key + ".speeds", v["speeds"]))
                spec.speed_steps.push_back(rd.integer(key + ".speeds[" + std::to_string(j++) + "]", s));
        } else if (v["speed_range"]) {
            auto [a, b] = rd.pair(key + ".speed_range", v["speed_range"]);
            if (a.denominator() != 1 || b.denominator() != 1)
                rd.fail(key + ".speed_range", v["speed_range"], "bounds are integer multiples of mu");
            if (b < a) rd.fail(key + ".speed_range", v["speed_range"], "requires a <= b");
            for (auto s = a.numerator(); s <= b.numerator(); ++s) spec.speed_steps.push_back(s);
        } else {
            rd.fail(key, v, "needs speeds or speed_range");
        }
        cfg.vehicles.push_back(std::move(spec));
    }
    const std::size_t n = cfg.vehicles.size();
    cfg.gap = root["gap"] ? rd.number("gap", root["gap"]) : Rational(0);
    auto [dmin, dmax] = rd.pair("disturbance", root["disturbance"]);
    cfg.d_min = dmin;
    cfg.d_max = dmax;
    cfg.t_max = root["t_max"] ? static_cast<int>(rd.integer("t_max", root["t_max"])) : 0;
    cfg.scale = root["scale"] ? rd.integer("scale", root["scale"]) : 1000;

    std::vector<Box> boxes;
    idx = 0;
    for (const auto& b : rd.sequence("x0", root["x0"])) {
        std::string key = "x0[" + std::to_string(idx++) + "]";
        std::vector<Interval> dims;
        std::size_t j = 0;
        for (const auto& e : rd.sequence(key, b)) {
            std::string ek = key + "[" + std::to_string(j++) + "]";
            if (e.IsScalar()) {
                Rational v = rd.number(ek, e);
                dims.push_back({v, v});
            } else {
                auto [lo, hi] = rd.pair(ek, e);
                dims.push_back({lo, hi});
            }
        }
        if (dims.size() != n) rd.fail(key, b, "expected one entry per vehicle (" + std::to_string(n) + ")");
        for (const auto& d : dims)
            if (d.empty()) rd.fail(key, b, "interval with lower bound above upper bound");
        boxes.push_back(Box(std::move(dims)));
    }
    cfg.x0 = BoxUnion(n, std::move(boxes));

    cfg.detector.bias.assign(n, cfg.cell_width() / 10);
    cfg.detector.threshold.assign(n, Rational(0));
    if (const auto d = root["detector"]) {
        rd.only_keys("detector", d, {"bias", "threshold"});
        if (d["bias"]) cfg.detector.bias = rd.per_vehicle("detector.bias", d["bias"], n);
        if (d["threshold"]) cfg.detector.threshold = rd.per_vehicle("detector.threshold", d["threshold"], n);
    }

    if (const auto s = root["scenario"]) {
        rd.only_keys("scenario", s,
                     {"seed", "horizon", "initial_state", "disturbance", "disturbance_script", "input_policy",
                      "input_script", "uncontrolled_script", "attacks"});
        if (s["seed"]) sc.seed = static_cast<std::uint64_t>(rd.integer("scenario.seed", s["seed"]));
        if (s["horizon"]) sc.horizon = static_cast<int>(rd.integer("scenario.horizon", s["horizon"]));
        if (s["initial_state"]) sc.initial_state = StateVec(rd.numbers("scenario.initial_state", s["initial_state"]));
        if (s["disturbance"]) {
            auto p = rd.text("scenario.disturbance", s["disturbance"]);
            if (p == "uniform") sc.disturbance = DisturbancePolicy::Uniform;
            else if (p == "corners") sc.disturbance = DisturbancePolicy::Corners;
            else if (p == "zero") sc.disturbance = DisturbancePolicy::Zero;
            else rd.fail("scenario.disturbance", s["disturbance"], "expected uniform, corners or zero");
        }
        if (s["disturbance_script"]) {
            std::size_t j = 0;
            for (const auto& row : rd.sequence("scenario.disturbance_script", s["disturbance_script"]))
                sc.disturbance_script.push_back(
                    rd.numbers("scenario.disturbance_script[" + std::to_string(j++) + "]", row));
        }
        if (s["input_policy"]) {
            auto p = rd.text("scenario.input_policy", s["input_policy"]);
            if (p == "first") sc.input_policy = InputPolicy::First;
            else if (p == "random") sc.input_policy = InputPolicy::Random;
            else if (p == "scripted") sc.input_policy = InputPolicy::Scripted;
            else rd.fail("scenario.input_policy", s["input_policy"], "expected first, random or scripted");
        }
        if (s["input_script"]) {
            std::size_t j = 0;
            for (const auto& row : rd.sequence("scenario.input_script", s["input_script"]))
                sc.input_script.push_back(
                    speeds_to_action(rd, "scenario.input_script[" + std::to_string(j++) + "]", row, cfg.mu));
        }
        if (s["uncontrolled_script"]) {
            std::size_t j = 0;
            for (const auto& row : rd.sequence("scenario.uncontrolled_script", s["uncontrolled_script"]))
                sc.uncontrolled_script.push_back(
                    speeds_to_action(rd, "scenario.uncontrolled_script[" + std::to_string(j++) + "]", row, cfg.mu)
                        .steps);
        }
        if (s["attacks"]) {
            std::size_t j = 0;
            for (const auto& a : rd.sequence("scenario.attacks", s["attacks"])) {
                std::string key = "scenario.attacks[" + std::to_string(j++) + "]";
                rd.only_keys(key, a, {"targets", "start", "end", "strategy", "sign", "offset", "trace"});
                AttackPlan p;
                if (!a["targets"] || !a["start"] || !a["end"]) rd.fail(key, a, "needs targets, start and end");
                std::size_t t = 0;
                for (const auto& v : rd.sequence(key + ".targets", a["targets"])) {
                    auto tv = rd.integer(key + ".targets[" + std::to_string(t++) + "]", v);
                    if (tv < 0) rd.fail(key + ".targets", v, "vehicle index must be nonnegative");
                    p.targets.push_back(static_cast<std::size_t>(tv));
                }
                p.start = static_cast<int>(rd.integer(key + ".start", a["start"]));
                p.end = static_cast<int>(rd.integer(key + ".end", a["end"]));
                if (a["strategy"]) {
                    try {
                        p.strategy = parse_attack_strategy(rd.text(key + ".strategy", a["strategy"]));
                    } catch (const std::invalid_argument& e) {
                        rd.fail(key + ".strategy", a["strategy"], e.what());
                    }
                }
                if (a["sign"]) p.sign = static_cast<int>(rd.integer(key + ".sign", a["sign"]));
                if (a["offset"]) p.offset = rd.per_vehicle(key + ".offset", a["offset"], p.targets.size());
                if (a["trace"]) {
                    std::size_t r = 0;
                    for (const auto& row : rd.sequence(key + ".trace", a["trace"]))
                        p.trace.push_back(rd.numbers(key + ".trace[" + std::to_string(r++) + "]", row));
                }
                sc.attacks.push_back(std::move(p));
            }
        }
    }
    out.lines = std::move(rd.lines);
    return out;
}

LoadedScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{path, "cannot open file", 0}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

bool box_meets_bad_set(const IntersectionConfig& cfg, const Box& b) {
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.size(); ++j) {
            const Road& ri = cfg.roads[cfg.vehicles[i].road];
            const Road& rj = cfg.roads[cfg.vehicles[j].road];
            if (cfg.vehicles[i].road != cfg.vehicles[j].road) {
                bool hi = !(b[i].hi < ri.entry || ri.exit < b[i].lo);
                bool hj = !(b[j].hi < rj.entry || rj.exit < b[j].lo);
                if (hi && hj) return true;
            } else {
                if (ri.exit < b[i].lo || ri.exit < b[j].lo) continue;
                Interval a{b[i].lo, rmin(b[i].hi, ri.exit)}, c{b[j].lo, rmin(b[j].hi, ri.exit)};
                Rational dist = rmax(Rational(0), rmax(a.lo - c.hi, c.lo - a.hi));
                if (dist < cfg.gap) return true;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<Diagnostic> validate(const ScenarioConfig& sc) {
    std::vector<Diagnostic> d;
    const auto& cfg = sc.plant;
    auto add = [&](std::string key, std::string msg) { d.push_back({std::move(key), std::move(msg), 0}); };
    const std::size_t n = cfg.size();
    if (n == 0) add("vehicles", "at least one vehicle is required");
    if (!(cfg.tau > 0)) add("tau", "step length must be positive");
    if (!(cfg.mu > 0)) add("mu", "grid pitch must be positive");
    if (cfg.gap < 0) add("gap", "same-road gap must be nonnegative");
    if (cfg.t_max < 0) add("t_max", "maximum attack duration must be nonnegative");
    if (cfg.scale < 1) add("scale", "exactness scale must be at least 1");
    if (cfg.d_max < cfg.d_min) add("disturbance", "requires d_min <= d_max");
    for (std::size_t l = 0; l < cfg.roads.size(); ++l)
        if (!(cfg.roads[l].entry < cfg.roads[l].exit))
            add("roads[" + std::to_string(l) + "]", "conflict interval needs entry < exit");
    if (!d.empty()) return d;

    const Rational g = cfg.cell_width();
    if (!is_multiple_of(cfg.delta_min(), g) || !is_multiple_of(cfg.delta_max(), g))
        add("disturbance", "d_min*tau = " + to_string(cfg.delta_min()) + " and d_max*tau = " +
                               to_string(cfg.delta_max()) + " must be integer multiples of tau*mu = " + to_string(g) +
                               " for the cell abstraction to be exact");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = cfg.vehicles[i];
        std::string key = "vehicles[" + std::to_string(i) + "]";
        if (v.road >= cfg.roads.size()) add(key + ".road", "no road with index " + std::to_string(v.road));
        if (v.speed_steps.empty()) {
            add(key + ".speeds", "speed grid is empty");
            continue;
        }
        auto vmin = *std::min_element(v.speed_steps.begin(), v.speed_steps.end());
        if (cfg.mu * vmin + cfg.d_min < cfg.mu)
            add(key + ".speeds", "v_min + d_min = " + to_string(cfg.mu * vmin + cfg.d_min) +
                                     " is below mu; every vehicle must advance at least mu per unit time");
    }
    if (cfg.detector.bias.size() != n) add("detector.bias", "expected one value per vehicle");
    if (cfg.detector.threshold.size() != n) add("detector.threshold", "expected one value per vehicle");
    for (std::size_t i = 0; i < cfg.detector.bias.size(); ++i)
        if (cfg.detector.bias[i] < 0) add("detector.bias", "bias must be nonnegative");
    for (std::size_t i = 0; i < cfg.detector.threshold.size(); ++i)
        if (cfg.detector.threshold[i] < 0) add("detector.threshold", "threshold must be nonnegative");
    if (cfg.x0.empty()) add("x0", "initial set is empty");
    if (cfg.x0.dim() != n) add("x0", "initial boxes need one entry per vehicle");
    if (!d.empty()) return d;

    for (std::size_t b = 0; b < cfg.x0.boxes().size(); ++b)
        if (box_meets_bad_set(cfg, cfg.x0.boxes()[b]))
            add("x0", "initial box " + to_string(cfg.x0.boxes()[b]) + " intersects the bad set");
    if (!d.empty()) return d;

    Model model(cfg);
    for (auto& e : check_scenario(model, sc)) add("scenario", std::move(e));
    return d;
}

std::vector<Diagnostic> validate(const LoadedScenario& loaded) {
    auto d = validate(loaded.scenario);
    for (auto& diag : d) {
        auto it = loaded.lines.lower_bound(diag.key);
        if (it != loaded.lines.end() && it->first.rfind(diag.key, 0) == 0) diag.line = it->second;
    }
    return d;
}

std::string to_yaml(const ScenarioConfig& sc) {
    const auto& cfg = sc.plant;
    std::ostringstream os;
    auto list = [&](const std::vector<Rational>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
        return s + "]";
    };
    os << "roads:\n";
    for (const auto& r : cfg.roads) os << "  - [" << to_string(r.entry) << ", " << to_string(r.exit) << "]\n";
    os << "vehicles:\n";
    for (const auto& v : cfg.vehicles) {
        os << "  - {road: " << v.road << ", controlled: " << (v.controlled ? "true" : "false") << ", speeds: [";
        for (std::size_t k = 0; k < v.speed_steps.size(); ++k) os << (k ? ", " : "") << v.speed_steps[k];
        os << "]}\n";
    }
    os << "gap: " << to_string(cfg.gap) << "\ntau: " << to_string(cfg.tau) << "\nmu: " << to_string(cfg.mu) << "\n";
    os << "disturbance: [" << to_string(cfg.d_min) << ", " << to_string(cfg.d_max) << "]\n";
    os << "t_max: " << cfg.t_max << "\nscale: " << cfg.scale << "\nx0:\n";
    for (const auto& b : cfg.x0.boxes()) {
        os << "  - [";
        for (std::size_t i = 0; i < b.size(); ++i)
            os << (i ? ", " : "") << "[" << to_string(b[i].lo) << ", " << to_string(b[i].hi) << "]";
        os << "]\n";
    }
    os << "detector:\n  bias: " << list(cfg.detector.bias) << "\n  threshold: " << list(cfg.detector.threshold) << "\n";
    return os.str();
}

}  // namespace rsc
