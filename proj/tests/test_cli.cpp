#include "support.hpp"

#include "rsc/config.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rsc;
using namespace rsc::test;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result cli(const std::string& args) {
    std::string cmd = std::string(RSC_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) r.output.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("rsc-cli-" + std::to_string(getpid()) + "-" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

const std::string kBase = R"(roads:
  - [9.5, 12.5]
  - [9.5, 12.5]
vehicles:
  - {road: 0, controlled: true, speeds: [1, 3]}
  - {road: 1, controlled: true, speeds: [1, 3]}
tau: 1
mu: 1
disturbance: [0, 1]
t_max: 1
x0:
  - [1, 1]
detector:
  bias: 0
  threshold: 0
)";

bool has_key(const std::vector<Diagnostic>& d, const std::string& key) {
    for (const auto& x : d)
        if (x.key.rfind(key, 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("shipped configs match the scenario builders") {
    LoadedScenario a = load_scenario(source_path("configs/two_vehicle.yaml"));
    CHECK(validate(a).empty());
    ScenarioConfig demo = verification::baseline_attack_demo();
    CHECK(canonical_text(a.scenario.plant) == canonical_text(demo.plant));
    CHECK(a.scenario.disturbance_script == demo.disturbance_script);
    CHECK(a.scenario.input_script == demo.input_script);

    LoadedScenario b = load_scenario(source_path("configs/two_vehicle_resilient.yaml"));
    CHECK(validate(b).empty());
    CHECK(config_fingerprint(b.scenario.plant) == config_fingerprint(verification::resilient_attack_demo().plant));
    CHECK(b.scenario.disturbance_script == verification::resilient_attack_demo().disturbance_script);
}

TEST_CASE("strict parsing") {
    CHECK_NOTHROW(parse_scenario(kBase));
    CHECK_THROWS_AS(parse_scenario(kBase + "colour: red\n"), ConfigError);
    CHECK_THROWS_AS(parse_scenario(kBase + "scenario:\n  sead: 3\n"), ConfigError);
    std::string bad_number = kBase;
    bad_number.replace(bad_number.find("tau: 1"), 6, "tau: one");
    CHECK_THROWS_AS(parse_scenario(bad_number), ConfigError);
    try {
        parse_scenario(kBase + "colour: red\n");
    } catch (const ConfigError& e) {
        REQUIRE_FALSE(e.diagnostics().empty());
        CHECK(e.diagnostics().front().line == 16);
    }
}

TEST_CASE("model assumptions are enforced") {
    LoadedScenario neg = load_scenario(source_path("configs/negative_control.yaml"));
    auto d = validate(neg);
    CHECK(has_key(d, "disturbance"));
    CHECK(has_key(validate(verification::negative_control()), "disturbance"));

    std::string inside = kBase;
    inside.replace(inside.find("[1, 1]"), 6, "[10, 11]");
    CHECK(has_key(validate(parse_scenario(inside)), "x0"));

    std::string slow = kBase;
    slow.replace(slow.find("disturbance: [0, 1]"), 19, "disturbance: [-1, 1]");
    CHECK_FALSE(validate(parse_scenario(slow)).empty());
}

TEST_CASE("yaml output parses back to the same scenario") {
    for (const ScenarioConfig& sc : {verification::baseline_attack_demo(), verification::reduced_instance()}) {
        LoadedScenario back = parse_scenario(to_yaml(sc));
        CHECK(canonical_text(back.scenario.plant) == canonical_text(sc.plant));
        CHECK(to_yaml(back.scenario) == to_yaml(sc));
    }
}

TEST_CASE("command line: validate and error exits") {
    CHECK(cli("validate --config " + source_path("configs/two_vehicle.yaml")).code == 0);
    Result neg = cli("validate --config " + source_path("configs/negative_control.yaml"));
    CHECK(neg.code == 1);
    CHECK(neg.output.find("disturbance") != std::string::npos);
    CHECK(cli("validate --config /nonexistent.yaml").code == 1);
    CHECK(cli("frobnicate").code == 1);
}

TEST_CASE("command line: synthesize, run and export") {
    fs::path out = scratch("flow");
    const std::string cfg = " --config " + source_path("configs/two_vehicle_resilient.yaml") + " --out " + out.string();

    Result missing = cli("run" + cfg);
    CHECK(missing.code == 1);
    CHECK(missing.output.find("rsc synthesize") != std::string::npos);

    REQUIRE(cli("synthesize" + cfg).code == 0);
    std::string first = slurp(out / "table-resilient.txt");
    REQUIRE(cli("synthesize" + cfg).code == 0);
    CHECK(slurp(out / "table-resilient.txt") == first);

    Result run = cli("run" + cfg);
    CHECK(run.code == 0);
    CHECK(run.output.find("outcome: SAFE_MARKED") != std::string::npos);
    CHECK(fs::exists(out / "trace-resilient-1.csv"));
    REQUIRE(cli("run --format text" + cfg).code == 0);
    CHECK(slurp(out / "trace-resilient-1.txt").find("outcome: SAFE_MARKED") != std::string::npos);

    CHECK(cli("run --tmax 2" + cfg).code == 1);

    REQUIRE(cli("export" + cfg).code == 0);
    CHECK(slurp(out / "observer-t1.txt") == slurp(source_path("tests/golden/observer-t1.txt")));

    fs::path base = scratch("baseline");
    const std::string bcfg = " --config " + source_path("configs/two_vehicle.yaml") + " --out " + base.string() +
                             " --supervisor baseline";
    REQUIRE(cli("synthesize" + bcfg).code == 0);
    CHECK(cli("run" + bcfg).output.find("outcome: COLLISION") != std::string::npos);
    fs::remove_all(out);
    fs::remove_all(base);
}

TEST_CASE("command line: a table without the visited state is a runtime fault") {
    fs::path out = scratch("fault");
    const std::string cfg = " --config " + source_path("configs/two_vehicle_resilient.yaml") + " --out " + out.string();
    REQUIRE(cli("synthesize" + cfg).code == 0);
    std::istringstream in(slurp(out / "table-resilient.txt"));
    std::ostringstream pruned;
    for (std::string line; std::getline(in, line);)
        if (line.rfind("state {(2,4),(2,5),(3,4),(3,5)} :", 0) != 0) pruned << line << "\n";
    std::ofstream(out / "table-resilient.txt", std::ios::binary) << pruned.str();
    Result r = cli("run" + cfg);
    CHECK(r.code == 2);
    CHECK(r.output.find("no entry for") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("command line: sweep and verify") {
    fs::path out = scratch("sweep");
    Result s = cli("sweep --format csv --tmax 1 4 --runs 5 --config " +
                   source_path("configs/two_vehicle_resilient.yaml") + " --out " + out.string());
    REQUIRE(s.code == 0);
    std::string text = slurp(out / "sweep.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
    CHECK(cli("verify --criterion 3").code == 0);
    fs::remove_all(out);
}
