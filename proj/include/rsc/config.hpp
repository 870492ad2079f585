#pragma once

#include "rsc/sim.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsc {

struct Diagnostic {
    std::string key;
    std::string message;
    int line = 0;  // 1-based, 0 when unknown
};

std::string to_string(const Diagnostic& d);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

struct LoadedScenario {
    ScenarioConfig scenario;
    std::map<std::string, int> lines;  // config key path -> source line
};

// Strict parse: unknown keys, malformed numbers and wrong shapes raise ConfigError.
LoadedScenario parse_scenario(const std::string& yaml_text);
LoadedScenario load_scenario(const std::string& path);

// Model assumptions and scenario admissibility; empty when the config is usable.
std::vector<Diagnostic> validate(const ScenarioConfig& sc);
std::vector<Diagnostic> validate(const LoadedScenario& loaded);

// Serializes back to the accepted YAML schema.
std::string to_yaml(const ScenarioConfig& sc);

}  // namespace rsc
