#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rsc::verification {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0;
    double limit_seconds = 0;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    // Fills detail and returns whether every check held.
    std::function<bool(std::string&)> check;
};

const std::vector<Criterion>& criteria();

// Runs one criterion, timing it; exceptions count as failures. Exceeding the time limit fails.
CriterionResult run_criterion(const Criterion& c);
std::vector<CriterionResult> run_all();

// "criterion 3 [PASS] name (0.12 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace rsc::verification
