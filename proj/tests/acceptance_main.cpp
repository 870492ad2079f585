#include "rsc/verification/criteria.hpp"

#include <iostream>

int main() {
    int failures = 0;
    for (const auto& c : rsc::verification::criteria()) {
        const auto r = rsc::verification::run_criterion(c);
        std::cout << rsc::verification::format_result(r) << std::endl;
        failures += r.passed ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
