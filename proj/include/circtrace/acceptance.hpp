#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ct {

struct AcceptanceOptions {
    std::uint64_t seed = 20261014;
    double tolerance_scale = 1.0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    double worst = 0.0;  // max residual / tolerance over all checks
    std::string detail;
    double seconds = 0.0;
};

constexpr int kCriteria = 12;

std::string criterion_title(int id);
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);
// "[PASS] 3 canonical trace ... worst 0.12 | detail"
std::string format_result(const CriterionResult& r);

}  // namespace ct
