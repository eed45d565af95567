#pragma once

#include "circtrace/geomforms.hpp"
#include "circtrace/json_io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ct {

struct RunOptions {
    std::uint64_t seed = 20261014;
    double tolerance_scale = 1.0;
    std::string out_dir;  // empty: no report files
};

struct ScenarioReport {
    Json summary;
    std::string csv;  // grid values of the computed forms (geometry kinds), else empty
    bool pass = false;
};

// Built-in operators and weights; unknown ids raise InputError.
DiscreteOp builtin_operator(const std::string& id);
std::vector<std::string> builtin_operator_ids();
Weight builtin_weight(const std::string& id);

// kinds: trace, defect, kv, chern, grassmann, freed, super.  Unknown keys and unresolved ids raise InputError.
ScenarioReport run_scenario(const Json& doc, const std::string& base_dir, const RunOptions& opt,
                            const std::string& name = "scenario");
ScenarioReport run_scenario_file(const std::string& path, const RunOptions& opt);
// writes <out_dir>/<name>.json and, when present, <name>.csv
void write_report(const ScenarioReport& r, const std::string& out_dir, const std::string& name);

}  // namespace ct
