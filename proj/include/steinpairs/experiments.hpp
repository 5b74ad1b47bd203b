#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace steinpairs {

// Flat key = value configuration for one experiment run. Values are kept as
// validated strings; typed accessors reparse on demand.
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, std::string> values;  // resolved, defaults filled

    bool has(const std::string& key) const { return values.count(key) != 0; }
    long long get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_seed() const;
    std::string get_string(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;
};

// Parses a "key = value" document (one pair per line, '#' comments). Unknown
// keys are rejected; missing required keys and type mismatches raise errors
// naming the key and line.
ExperimentConfig parse_config(const std::string& text);

struct ExperimentResult {
    nlohmann::json report;  // deterministic for fixed seed and worker count
    bool pass = true;       // acceptance predicate of the experiment
    double wall_seconds = 0.0;  // measured; not part of the report
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string report_to_string(const nlohmann::json& report);
void emit_report(const nlohmann::json& report, const std::string& path);

// CSV extraction of the report's tabular section ("table": {columns, rows});
// empty string when the report has none.
std::string report_csv(const nlohmann::json& report);

}  // namespace steinpairs
