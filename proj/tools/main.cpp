#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "steinpairs/experiments.hpp"
#include "steinpairs/version.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string csv_path;
    std::string seed;
    std::string threads;
    std::string samples;
    std::vector<std::string> params;
    std::string theorem;                        // bound positional
    std::map<std::string, std::string> direct;  // per-subcommand key flags
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string key_of_line(const std::string& line) {
    std::string body = line.substr(0, line.find('#'));
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) return "";
    std::string key = body.substr(0, eq);
    const std::size_t b = key.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const std::size_t e = key.find_last_not_of(" \t");
    return key.substr(b, e - b + 1);
}

// Builds the final config text: experiment line, file lines not overridden,
// then command line overrides.
std::string merge_config(const std::string& experiment, const std::string& file_text,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ostringstream out;
    out << "experiment = " << experiment << "\n";
    std::istringstream in(file_text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string key = key_of_line(line);
        if (key.empty()) continue;
        if (key == "experiment") continue;
        bool overridden = false;
        for (const auto& [k, v] : overrides) overridden = overridden || k == key;
        if (!overridden) out << line << "\n";
    }
    for (const auto& [k, v] : overrides) out << k << " = " << v << "\n";
    return out.str();
}

int run(const std::string& experiment, const CliOptions& opt) {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!opt.seed.empty()) overrides.emplace_back("seed", opt.seed);
    if (!opt.threads.empty()) overrides.emplace_back("threads", opt.threads);
    if (!opt.samples.empty()) overrides.emplace_back("samples", opt.samples);
    if (!opt.theorem.empty()) overrides.emplace_back("theorem", opt.theorem);
    for (const auto& [key, value] : opt.direct)
        if (!value.empty()) overrides.emplace_back(key, value);
    for (const auto& p : opt.params) {
        const std::size_t eq = p.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--param expects key=value, got '" + p + "'");
        overrides.emplace_back(p.substr(0, eq), p.substr(eq + 1));
    }

    const std::string file_text = opt.config_path.empty() ? "" : read_file(opt.config_path);
    const std::string text = merge_config(experiment, file_text, overrides);

    const steinpairs::ExperimentConfig cfg = steinpairs::parse_config(text);
    const steinpairs::ExperimentResult result = steinpairs::run_experiment(cfg);

    steinpairs::emit_report(result.report, opt.out_path);
    if (!opt.csv_path.empty()) {
        const std::string csv = steinpairs::report_csv(result.report);
        std::ofstream out(opt.csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + opt.csv_path + "' for writing");
        out << csv;
    }
    std::cerr << experiment << ": " << (result.pass ? "pass" : "FAIL") << " ("
              << result.wall_seconds << " s)\n";
    return result.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exchangeable-pair normal approximation toolkit"};
    app.set_version_flag("--version", steinpairs::kVersion);
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {"haar-check", "pair-audit", "bound",
                                                  "stein-check", "w1-compare", "diag-example"};
    std::map<std::string, CliOptions> options;
    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(name, "");
        CliOptions& opt = options[name];
        sub->add_option("--config", opt.config_path, "key = value config file");
        sub->add_option("--out", opt.out_path, "report output path (default stdout)");
        sub->add_option("--csv", opt.csv_path, "also write the tabular section as CSV");
        sub->add_option("--seed", opt.seed, "RNG seed (u64)");
        sub->add_option("--threads", opt.threads, "worker threads");
        sub->add_option("--samples", opt.samples, "Monte Carlo sample count");
        sub->add_option("-p,--param", opt.params, "extra key=value parameter")->take_all();
        if (name == "bound") sub->add_option("theorem", opt.theorem, "theorem id");

        auto add_key = [&](const char* key) {
            opt.direct[key];
            sub->add_option("--" + std::string(key), opt.direct[key], "");
        };
        if (name == "haar-check") add_key("query");
        if (name == "pair-audit")
            for (const char* key : {"model", "k", "n", "epsilon", "epsilon2", "y"}) add_key(key);
        if (name == "stein-check")
            for (const char* key : {"g", "k", "nodes", "points"}) add_key(key);
        if (name == "w1-compare")
            for (const char* key : {"n", "k", "m", "reps", "directions"}) add_key(key);
        if (name == "diag-example")
            for (const char* key : {"a", "n", "m", "reps", "directions"}) add_key(key);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& name : experiments) {
            if (app.get_subcommand(name)->parsed()) return run(name, options[name]);
        }
        std::cerr << "no experiment selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
