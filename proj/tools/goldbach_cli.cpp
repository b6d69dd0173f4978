// goldbach_cli: reproducible experiment runs over the goldbach library.
//
//   goldbach_cli <command> [--n-max N] [--n-grid a,b,...] [--q-set a,b,...]
//                [--zeros PATH] [--height T] [--out PATH] [--format csv|tsv]
//                [--seed S] [--cache PATH]
//
// Exit status: 0 all verdicts PASS, 1 some verdict FAIL, 2 usage or resource error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "goldbach/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
    using namespace goldbach;

    CLI::App app{"Goldbach-average experiments: sieve, explicit formula, error scaling, character moments"};
    app.set_version_flag("--version", "goldbach_cli 1.0");

    std::string command;
    ExperimentConfig cfg;
    std::string format = "csv";

    std::map<std::string, Command> commands;
    for (auto c : {Command::sieve, Command::goldbach, Command::explicit_formula, Command::error_scaling,
                   Command::character_moments, Command::identity_suite})
        commands.emplace(command_name(c), c);

    app.add_option("command", command, "sieve | goldbach | explicit-formula | error-scaling | character-moments | identity-suite")
        ->required()
        ->check(CLI::IsMember(commands));
    app.add_option("--n-max", cfg.n_max, "sieve / series capacity (default: largest grid value)");
    app.add_option("--n-grid", cfg.n_values, "comma-separated ascending N (or X) values")->delimiter(',');
    app.add_option("--q-set", cfg.q_values, "comma-separated moduli")->delimiter(',');
    app.add_option("--zeros", cfg.zero_table_path, std::string("zero ordinate table (default: $") + kZeroTableEnv + ")");
    app.add_option("--height", cfg.height, "truncation height T (default: table height)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", cfg.output_path, "report path (default: stdout)");
    app.add_option("--format", format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
    app.add_option("--seed", cfg.seed, "seed for randomized alphas and test sequences");
    app.add_option("--cache", cfg.cache_path, "psi2 series cache file (read if large enough, else written)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitUsage;
    }

    cfg.command = commands.at(command);
    cfg.format = format == "tsv" ? Format::tsv : Format::csv;
    if (cfg.zero_table_path.empty())
        if (const char* env = std::getenv(kZeroTableEnv)) cfg.zero_table_path = env;

    RunContext ctx;
    try {
        cfg.validate();
        const auto report = run_experiment(cfg, ctx);
        if (cfg.output_path.empty()) {
            report.write(std::cout, cfg.format);
        } else {
            std::ofstream out(cfg.output_path, std::ios::binary);
            if (!out) throw resource_error("cannot open output '" + cfg.output_path + "'");
            report.write(out, cfg.format);
            if (!out) throw resource_error("write failed for '" + cfg.output_path + "'");
        }
        std::cerr << "suite: " << (report.passed() ? "PASS" : "FAIL") << '\n';
        return report.passed() ? kExitPass : kExitFail;
    } catch (const resource_error& e) {
        std::cerr << "resource error: " << e.what() << '\n';
    } catch (const parse_error& e) {
        std::cerr << "zero table: " << e.what() << '\n';
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kExitUsage;
}
