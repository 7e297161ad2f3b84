// gauss — pool-based active learning benchmark runner.
//
// Commands: run, suite, oracle, analyze, report. Experiments are described
// by flat key/value config files; every documented key can be overridden on
// the command line with the matching dotted flag (e.g. --al.batch 32).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "gauss/config.hpp"
#include "gauss/errors.hpp"
#include "gauss/runner.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitRuntimeError = 4;
constexpr int kExitMissingBaseline = 5;
constexpr int kExitReportError = 6;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::size_t jobs = 1;
    std::uint64_t seed_offset = 0;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_flags(CLI::App* cmd, CommonArgs& args) {
    // One flag per documented config key; values land as overrides after the
    // config file is parsed.
    for (const auto& key : gauss::known_config_keys()) {
        cmd->add_option_function<std::string>(
               "--" + key,
               [&args, key](const std::string& value) { args.overrides.emplace_back(key, value); },
               "override config key " + key)
            ->type_name("VALUE");
    }
}

gauss::KeyValueConfig load_config(const CommonArgs& args) {
    gauss::KeyValueConfig cfg = args.config_path.empty()
                                    ? gauss::KeyValueConfig()
                                    : gauss::KeyValueConfig::from_file(args.config_path);
    for (const auto& [key, value] : args.overrides) cfg.set(key, value);
    return cfg;
}

int run_command(const CommonArgs& args, std::optional<gauss::RunMode> mode_override) {
    const auto cfg = load_config(args);
    const std::string out = args.out_dir.empty() ? "run_out" : args.out_dir;
    const auto curve = gauss::run_single_to_dir(cfg, out, args.seed_offset, mode_override);
    std::cout << "run complete: strategy=" << curve.strategy << " seed=" << curve.seed
              << " rounds=" << curve.rounds.size() - 1
              << " final_accuracy=" << curve.rounds.back().test_accuracy << "\n"
              << "results: " << out << "\n";
    return 0;
}

int suite_command(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const std::string out = args.out_dir.empty() ? "suite_out" : args.out_dir;
    const auto result = gauss::run_suite_to_dir(cfg, out, args.jobs, args.seed_offset);
    std::cout << "suite complete: " << result.curves.size() << " runs, "
              << result.failures.size() << " failures\n"
              << "results: " << out << "\n";
    for (const auto& f : result.failures) {
        std::cerr << "run failed: " << f.strategy << " seed " << f.seed << ": " << f.message
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pool-based active learning benchmark (switch-event strategies and baselines)"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CommonArgs suite_args;
    CommonArgs oracle_args;
    std::string analyze_dir;
    std::string report_dir;
    double kl_sigma = 1.0;

    auto* run_cmd = app.add_subcommand("run", "execute one experiment");
    run_cmd->add_option("--config", run_args.config_path, "config file path");
    run_cmd->add_option("--out", run_args.out_dir, "results directory (default run_out)");
    run_cmd->add_option("--seed-offset", run_args.seed_offset, "added to every seed");
    add_override_flags(run_cmd, run_args);

    auto* suite_cmd = app.add_subcommand("suite", "execute strategies x seeds");
    suite_cmd->add_option("--config", suite_args.config_path, "config file path");
    suite_cmd->add_option("--out", suite_args.out_dir, "suite directory (default suite_out)");
    suite_cmd->add_option("--jobs", suite_args.jobs, "parallel worker threads");
    suite_cmd->add_option("--seed-offset", suite_args.seed_offset, "added to every seed");
    add_override_flags(suite_cmd, suite_args);

    auto* oracle_cmd =
        app.add_subcommand("oracle", "execute one experiment in oracle-importance mode");
    oracle_cmd->add_option("--config", oracle_args.config_path, "config file path");
    oracle_cmd->add_option("--out", oracle_args.out_dir, "results directory (default run_out)");
    oracle_cmd->add_option("--seed-offset", oracle_args.seed_offset, "added to every seed");
    add_override_flags(oracle_cmd, oracle_args);

    auto* analyze_cmd = app.add_subcommand("analyze", "compute suite metric tables");
    analyze_cmd->add_option("dir", analyze_dir, "suite directory")->required();
    analyze_cmd->add_option("--sigma", kl_sigma, "KL smoothing sigma in bins (default 1.0)");

    auto* report_cmd = app.add_subcommand("report", "emit plot-ready learning curves");
    report_cmd->add_option("dir", report_dir, "analyzed suite directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return run_command(run_args, std::nullopt);
        if (suite_cmd->parsed()) return suite_command(suite_args);
        if (oracle_cmd->parsed()) {
            return run_command(oracle_args, gauss::RunMode::OracleImportance);
        }
        if (analyze_cmd->parsed()) {
            gauss::analyze_suite(analyze_dir, kl_sigma);
            std::cout << "analysis written to " << analyze_dir << "\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            gauss::report_suite(report_dir);
            std::cout << "report written to " << report_dir << "/report.csv\n";
            return 0;
        }
    } catch (const gauss::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const gauss::MissingBaselineError& e) {
        std::cerr << "analyze error: " << e.what() << "\n";
        return kExitMissingBaseline;
    } catch (const gauss::ReportError& e) {
        std::cerr << "report error: " << e.what() << "\n";
        return kExitReportError;
    } catch (const gauss::DataError& e) {
        std::cerr << "dataset error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return 0;
}
