#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gauss/config.hpp"
#include "gauss/dataset.hpp"
#include "gauss/engine.hpp"

namespace gauss {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct BuiltDataset {
    Dataset data;
    std::size_t fixed_test_count = 0;  // trailing rows reserved as a dedicated test set
    std::string name;
};

/// Assemble the dataset a config describes. Relative file paths resolve
/// against $GAUSS_DATA_DIR when it is set.
BuiltDataset build_dataset(const KeyValueConfig& cfg);

/// Write one run's artifacts into dir: manifest first (atomic), then
/// curve.csv, seed_set.csv, selections.csv, events.csv, summary.txt and,
/// for GauSS runs, gmm.csv.
void write_run_outputs(const std::filesystem::path& dir, const KeyValueConfig& cfg,
                       const BuiltDataset& dataset, const LearningCurve& curve);

/// `run` / `oracle` commands: execute one (strategy, seed) experiment and
/// write its artifacts into out_dir.
LearningCurve run_single_to_dir(const KeyValueConfig& cfg,
                                const std::filesystem::path& out_dir,
                                std::uint64_t seed_offset,
                                std::optional<RunMode> mode_override);

/// `suite` command: every configured (strategy, seed) pair plus the shared
/// random baseline, one subdirectory per run plus index.csv and suite.txt.
SuiteResult run_suite_to_dir(const KeyValueConfig& cfg,
                             const std::filesystem::path& out_dir, std::size_t jobs,
                             std::uint64_t seed_offset);

/// `analyze` command: area table, Welch t-test table and, when forgetting
/// event dumps exist, the smoothed-KL matrix. Requires the random baseline.
void analyze_suite(const std::filesystem::path& suite_dir, double kl_sigma = 1.0);

/// `report` command: plot-ready per-strategy mean/spread accuracy curves.
void report_suite(const std::filesystem::path& suite_dir);

}  // namespace gauss
