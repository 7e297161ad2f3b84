#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gauss/dataset.hpp"
#include "gauss/mixture.hpp"
#include "gauss/network.hpp"
#include "gauss/strategies.hpp"

namespace gauss {

enum class RunMode { Standard, OracleImportance };

/// One experiment family: dataset handling, model/training hyperparameters
/// and the active-learning loop shape. Strategy and seed vary per run.
struct ExperimentConfig {
    std::vector<std::size_t> hidden_sizes = {16};
    TrainConfig train;
    std::size_t rounds = 10;
    std::size_t batch_per_round = 1024;
    std::size_t initial_train = 128;
    double test_fraction = 0.2;
    // > 0: that many trailing dataset rows form a dedicated test set and
    // test_fraction is ignored (separate IDX test files).
    std::size_t fixed_test_count = 0;
    RunMode mode = RunMode::Standard;
};

struct GmmRoundDump {
    std::size_t round = 0;
    GmmFit fit;
};

struct RoundRecord {
    std::size_t round = 0;
    std::size_t train_size = 0;
    double test_accuracy = 0.0;
    std::vector<std::size_t> selected;  // batch acquired at the end of this round
    std::vector<double> selected_weights;
    std::int64_t switch_min = 0;
    double switch_mean = 0.0;
    std::int64_t switch_max = 0;
    std::optional<GmmRoundDump> gmm;
    double wall_seconds = 0.0;
};

/// Per-sample event counts dumped with each run (pool switch counts for
/// standard runs; frozen full-pool switch and forgetting counts for
/// oracle-importance runs).
struct EventsDump {
    std::vector<std::size_t> sample_idx;
    std::vector<std::int64_t> switch_counts;
    std::optional<std::vector<std::int64_t>> forget_counts;
    std::size_t epochs_seen = 0;
};

struct LearningCurve {
    std::string strategy;
    std::uint64_t seed = 0;
    RunMode mode = RunMode::Standard;
    std::vector<std::size_t> seed_train_idx;  // round-0 training set
    std::vector<RoundRecord> rounds;
    EventsDump events;

    std::vector<double> accuracies() const {
        std::vector<double> out;
        out.reserve(rounds.size());
        for (const auto& r : rounds) out.push_back(r.test_accuracy);
        return out;
    }
};

/// The standard pool-based loop: per round, retrain from scratch, track pool
/// prediction switches per epoch, measure test accuracy, then acquire a
/// batch and reveal its labels. Fully deterministic given (config, dataset
/// bytes, seed).
LearningCurve run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                             Strategy strategy, std::uint64_t seed);

/// Analysis mode: importance scores (switch counts and the scoring model)
/// are frozen from one model trained on the full train+pool data; the
/// accuracy model is still retrained from scratch each round.
LearningCurve run_oracle_importance(const ExperimentConfig& config, const Dataset& dataset,
                                    Strategy strategy, std::uint64_t seed);

struct RunFailure {
    std::string strategy;
    std::uint64_t seed = 0;
    std::string message;
};

struct SuiteResult {
    std::vector<LearningCurve> curves;  // keyed by (strategy, seed), never completion order
    std::vector<RunFailure> failures;
};

/// Every (strategy, seed) pair, executed independently; a shared-seed random
/// baseline is always included. Per-run failures are collected, not fatal.
SuiteResult run_suite(const ExperimentConfig& config, const Dataset& dataset,
                      const std::vector<Strategy>& strategies,
                      const std::vector<std::uint64_t>& seeds, std::size_t jobs = 1);

}  // namespace gauss
