#include "gauss/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "gauss/dynamics.hpp"
#include "gauss/errors.hpp"
#include "gauss/rng.hpp"

namespace gauss {

namespace {

// Stream tags for per-purpose seed derivation.
constexpr std::uint64_t kSplitTag = 0xA11C;
constexpr std::uint64_t kModelTag = 0xB0DE;
constexpr std::uint64_t kShuffleTag = 0x5AFF;
constexpr std::uint64_t kSelectTag = 0x5E1E;
constexpr std::uint64_t kOracleTag = 0x0AC1;

PoolPartition make_partition(const ExperimentConfig& config, const Dataset& dataset,
                             std::uint64_t seed) {
    const std::uint64_t split_seed = mix_seed(seed, kSplitTag);
    if (config.fixed_test_count > 0) {
        return split_with_fixed_test(dataset, config.initial_train, config.fixed_test_count,
                                     split_seed);
    }
    return split_initial(dataset, config.initial_train, config.test_fraction, split_seed);
}

std::vector<std::size_t> model_layers(const ExperimentConfig& config, const Dataset& dataset) {
    std::vector<std::size_t> layers;
    layers.push_back(dataset.feature_dim);
    layers.insert(layers.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
    layers.push_back(dataset.num_classes);
    return layers;
}

void summarize_switches(RoundRecord& rec, std::span<const std::int64_t> counts) {
    if (counts.empty()) {
        rec.switch_min = rec.switch_max = 0;
        rec.switch_mean = 0.0;
        return;
    }
    std::int64_t lo = counts[0];
    std::int64_t hi = counts[0];
    double sum = 0.0;
    for (std::int64_t c : counts) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        sum += double(c);
    }
    rec.switch_min = lo;
    rec.switch_max = hi;
    rec.switch_mean = sum / double(counts.size());
}

// Frozen importance state for oracle-importance mode.
struct OracleState {
    MlpModel model;
    std::unordered_map<std::size_t, std::int64_t> switch_by_idx;
    EventsDump events;
};

OracleState train_oracle_model(const ExperimentConfig& config, const Dataset& dataset,
                               const PoolPartition& part, LabelOracle& oracle,
                               std::uint64_t seed) {
    std::vector<std::size_t> full_idx;
    full_idx.reserve(part.train_idx.size() + part.pool_idx.size());
    full_idx.insert(full_idx.end(), part.train_idx.begin(), part.train_idx.end());
    full_idx.insert(full_idx.end(), part.pool_idx.begin(), part.pool_idx.end());
    std::sort(full_idx.begin(), full_idx.end());

    oracle.mark_revealed(full_idx);  // analysis mode: the engine sees all labels

    const Matrix features = dataset.gather(full_idx);
    const std::vector<int> labels = oracle.labels_for(full_idx);

    OracleState state;
    MlpConfig mc{model_layers(config, dataset), mix_seed(seed, kOracleTag)};
    state.model = init_model(mc);

    SwitchTracker switches(full_idx.size());
    ForgettingTracker forgets(full_idx.size());
    TrainConfig tc = config.train;
    tc.shuffle_seed = mix_seed(seed, kOracleTag, 1);
    train_epochs(state.model, features, labels, tc,
                 [&](std::size_t, const MlpModel& m) {
                     auto preds = predict(m, features);
                     switches.record_predictions(preds);
                     forgets.record_labeled(preds, labels);
                 });

    state.events.sample_idx = full_idx;
    state.events.switch_counts = switches.counts();
    state.events.forget_counts = forgets.counts();
    state.events.epochs_seen = switches.epochs_seen();
    for (std::size_t i = 0; i < full_idx.size(); ++i) {
        state.switch_by_idx[full_idx[i]] = state.events.switch_counts[i];
    }
    return state;
}

void move_to_train(PoolPartition& part, const std::vector<std::size_t>& batch) {
    std::vector<std::size_t> new_pool;
    new_pool.reserve(part.pool_idx.size() - batch.size());
    std::set_difference(part.pool_idx.begin(), part.pool_idx.end(), batch.begin(),
                        batch.end(), std::back_inserter(new_pool));
    if (new_pool.size() + batch.size() != part.pool_idx.size()) {
        throw std::logic_error("engine: selected batch is not a subset of the pool");
    }
    part.pool_idx = std::move(new_pool);
    std::vector<std::size_t> merged;
    merged.reserve(part.train_idx.size() + batch.size());
    std::merge(part.train_idx.begin(), part.train_idx.end(), batch.begin(), batch.end(),
               std::back_inserter(merged));
    part.train_idx = std::move(merged);
}

LearningCurve run_loop(const ExperimentConfig& config, const Dataset& dataset,
                       Strategy strategy, std::uint64_t seed, RunMode mode) {
    if (config.rounds == 0) throw ConfigError("engine: rounds must be positive");
    if (config.batch_per_round == 0) throw ConfigError("engine: al.batch must be positive");

    PoolPartition part = make_partition(config, dataset, seed);
    LabelOracle oracle(dataset);
    oracle.mark_revealed(part.train_idx);
    oracle.mark_revealed(part.test_idx);

    std::optional<OracleState> frozen;
    if (mode == RunMode::OracleImportance) {
        frozen = train_oracle_model(config, dataset, part, oracle, seed);
    }

    LearningCurve curve;
    curve.strategy = std::string(strategy_name(strategy));
    curve.seed = seed;
    curve.mode = mode;
    curve.seed_train_idx = part.train_idx;

    const Matrix test_features = dataset.gather(part.test_idx);
    const std::vector<int> test_labels = oracle.labels_for(part.test_idx);

    const std::size_t initial_pool = part.pool_idx.size();

    for (std::size_t round = 0;; ++round) {
        const auto t0 = std::chrono::steady_clock::now();
        RoundRecord rec;
        rec.round = round;
        rec.train_size = part.train_idx.size();

        // Retrain from scratch: fresh init with a round-derived seed.
        MlpConfig mc{model_layers(config, dataset), mix_seed(seed, kModelTag, round)};
        MlpModel model = init_model(mc);

        const Matrix train_features = dataset.gather(part.train_idx);
        const std::vector<int> train_labels = oracle.labels_for(part.train_idx);
        const Matrix pool_features = dataset.gather(part.pool_idx);

        TrainConfig tc = config.train;
        tc.shuffle_seed = mix_seed(seed, kShuffleTag, round);

        SwitchTracker tracker(part.pool_idx.size());
        const bool track_pool = mode == RunMode::Standard && !part.pool_idx.empty();
        if (track_pool) {
            train_epochs(model, train_features, train_labels, tc,
                         [&](std::size_t, const MlpModel& m) {
                             tracker.record_predictions(predict(m, pool_features));
                         });
        } else {
            train_epochs(model, train_features, train_labels, tc);
        }

        rec.test_accuracy = accuracy(model, test_features, test_labels);

        std::vector<std::int64_t> switch_counts;
        if (mode == RunMode::OracleImportance) {
            switch_counts.reserve(part.pool_idx.size());
            for (std::size_t idx : part.pool_idx) {
                switch_counts.push_back(frozen->switch_by_idx.at(idx));
            }
        } else if (track_pool) {
            switch_counts = tracker.counts();
        }
        summarize_switches(rec, switch_counts);

        const bool last_round = round == config.rounds || part.pool_idx.empty();
        if (mode == RunMode::Standard && last_round) {
            // Final tracked pool state becomes the per-run event dump.
            curve.events.sample_idx = part.pool_idx;
            curve.events.switch_counts = switch_counts;
            curve.events.epochs_seen = track_pool ? tracker.epochs_seen() : 0;
        }
        if (!last_round) {
            // Oracle mode scores with the frozen model; standard mode with the
            // round model.
            const MlpModel& scoring_model =
                mode == RunMode::OracleImportance ? frozen->model : model;

            AcquisitionContext ctx;
            ctx.model = &scoring_model;
            ctx.pool_idx = part.pool_idx;
            ctx.pool_features = pool_features;
            ctx.train_embeddings = embed(scoring_model, train_features);
            ctx.switch_counts.emplace(switch_counts.begin(), switch_counts.end());
            ctx.batch_size = std::min(config.batch_per_round, part.pool_idx.size());
            ctx.seed = mix_seed(seed, kSelectTag, round);

            GmmFit fit;
            Selection sel = select(strategy, ctx, &fit);
            if (strategy == Strategy::Gauss) {
                rec.gmm = GmmRoundDump{round, fit};
            }
            oracle.reveal(sel.indices);
            move_to_train(part, sel.indices);
            rec.selected = std::move(sel.indices);
            rec.selected_weights = std::move(sel.weights);
        }

        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        curve.rounds.push_back(std::move(rec));

        if (last_round) break;
    }

    if (mode == RunMode::OracleImportance) {
        curve.events = frozen->events;
    }

    if (part.train_idx.size() + part.pool_idx.size() !=
        initial_pool + curve.seed_train_idx.size()) {
        throw std::logic_error("engine: train/pool conservation violated");
    }
    return curve;
}

}  // namespace

LearningCurve run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                             Strategy strategy, std::uint64_t seed) {
    return run_loop(config, dataset, strategy, seed, RunMode::Standard);
}

LearningCurve run_oracle_importance(const ExperimentConfig& config, const Dataset& dataset,
                                    Strategy strategy, std::uint64_t seed) {
    return run_loop(config, dataset, strategy, seed, RunMode::OracleImportance);
}

SuiteResult run_suite(const ExperimentConfig& config, const Dataset& dataset,
                      const std::vector<Strategy>& strategies,
                      const std::vector<std::uint64_t>& seeds, std::size_t jobs) {
    std::vector<Strategy> all = strategies;
    if (std::find(all.begin(), all.end(), Strategy::Random) == all.end()) {
        all.push_back(Strategy::Random);  // analysis always needs the baseline
    }

    struct Job {
        Strategy strategy;
        std::uint64_t seed;
    };
    std::vector<Job> jobs_list;
    for (Strategy s : all) {
        for (std::uint64_t seed : seeds) jobs_list.push_back({s, seed});
    }

    SuiteResult result;
    result.curves.resize(jobs_list.size());
    std::vector<std::optional<std::string>> errors(jobs_list.size());

    const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, jobs_list.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs_list.size()) return;
            const Job& job = jobs_list[i];
            try {
                result.curves[i] = config.mode == RunMode::OracleImportance
                                       ? run_oracle_importance(config, dataset, job.strategy,
                                                               job.seed)
                                       : run_experiment(config, dataset, job.strategy, job.seed);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Compact out failed slots, preserving (strategy, seed) key order.
    SuiteResult out;
    for (std::size_t i = 0; i < jobs_list.size(); ++i) {
        if (errors[i].has_value()) {
            out.failures.push_back({std::string(strategy_name(jobs_list[i].strategy)),
                                    jobs_list[i].seed, *errors[i]});
        } else {
            out.curves.push_back(std::move(result.curves[i]));
        }
    }
    return out;
}

}  // namespace gauss
