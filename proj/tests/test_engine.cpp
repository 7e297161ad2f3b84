#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "gauss/engine.hpp"
#include "gauss/errors.hpp"

using namespace gauss;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.hidden_sizes = {8};
    cfg.train.epochs_per_round = 5;
    cfg.train.minibatch_size = 32;
    cfg.train.learning_rate = 0.01;
    cfg.rounds = 4;
    cfg.batch_per_round = 32;
    cfg.initial_train = 64;
    cfg.test_fraction = 0.2;
    return cfg;
}

bool curves_equal(const LearningCurve& a, const LearningCurve& b) {
    if (a.rounds.size() != b.rounds.size()) return false;
    if (a.seed_train_idx != b.seed_train_idx) return false;
    for (std::size_t r = 0; r < a.rounds.size(); ++r) {
        if (a.rounds[r].test_accuracy != b.rounds[r].test_accuracy) return false;
        if (a.rounds[r].selected != b.rounds[r].selected) return false;
        if (a.rounds[r].train_size != b.rounds[r].train_size) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("round loop grows the train set by the batch size") {
    const Dataset ds = synth_blobs(4, 150, 2, 1.0, 0.0, 5);
    const ExperimentConfig cfg = small_config();

    const LearningCurve curve = run_experiment(cfg, ds, Strategy::Random, 1);
    REQUIRE(curve.rounds.size() == cfg.rounds + 1);
    for (std::size_t r = 0; r < curve.rounds.size(); ++r) {
        CHECK(curve.rounds[r].round == r);
        CHECK(curve.rounds[r].train_size == cfg.initial_train + r * cfg.batch_per_round);
        CHECK(curve.rounds[r].test_accuracy >= 0.0);
        CHECK(curve.rounds[r].test_accuracy <= 1.0);
    }
    // acquisitions happen on every round except the last
    for (std::size_t r = 0; r + 1 < curve.rounds.size(); ++r) {
        CHECK(curve.rounds[r].selected.size() == cfg.batch_per_round);
    }
    CHECK(curve.rounds.back().selected.empty());
}

TEST_CASE("pool exhaustion ends the loop early") {
    // n=200, test=40, train=60 -> pool=100; b=64 exhausts it in 2 acquisitions
    const Dataset ds = synth_blobs(2, 100, 2, 1.0, 0.0, 6);
    ExperimentConfig cfg = small_config();
    cfg.initial_train = 60;
    cfg.batch_per_round = 64;
    cfg.rounds = 5;

    const LearningCurve curve = run_experiment(cfg, ds, Strategy::Random, 0);
    REQUIRE(curve.rounds.size() == 3);  // rounds 0..2
    CHECK(curve.rounds[0].selected.size() == 64);
    CHECK(curve.rounds[1].selected.size() == 36);
    CHECK(curve.rounds[2].selected.empty());
    CHECK(curve.rounds[2].train_size == 160);
}

TEST_CASE("train and pool stay disjoint and conserve samples") {
    const Dataset ds = synth_blobs(4, 150, 2, 1.0, 0.0, 7);
    const ExperimentConfig cfg = small_config();
    const LearningCurve curve = run_experiment(cfg, ds, Strategy::Entropy, 3);

    // reconstruct the partition trajectory from the records
    std::set<std::size_t> train(curve.seed_train_idx.begin(), curve.seed_train_idx.end());
    for (const auto& rec : curve.rounds) {
        REQUIRE(rec.train_size == train.size());
        for (std::size_t idx : rec.selected) {
            REQUIRE(train.count(idx) == 0);  // never re-selected
            train.insert(idx);
        }
    }
}

TEST_CASE("identical config and seed reproduce the curve") {
    const Dataset ds = synth_blobs(4, 150, 2, 1.0, 0.0, 8);
    const ExperimentConfig cfg = small_config();
    for (Strategy s : {Strategy::Gauss, Strategy::SwitchTopK, Strategy::Coreset}) {
        const LearningCurve a = run_experiment(cfg, ds, s, 11);
        const LearningCurve b = run_experiment(cfg, ds, s, 11);
        CHECK(curves_equal(a, b));
    }
}

TEST_CASE("switch counts are tracked over the pool each round") {
    const Dataset ds = synth_blobs(4, 150, 2, 2.0, 0.0, 9);
    ExperimentConfig cfg = small_config();
    const LearningCurve curve = run_experiment(cfg, ds, Strategy::Gauss, 2);

    for (const auto& rec : curve.rounds) {
        CHECK(rec.switch_min >= 0);
        CHECK(rec.switch_max >= rec.switch_min);
        CHECK(rec.switch_max <= std::int64_t(cfg.train.epochs_per_round - 1));
        CHECK(rec.switch_mean >= double(rec.switch_min));
        CHECK(rec.switch_mean <= double(rec.switch_max));
    }
    // gauss rounds carry a mixture dump
    for (std::size_t r = 0; r + 1 < curve.rounds.size(); ++r) {
        REQUIRE(curve.rounds[r].gmm.has_value());
    }
    // the events dump covers the final pool
    CHECK(curve.events.sample_idx.size() == curve.events.switch_counts.size());
    CHECK_FALSE(curve.events.forget_counts.has_value());
    CHECK(curve.events.epochs_seen == cfg.train.epochs_per_round);
}

TEST_CASE("oracle-importance random matches standard random exactly") {
    const Dataset ds = synth_blobs(4, 150, 2, 1.0, 0.05, 10);
    const ExperimentConfig cfg = small_config();

    const LearningCurve standard = run_experiment(cfg, ds, Strategy::Random, 4);
    const LearningCurve oracle = run_oracle_importance(cfg, ds, Strategy::Random, 4);
    CHECK(curves_equal(standard, oracle));
}

TEST_CASE("oracle-importance freezes scores across rounds") {
    const Dataset ds = synth_blobs(4, 150, 2, 1.5, 0.05, 11);
    ExperimentConfig cfg = small_config();
    cfg.rounds = 3;
    const LearningCurve curve = run_oracle_importance(cfg, ds, Strategy::SwitchTopK, 2);

    // the frozen dump covers train + pool and includes forgetting counts
    REQUIRE(curve.events.forget_counts.has_value());
    const auto n_test = std::size_t(std::llround(cfg.test_fraction * double(ds.size())));
    CHECK(curve.events.sample_idx.size() == ds.size() - n_test);

    std::map<std::size_t, std::int64_t> frozen;
    for (std::size_t i = 0; i < curve.events.sample_idx.size(); ++i) {
        frozen[curve.events.sample_idx[i]] = curve.events.switch_counts[i];
    }
    // dominance of switches over forgets on the same stream
    for (std::size_t i = 0; i < curve.events.sample_idx.size(); ++i) {
        REQUIRE((*curve.events.forget_counts)[i] <= curve.events.switch_counts[i]);
    }

    // switch-top-k under frozen scores: every selected batch consists of the
    // top-count remaining pool samples
    std::set<std::size_t> in_train(curve.seed_train_idx.begin(), curve.seed_train_idx.end());
    std::set<std::size_t> pool;
    for (const auto& [idx, c] : frozen) {
        if (in_train.count(idx) == 0) pool.insert(idx);
    }
    for (std::size_t r = 0; r + 1 < curve.rounds.size(); ++r) {
        const auto& batch = curve.rounds[r].selected;
        // lowest selected frozen count must be >= every unselected pool count
        std::int64_t lowest_selected = std::numeric_limits<std::int64_t>::max();
        for (std::size_t idx : batch) lowest_selected = std::min(lowest_selected, frozen[idx]);
        std::set<std::size_t> batch_set(batch.begin(), batch.end());
        for (std::size_t idx : pool) {
            if (batch_set.count(idx) == 0) {
                REQUIRE(frozen[idx] <= lowest_selected);
            }
        }
        for (std::size_t idx : batch) pool.erase(idx);
    }
}

TEST_CASE("suite runs every strategy/seed pair and always includes random") {
    const Dataset ds = synth_blobs(4, 100, 2, 1.0, 0.0, 12);
    ExperimentConfig cfg = small_config();
    cfg.rounds = 2;
    cfg.initial_train = 32;

    SUBCASE("random auto-added") {
        const SuiteResult result =
            run_suite(cfg, ds, {Strategy::Entropy}, {0, 1}, 1);
        REQUIRE(result.failures.empty());
        REQUIRE(result.curves.size() == 4);  // entropy x2 + random x2
        CHECK(result.curves[0].strategy == "entropy");
        CHECK(result.curves[2].strategy == "random");
    }
    SUBCASE("explicit random is not duplicated") {
        const SuiteResult result =
            run_suite(cfg, ds, {Strategy::Random, Strategy::Gauss}, {0, 1, 2}, 2);
        REQUIRE(result.failures.empty());
        CHECK(result.curves.size() == 6);
    }
    SUBCASE("random baseline shares seeds with strategies") {
        const SuiteResult result = run_suite(cfg, ds, {Strategy::Entropy}, {5, 9}, 1);
        std::vector<std::uint64_t> entropy_seeds;
        std::vector<std::uint64_t> random_seeds;
        for (const auto& c : result.curves) {
            (c.strategy == "entropy" ? entropy_seeds : random_seeds).push_back(c.seed);
        }
        CHECK(entropy_seeds == random_seeds);
    }
}

TEST_CASE("suite failures are collected, not fatal") {
    const Dataset ds = synth_blobs(4, 100, 2, 1.0, 0.0, 13);
    ExperimentConfig cfg = small_config();
    cfg.initial_train = 5000;  // exceeds the dataset: every run fails

    const SuiteResult result = run_suite(cfg, ds, {Strategy::Random}, {0, 1}, 1);
    CHECK(result.curves.empty());
    REQUIRE(result.failures.size() == 2);
    CHECK(result.failures[0].strategy == "random");
    CHECK_FALSE(result.failures[0].message.empty());
}

TEST_CASE("engine rejects zero-round configs") {
    const Dataset ds = synth_blobs(2, 50, 2, 1.0, 0.0, 1);
    ExperimentConfig cfg = small_config();
    cfg.rounds = 0;
    CHECK_THROWS_AS(run_experiment(cfg, ds, Strategy::Random, 0), ConfigError);
}
