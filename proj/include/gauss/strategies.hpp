#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gauss/matrix.hpp"
#include "gauss/mixture.hpp"
#include "gauss/network.hpp"

namespace gauss {

enum class Strategy { Random, Entropy, LeastConf, Coreset, SwitchTopK, Gauss };

Strategy strategy_from_name(std::string_view name);
std::string_view strategy_name(Strategy s);
std::vector<Strategy> all_strategies();

/// Immutable inputs of one acquisition call. pool_features rows align with
/// pool_idx (sorted ascending), as do switch_counts when present.
struct AcquisitionContext {
    const MlpModel* model = nullptr;
    std::vector<std::size_t> pool_idx;
    Matrix pool_features;
    Matrix train_embeddings;  // centers for coreset
    std::optional<std::vector<double>> switch_counts;
    std::size_t batch_size = 0;
    std::uint64_t seed = 0;
};

/// Per-pool-sample scores aligned with pool_idx; higher always means
/// "select first" so one top-k routine serves every score-based strategy.
struct ImportanceScores {
    std::vector<double> values;
    Strategy strategy = Strategy::Random;
};

/// A selected batch: dataset indices (subset of pool_idx, sorted ascending)
/// and the per-index score or sampling weight that chose them.
struct Selection {
    std::vector<std::size_t> indices;
    std::vector<double> weights;
};

Selection select_random(const AcquisitionContext& ctx);
ImportanceScores score_entropy(const AcquisitionContext& ctx);
ImportanceScores score_least_confidence(const AcquisitionContext& ctx);
Selection select_coreset(const AcquisitionContext& ctx);
Selection select_switch_topk(const AcquisitionContext& ctx);

/// GauSS: fit the two-component mixture to the pool switch counts and draw
/// the batch without replacement, weighted by the posterior of the
/// higher-mean component. Falls back to select_random on a degenerate fit.
Selection select_gauss(const AcquisitionContext& ctx, GmmFit* fit_out = nullptr);

/// Positions of the b largest scores; ties to the lowest position, result
/// sorted ascending. b is clamped to the score count.
std::vector<std::size_t> topk(std::span<const double> scores, std::size_t b);

/// Exponential-key weighted sampling without replacement (key = -ln(u)/w,
/// smallest keys win). Zero-weight positions are drawn on only when fewer
/// than k positive weights exist; all-zero weights with k > 0 throw.
std::vector<std::size_t> weighted_sample_without_replacement(
    std::span<const double> weights, std::size_t k, std::uint64_t seed);

/// Dispatch by strategy tag.
Selection select(Strategy strategy, const AcquisitionContext& ctx, GmmFit* fit_out = nullptr);

}  // namespace gauss
