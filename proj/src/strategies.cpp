#include "gauss/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gauss/errors.hpp"
#include "gauss/rng.hpp"

namespace gauss {

namespace {

std::size_t clamp_batch(const AcquisitionContext& ctx) {
    return std::min(ctx.batch_size, ctx.pool_idx.size());
}

// Map pool positions to dataset indices and sort the batch ascending,
// keeping the per-index weights aligned.
Selection finalize(const AcquisitionContext& ctx, std::span<const std::size_t> positions,
                   std::span<const double> weights) {
    std::vector<std::size_t> order(positions.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });
    Selection sel;
    sel.indices.reserve(positions.size());
    sel.weights.reserve(positions.size());
    for (std::size_t o : order) {
        sel.indices.push_back(ctx.pool_idx[positions[o]]);
        sel.weights.push_back(weights[o]);
    }
    return sel;
}

Matrix pool_probabilities(const AcquisitionContext& ctx) {
    if (ctx.model == nullptr) throw std::invalid_argument("strategy: no model in context");
    Matrix logits = forward(*ctx.model, ctx.pool_features);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        auto row = logits.row(r);
        std::vector<double> p = softmax(row);
        std::copy(p.begin(), p.end(), row.begin());
    }
    return logits;
}

}  // namespace

Strategy strategy_from_name(std::string_view name) {
    if (name == "random") return Strategy::Random;
    if (name == "entropy") return Strategy::Entropy;
    if (name == "leastconf") return Strategy::LeastConf;
    if (name == "coreset") return Strategy::Coreset;
    if (name == "switchtopk") return Strategy::SwitchTopK;
    if (name == "gauss") return Strategy::Gauss;
    throw ConfigError("unknown strategy '" + std::string(name) +
                      "' (expected one of: random, entropy, leastconf, coreset, "
                      "switchtopk, gauss)");
}

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Random: return "random";
        case Strategy::Entropy: return "entropy";
        case Strategy::LeastConf: return "leastconf";
        case Strategy::Coreset: return "coreset";
        case Strategy::SwitchTopK: return "switchtopk";
        case Strategy::Gauss: return "gauss";
    }
    return "unknown";
}

std::vector<Strategy> all_strategies() {
    return {Strategy::Random,  Strategy::Entropy,    Strategy::LeastConf,
            Strategy::Coreset, Strategy::SwitchTopK, Strategy::Gauss};
}

Selection select_random(const AcquisitionContext& ctx) {
    if (ctx.pool_idx.empty()) throw std::invalid_argument("select_random: empty pool");
    const std::size_t b = clamp_batch(ctx);
    std::vector<std::size_t> positions(ctx.pool_idx.size());
    std::iota(positions.begin(), positions.end(), 0);
    auto rng = make_engine(ctx.seed);
    std::vector<std::size_t> picked;
    picked.reserve(b);
    for (std::size_t i = 0; i < b; ++i) {
        std::uniform_int_distribution<std::size_t> dist(0, positions.size() - 1);
        const std::size_t j = dist(rng);
        picked.push_back(positions[j]);
        positions[j] = positions.back();
        positions.pop_back();
    }
    std::vector<double> weights(b, 1.0);
    return finalize(ctx, picked, weights);
}

ImportanceScores score_entropy(const AcquisitionContext& ctx) {
    Matrix probs = pool_probabilities(ctx);
    ImportanceScores scores;
    scores.strategy = Strategy::Entropy;
    scores.values.resize(probs.rows);
    for (std::size_t r = 0; r < probs.rows; ++r) {
        double h = 0.0;
        for (double p : probs.row(r)) {
            if (p > 0.0) h -= p * std::log(p);
        }
        scores.values[r] = h;
    }
    return scores;
}

ImportanceScores score_least_confidence(const AcquisitionContext& ctx) {
    Matrix probs = pool_probabilities(ctx);
    ImportanceScores scores;
    scores.strategy = Strategy::LeastConf;
    scores.values.resize(probs.rows);
    for (std::size_t r = 0; r < probs.rows; ++r) {
        auto row = probs.row(r);
        scores.values[r] = 1.0 - *std::max_element(row.begin(), row.end());
    }
    return scores;
}

Selection select_coreset(const AcquisitionContext& ctx) {
    if (ctx.pool_idx.empty()) throw std::invalid_argument("select_coreset: empty pool");
    if (ctx.train_embeddings.rows == 0) {
        throw std::invalid_argument("select_coreset: empty center set");
    }
    if (ctx.model == nullptr) throw std::invalid_argument("select_coreset: no model");
    const std::size_t b = clamp_batch(ctx);
    const Matrix pool_emb = embed(*ctx.model, ctx.pool_features);
    const std::size_t dim = pool_emb.cols;
    if (dim != ctx.train_embeddings.cols) {
        throw std::invalid_argument("select_coreset: embedding dimension mismatch");
    }
    const std::size_t n = pool_emb.rows;

    auto sqdist = [dim](std::span<const double> a, std::span<const double> b2) {
        double d = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double diff = a[i] - b2[i];
            d += diff * diff;
        }
        return d;
    };

    // min squared distance from each pool point to the current center set
    std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < ctx.train_embeddings.rows; ++t) {
            min_d[i] = std::min(min_d[i], sqdist(pool_emb.row(i), ctx.train_embeddings.row(t)));
        }
    }

    std::vector<std::size_t> picked;
    std::vector<double> weights;
    std::vector<bool> taken(n, false);
    for (std::size_t step = 0; step < b; ++step) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            if (best == n || min_d[i] > min_d[best]) best = i;  // ties keep lowest index
        }
        picked.push_back(best);
        weights.push_back(std::sqrt(min_d[best]));
        taken[best] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) min_d[i] = std::min(min_d[i], sqdist(pool_emb.row(i), pool_emb.row(best)));
        }
    }
    return finalize(ctx, picked, weights);
}

Selection select_switch_topk(const AcquisitionContext& ctx) {
    if (!ctx.switch_counts.has_value()) {
        throw std::invalid_argument("select_switch_topk: switch counts missing");
    }
    const auto& counts = *ctx.switch_counts;
    if (counts.size() != ctx.pool_idx.size()) {
        throw std::invalid_argument("select_switch_topk: count/pool length mismatch");
    }
    auto positions = topk(counts, clamp_batch(ctx));
    std::vector<double> weights;
    weights.reserve(positions.size());
    for (std::size_t p : positions) weights.push_back(counts[p]);
    return finalize(ctx, positions, weights);
}

Selection select_gauss(const AcquisitionContext& ctx, GmmFit* fit_out) {
    if (ctx.pool_idx.empty()) throw std::invalid_argument("select_gauss: empty pool");
    if (!ctx.switch_counts.has_value()) {
        throw std::invalid_argument("select_gauss: switch counts missing");
    }
    const auto& counts = *ctx.switch_counts;
    const std::size_t b = clamp_batch(ctx);
    if (b == 0) return {};

    if (counts.size() < 2) {
        if (fit_out != nullptr) *fit_out = GmmFit{};
        return select_random(ctx);
    }
    GmmFit fit = fit_em(counts, EmConfig{}, ctx.seed);
    if (fit_out != nullptr) *fit_out = fit;
    if (fit.degenerate()) return select_random(ctx);

    std::vector<double> rf = responsibilities_f(*fit.model, counts);
    std::vector<std::size_t> positions;
    try {
        positions = weighted_sample_without_replacement(rf, b, ctx.seed);
    } catch (const std::invalid_argument&) {
        return select_random(ctx);  // every responsibility underflowed to zero
    }
    std::vector<double> weights;
    weights.reserve(positions.size());
    for (std::size_t p : positions) weights.push_back(rf[p]);
    return finalize(ctx, positions, weights);
}

std::vector<std::size_t> topk(std::span<const double> scores, std::size_t b) {
    for (double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("topk: non-finite score");
    }
    const std::size_t k = std::min(b, scores.size());
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        return scores[a] > scores[c];  // stable: equal scores keep index order
    });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::size_t> weighted_sample_without_replacement(
    std::span<const double> weights, std::size_t k, std::uint64_t seed) {
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("weighted sampling: negative or NaN weight");
        }
    }
    k = std::min(k, weights.size());
    if (k == 0) return {};

    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    struct Keyed {
        double key;
        std::size_t pos;
    };
    std::vector<Keyed> keyed;
    std::vector<std::size_t> zeros;
    keyed.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double u = 1.0 - unit(rng);  // in (0, 1]
        if (weights[i] > 0.0) {
            keyed.push_back({-std::log(u) / weights[i], i});
        } else {
            zeros.push_back(i);
        }
    }
    if (keyed.empty()) {
        throw std::invalid_argument("weighted sampling: all weights are zero");
    }

    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        return a.key != b.key ? a.key < b.key : a.pos < b.pos;
    });

    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t i = 0; i < std::min(k, keyed.size()); ++i) picked.push_back(keyed[i].pos);

    // Not enough positive-weight samples: fill uniformly from the zero set.
    while (picked.size() < k && !zeros.empty()) {
        std::uniform_int_distribution<std::size_t> dist(0, zeros.size() - 1);
        const std::size_t j = dist(rng);
        picked.push_back(zeros[j]);
        zeros[j] = zeros.back();
        zeros.pop_back();
    }

    std::sort(picked.begin(), picked.end());
    return picked;
}

Selection select(Strategy strategy, const AcquisitionContext& ctx, GmmFit* fit_out) {
    switch (strategy) {
        case Strategy::Random: return select_random(ctx);
        case Strategy::Entropy: {
            auto scores = score_entropy(ctx);
            auto positions = topk(scores.values, clamp_batch(ctx));
            std::vector<double> weights;
            for (std::size_t p : positions) weights.push_back(scores.values[p]);
            return finalize(ctx, positions, weights);
        }
        case Strategy::LeastConf: {
            auto scores = score_least_confidence(ctx);
            auto positions = topk(scores.values, clamp_batch(ctx));
            std::vector<double> weights;
            for (std::size_t p : positions) weights.push_back(scores.values[p]);
            return finalize(ctx, positions, weights);
        }
        case Strategy::Coreset: return select_coreset(ctx);
        case Strategy::SwitchTopK: return select_switch_topk(ctx);
        case Strategy::Gauss: return select_gauss(ctx, fit_out);
    }
    throw std::logic_error("select: unhandled strategy");
}

}  // namespace gauss
