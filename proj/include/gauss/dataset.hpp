#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gauss/matrix.hpp"

namespace gauss {

/**
 * In-memory labeled dataset. Features are stored row-major as 32-bit floats;
 * all arithmetic downstream runs in doubles.
 */
struct Dataset {
    std::vector<float> features;  // n_samples * feature_dim, row-major
    std::vector<int> labels;      // class indices in [0, num_classes)
    std::size_t num_classes = 0;
    std::size_t feature_dim = 0;
    std::vector<std::uint8_t> outlier_flags;  // empty, or one flag per sample

    std::size_t size() const { return labels.size(); }

    std::span<const float> row(std::size_t i) const {
        return {features.data() + i * feature_dim, feature_dim};
    }

    /// Copy the given sample rows into a double matrix (canonical index order).
    Matrix gather(std::span<const std::size_t> indices) const;
    std::vector<int> gather_labels(std::span<const std::size_t> indices) const;

    /// FNV-1a over features, labels and shape; used by run manifests.
    std::uint64_t content_hash() const;
};

/// Disjoint index sets over one Dataset. Always stored sorted ascending.
struct PoolPartition {
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> pool_idx;
    std::vector<std::size_t> test_idx;
};

/**
 * Simulated annotator. Pool labels may only be read after reveal(); the
 * experiment engine marks train/test indices as revealed up front.
 */
class LabelOracle {
  public:
    explicit LabelOracle(const Dataset& source);

    /// Release labels for the given indices. Idempotent per index; out-of-range
    /// indices are an error.
    std::vector<int> reveal(std::span<const std::size_t> indices);

    /// Mark indices as labeled without going through a query (seed/test sets).
    void mark_revealed(std::span<const std::size_t> indices);

    /// Label of a revealed sample; throws DataError on an unrevealed read.
    int label(std::size_t index) const;

    bool is_revealed(std::size_t index) const;
    std::vector<int> labels_for(std::span<const std::size_t> indices) const;

  private:
    const Dataset* source_;
    std::vector<std::uint8_t> revealed_;
};

/// Parse a big-endian IDX image/label file pair (gzip detected transparently).
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Parse a header-less numeric CSV; label_column holds non-negative class ids.
Dataset load_csv(const std::string& path, std::size_t label_column);

/**
 * Deterministic Gaussian blobs: class c is centered on a unit-hypercube corner
 * scaled by 10, isotropic noise with the given spread. A fraction of each
 * class is relabeled to a uniformly random different class and flagged as an
 * outlier.
 */
Dataset synth_blobs(std::size_t num_classes, std::size_t per_class,
                    std::size_t feature_dim, double spread,
                    double outlier_fraction, std::uint64_t seed);

/// Draw the test set, then the initial train set, uniformly without
/// replacement; the remainder becomes the pool.
PoolPartition split_initial(const Dataset& dataset, std::size_t initial_train,
                            double test_fraction, std::uint64_t seed);

/// Partition when the last fixed_test_count rows are a dedicated test set
/// (separate IDX test files appended to the train data).
PoolPartition split_with_fixed_test(const Dataset& dataset, std::size_t initial_train,
                                    std::size_t fixed_test_count, std::uint64_t seed);

/// Row-wise concatenation; num_classes becomes the max of the two.
Dataset concat_datasets(const Dataset& a, const Dataset& b);

}  // namespace gauss
