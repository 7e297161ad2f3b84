#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gauss {

/// Counts prediction switches per sample across an epoch-indexed stream of
/// predictions. The first record call is the baseline and counts nothing.
class SwitchTracker {
  public:
    explicit SwitchTracker(std::size_t sample_count);

    void record_predictions(std::span<const int> predictions);

    /// Snapshot of per-sample switch counts in canonical order.
    std::vector<std::int64_t> counts() const;

    std::size_t epochs_seen() const { return epochs_seen_; }
    std::size_t size() const { return count_.size(); }

  private:
    std::vector<int> last_prediction_;  // -1 before the baseline call
    std::vector<std::int64_t> count_;
    std::size_t epochs_seen_ = 0;
};

/// Counts correct-to-incorrect transitions per sample; needs labels, so it
/// only runs on annotated data.
class ForgettingTracker {
  public:
    explicit ForgettingTracker(std::size_t sample_count);

    void record_labeled(std::span<const int> predictions, std::span<const int> labels);

    std::vector<std::int64_t> counts() const;

    std::size_t epochs_seen() const { return epochs_seen_; }
    std::size_t size() const { return count_.size(); }

  private:
    std::vector<std::int8_t> last_correct_;  // -1 before the baseline call
    std::vector<std::int64_t> count_;
    std::size_t epochs_seen_ = 0;
};

/// Event-count dump: sample_index, switch_count, forget_count (empty when
/// unlabeled), epochs_seen. Returns full CSV text including the header row.
std::string events_to_csv(std::span<const std::size_t> sample_indices,
                          std::span<const std::int64_t> switch_counts,
                          const std::vector<std::int64_t>* forget_counts,
                          std::size_t epochs_seen);

}  // namespace gauss
