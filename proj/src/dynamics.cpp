#include "gauss/dynamics.hpp"

#include <sstream>
#include <stdexcept>

namespace gauss {

SwitchTracker::SwitchTracker(std::size_t sample_count)
    : last_prediction_(sample_count, -1), count_(sample_count, 0) {}

void SwitchTracker::record_predictions(std::span<const int> predictions) {
    if (predictions.size() != count_.size()) {
        throw std::invalid_argument("SwitchTracker: prediction length mismatch");
    }
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (last_prediction_[i] >= 0 && predictions[i] != last_prediction_[i]) {
            ++count_[i];
        }
        last_prediction_[i] = predictions[i];
    }
    ++epochs_seen_;
}

std::vector<std::int64_t> SwitchTracker::counts() const {
    if (epochs_seen_ == 0) {
        throw std::logic_error("SwitchTracker: counts() before any record call");
    }
    return count_;
}

ForgettingTracker::ForgettingTracker(std::size_t sample_count)
    : last_correct_(sample_count, -1), count_(sample_count, 0) {}

void ForgettingTracker::record_labeled(std::span<const int> predictions,
                                       std::span<const int> labels) {
    if (predictions.size() != count_.size() || labels.size() != count_.size()) {
        throw std::invalid_argument("ForgettingTracker: length mismatch");
    }
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const std::int8_t correct = predictions[i] == labels[i] ? 1 : 0;
        if (last_correct_[i] == 1 && correct == 0) ++count_[i];
        last_correct_[i] = correct;
    }
    ++epochs_seen_;
}

std::vector<std::int64_t> ForgettingTracker::counts() const {
    if (epochs_seen_ == 0) {
        throw std::logic_error("ForgettingTracker: counts() before any record call");
    }
    return count_;
}

std::string events_to_csv(std::span<const std::size_t> sample_indices,
                          std::span<const std::int64_t> switch_counts,
                          const std::vector<std::int64_t>* forget_counts,
                          std::size_t epochs_seen) {
    std::ostringstream out;
    out << "sample_index,switch_count,forget_count,epochs_seen\n";
    for (std::size_t i = 0; i < sample_indices.size(); ++i) {
        out << sample_indices[i] << ',' << switch_counts[i] << ',';
        if (forget_counts != nullptr) out << (*forget_counts)[i];
        out << ',' << epochs_seen << '\n';
    }
    return out.str();
}

}  // namespace gauss
