#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gauss/matrix.hpp"

namespace gauss {

struct MlpConfig {
    std::vector<std::size_t> layer_sizes;  // input dim, hidden..., num_classes
    std::uint64_t init_seed = 0;
};

/// Fully connected ReLU network with a linear output layer. All parameters
/// and arithmetic are 64-bit.
struct MlpModel {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;               // layer l: (in x out)
    std::vector<std::vector<double>> biases;   // layer l: (out)

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t num_classes() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }
};

/// Per-parameter gradient mirror of an MlpModel.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

struct AdamState {
    Gradients first_moment;
    Gradients second_moment;
    std::uint64_t step_count = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    std::size_t epochs_per_round = 30;
    std::size_t minibatch_size = 32;
    double learning_rate = 1e-4;
    std::uint64_t shuffle_seed = 0;
};

/// Post-activation values per layer; activations[0] is the input batch,
/// activations.back() holds the logits.
struct ForwardCache {
    std::vector<Matrix> activations;
};

/// Weights uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
MlpModel init_model(const MlpConfig& config);

AdamState init_adam(const MlpModel& model, double learning_rate);

Matrix forward(const MlpModel& model, const Matrix& batch, ForwardCache* cache = nullptr);

/// Numerically stable softmax of one logits row (max subtraction).
std::vector<double> softmax(std::span<const double> logits);

/// Mean cross-entropy over the batch, from log-softmax directly. When grads
/// is non-null the full parameter gradient is written there.
double cross_entropy(const MlpModel& model, const Matrix& batch,
                     std::span<const int> labels, Gradients* grads = nullptr);

void adam_step(MlpModel& model, AdamState& state, const Gradients& grads);

/// One gradient step on a minibatch; returns the pre-update loss.
double train_step(MlpModel& model, AdamState& state, const Matrix& batch,
                  std::span<const int> labels);

using EpochCallback = std::function<void(std::size_t epoch, const MlpModel& model)>;

/// Minibatch Adam with per-epoch reshuffling. The callback runs after each
/// epoch's final parameter update, exactly epochs_per_round times.
void train_epochs(MlpModel& model, const Matrix& inputs, std::span<const int> labels,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Argmax per row; ties go to the lowest class index.
std::vector<int> predict(const MlpModel& model, const Matrix& rows);

/// Last hidden layer activations; raw inputs for a single-layer model.
Matrix embed(const MlpModel& model, const Matrix& rows);

double accuracy(const MlpModel& model, const Matrix& rows, std::span<const int> labels);

// Versioned little-endian checkpoint: magic "GAML", u32 version, u32 layer
// count, u32 layer sizes, then f64 weights-before-biases per layer.
void save_checkpoint(const MlpModel& model, const std::string& path);
MlpModel load_checkpoint(const std::string& path);

}  // namespace gauss
