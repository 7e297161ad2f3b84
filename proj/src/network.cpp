#include "gauss/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gauss/errors.hpp"
#include "gauss/rng.hpp"

namespace gauss {

namespace {

Gradients zeros_like(const MlpModel& model) {
    Gradients g;
    g.weights.reserve(model.weights.size());
    g.biases.reserve(model.biases.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        g.weights.emplace_back(model.weights[l].rows, model.weights[l].cols, 0.0);
        g.biases.emplace_back(model.biases[l].size(), 0.0);
    }
    return g;
}

// out = a * W + bias, rows of `a` against columns of W.
Matrix affine(const Matrix& a, const Matrix& w, const std::vector<double>& bias) {
    Matrix out(a.rows, w.cols);
    for (std::size_t r = 0; r < a.rows; ++r) {
        double* orow = out.data.data() + r * out.cols;
        for (std::size_t c = 0; c < w.cols; ++c) orow[c] = bias[c];
        const double* arow = a.data.data() + r * a.cols;
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* wrow = w.data.data() + k * w.cols;
            for (std::size_t c = 0; c < w.cols; ++c) orow[c] += av * wrow[c];
        }
    }
    return out;
}

void relu_inplace(Matrix& m) {
    for (double& v : m.data) v = v > 0.0 ? v : 0.0;
}

}  // namespace

MlpModel init_model(const MlpConfig& config) {
    if (config.layer_sizes.size() < 2) {
        throw ConfigError("init_model: need >=2 layer sizes (input dim and num classes)");
    }
    for (std::size_t s : config.layer_sizes) {
        if (s == 0) throw ConfigError("init_model: zero layer size");
    }
    MlpModel model;
    model.layer_sizes = config.layer_sizes;
    auto rng = make_engine(config.init_seed);
    for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
        const std::size_t fan_in = config.layer_sizes[l];
        const std::size_t fan_out = config.layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(double(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(fan_in, fan_out);
        for (double& v : w.data) v = dist(rng);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

AdamState init_adam(const MlpModel& model, double learning_rate) {
    AdamState s;
    s.first_moment = zeros_like(model);
    s.second_moment = zeros_like(model);
    s.learning_rate = learning_rate;
    return s;
}

Matrix forward(const MlpModel& model, const Matrix& batch, ForwardCache* cache) {
    if (batch.cols != model.input_dim() && batch.rows > 0) {
        throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols) +
                                    " columns, model expects " +
                                    std::to_string(model.input_dim()));
    }
    if (cache != nullptr) {
        cache->activations.clear();
        cache->activations.push_back(batch);
    }
    Matrix a = batch;
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        Matrix z = affine(a, model.weights[l], model.biases[l]);
        if (l + 1 < model.num_layers()) relu_inplace(z);
        if (cache != nullptr) cache->activations.push_back(z);
        a = std::move(z);
    }
    return a;
}

std::vector<double> softmax(std::span<const double> logits) {
    for (double v : logits) {
        if (!std::isfinite(v)) throw std::invalid_argument("softmax: non-finite logit");
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double cross_entropy(const MlpModel& model, const Matrix& batch,
                     std::span<const int> labels, Gradients* grads) {
    if (batch.rows != labels.size()) {
        throw std::invalid_argument("cross_entropy: batch/label length mismatch");
    }
    if (batch.rows == 0) throw std::invalid_argument("cross_entropy: empty batch");

    ForwardCache cache;
    Matrix logits = forward(model, batch, grads != nullptr ? &cache : nullptr);

    const std::size_t n = batch.rows;
    const std::size_t classes = model.num_classes();

    // Log-softmax per row; dZ = softmax - onehot, scaled by 1/n.
    Matrix dz;
    if (grads != nullptr) dz = Matrix(n, classes);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        auto lrow = logits.row(r);
        const double mx = *std::max_element(lrow.begin(), lrow.end());
        double sum = 0.0;
        for (std::size_t c = 0; c < classes; ++c) sum += std::exp(lrow[c] - mx);
        const double log_z = mx + std::log(sum);
        loss -= (lrow[labels[r]] - log_z);
        if (grads != nullptr) {
            for (std::size_t c = 0; c < classes; ++c) {
                dz.at(r, c) = std::exp(lrow[c] - log_z) / double(n);
            }
            dz.at(r, std::size_t(labels[r])) -= 1.0 / double(n);
        }
    }
    loss /= double(n);
    if (grads == nullptr) return loss;

    *grads = zeros_like(model);
    for (std::size_t l = model.num_layers(); l-- > 0;) {
        const Matrix& a_prev = cache.activations[l];
        Matrix& gw = grads->weights[l];
        std::vector<double>& gb = grads->biases[l];
        // gw = a_prev^T * dz; gb = column sums of dz.
        for (std::size_t r = 0; r < n; ++r) {
            const double* drow = dz.data.data() + r * dz.cols;
            const double* arow = a_prev.data.data() + r * a_prev.cols;
            for (std::size_t c = 0; c < dz.cols; ++c) gb[c] += drow[c];
            for (std::size_t k = 0; k < a_prev.cols; ++k) {
                const double av = arow[k];
                if (av == 0.0) continue;
                double* gwrow = gw.data.data() + k * gw.cols;
                for (std::size_t c = 0; c < dz.cols; ++c) gwrow[c] += av * drow[c];
            }
        }
        if (l == 0) break;
        // da_prev = dz * W^T, masked by the ReLU derivative.
        const Matrix& w = model.weights[l];
        Matrix da(n, w.rows);
        for (std::size_t r = 0; r < n; ++r) {
            const double* drow = dz.data.data() + r * dz.cols;
            double* darow = da.data.data() + r * da.cols;
            for (std::size_t k = 0; k < w.rows; ++k) {
                const double* wrow = w.data.data() + k * w.cols;
                double acc = 0.0;
                for (std::size_t c = 0; c < w.cols; ++c) acc += drow[c] * wrow[c];
                darow[k] = acc;
            }
            const double* arow = a_prev.data.data() + r * a_prev.cols;
            for (std::size_t k = 0; k < w.rows; ++k) {
                if (arow[k] <= 0.0) darow[k] = 0.0;
            }
        }
        dz = std::move(da);
    }
    return loss;
}

void adam_step(MlpModel& model, AdamState& state, const Gradients& grads) {
    state.step_count += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, double(state.step_count));
    const double corr2 = 1.0 - std::pow(b2, double(state.step_count));

    auto update = [&](double& param, double& m, double& v, double g) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        const double mhat = m / corr1;
        const double vhat = v / corr2;
        param -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    };

    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        auto& w = model.weights[l].data;
        auto& mw = state.first_moment.weights[l].data;
        auto& vw = state.second_moment.weights[l].data;
        const auto& gw = grads.weights[l].data;
        for (std::size_t i = 0; i < w.size(); ++i) update(w[i], mw[i], vw[i], gw[i]);

        auto& b = model.biases[l];
        auto& mb = state.first_moment.biases[l];
        auto& vb = state.second_moment.biases[l];
        const auto& gb = grads.biases[l];
        for (std::size_t i = 0; i < b.size(); ++i) update(b[i], mb[i], vb[i], gb[i]);
    }
}

double train_step(MlpModel& model, AdamState& state, const Matrix& batch,
                  std::span<const int> labels) {
    Gradients grads;
    const double loss = cross_entropy(model, batch, labels, &grads);
    adam_step(model, state, grads);
    return loss;
}

void train_epochs(MlpModel& model, const Matrix& inputs, std::span<const int> labels,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
    if (inputs.rows == 0) throw std::invalid_argument("train_epochs: empty train set");
    if (inputs.rows != labels.size()) {
        throw std::invalid_argument("train_epochs: input/label length mismatch");
    }
    if (config.epochs_per_round == 0) {
        throw std::invalid_argument("train_epochs: at least one epoch required");
    }

    const std::size_t n = inputs.rows;
    const std::size_t bs = std::min(config.minibatch_size == 0 ? n : config.minibatch_size, n);
    AdamState state = init_adam(model, config.learning_rate);
    auto rng = make_engine(config.shuffle_seed);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    Matrix batch;
    std::vector<int> batch_labels;
    for (std::size_t epoch = 0; epoch < config.epochs_per_round; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n; start += bs) {
            const std::size_t end = std::min(start + bs, n);  // final partial batch kept
            const std::size_t rows = end - start;
            batch = Matrix(rows, inputs.cols);
            batch_labels.resize(rows);
            for (std::size_t r = 0; r < rows; ++r) {
                const std::size_t src = order[start + r];
                std::copy_n(inputs.data.data() + src * inputs.cols, inputs.cols,
                            batch.data.data() + r * batch.cols);
                batch_labels[r] = labels[src];
            }
            train_step(model, state, batch, batch_labels);
        }
        if (on_epoch) on_epoch(epoch, model);
    }
}

std::vector<int> predict(const MlpModel& model, const Matrix& rows) {
    Matrix logits = forward(model, rows);
    std::vector<int> out(rows.rows);
    for (std::size_t r = 0; r < rows.rows; ++r) {
        auto row = logits.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[best]) best = c;  // ties keep the lowest class
        }
        out[r] = int(best);
    }
    return out;
}

Matrix embed(const MlpModel& model, const Matrix& rows) {
    if (model.num_layers() == 1) return rows;
    ForwardCache cache;
    forward(model, rows, &cache);
    return cache.activations[cache.activations.size() - 2];
}

double accuracy(const MlpModel& model, const Matrix& rows, std::span<const int> labels) {
    if (rows.rows != labels.size()) {
        throw std::invalid_argument("accuracy: row/label length mismatch");
    }
    if (labels.empty()) return 0.0;
    auto preds = predict(model, rows);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == labels[i]) ++correct;
    }
    return double(correct) / double(labels.size());
}

namespace {

void put_u32_le(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff),
                          (unsigned char)((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32_le(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError("checkpoint: truncated header");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64_le(std::ofstream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw DataError("checkpoint: truncated parameter payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_checkpoint(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("checkpoint: cannot open " + path + " for writing");
    out.write("GAML", 4);
    put_u32_le(out, 1);  // version
    put_u32_le(out, std::uint32_t(model.layer_sizes.size()));
    for (std::size_t s : model.layer_sizes) put_u32_le(out, std::uint32_t(s));
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        for (double v : model.weights[l].data) put_f64_le(out, v);
        for (double v : model.biases[l]) put_f64_le(out, v);
    }
    if (!out) throw DataError("checkpoint: write failure on " + path);
}

MlpModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "GAML", 4) != 0) {
        throw DataError("checkpoint: bad magic in " + path);
    }
    const std::uint32_t version = get_u32_le(in);
    if (version != 1) {
        throw DataError("checkpoint: unsupported version " + std::to_string(version));
    }
    const std::uint32_t n_layers = get_u32_le(in);
    if (n_layers < 2) throw DataError("checkpoint: need >=2 layer sizes");
    MlpModel model;
    model.layer_sizes.resize(n_layers);
    for (auto& s : model.layer_sizes) s = get_u32_le(in);
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        Matrix w(model.layer_sizes[l], model.layer_sizes[l + 1]);
        for (double& v : w.data) v = get_f64_le(in);
        std::vector<double> b(model.layer_sizes[l + 1]);
        for (double& v : b) v = get_f64_le(in);
        model.weights.push_back(std::move(w));
        model.biases.push_back(std::move(b));
    }
    return model;
}

}  // namespace gauss
