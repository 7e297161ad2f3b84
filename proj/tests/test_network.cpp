#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "gauss/dataset.hpp"
#include "gauss/errors.hpp"
#include "gauss/network.hpp"

using namespace gauss;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.data) v = dist(rng);
    return m;
}

// Single-layer model with identity weights: features pass through as logits.
MlpModel identity_model(std::size_t dim) {
    MlpModel m;
    m.layer_sizes = {dim, dim};
    Matrix w(dim, dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) w.at(i, i) = 1.0;
    m.weights.push_back(w);
    m.biases.emplace_back(dim, 0.0);
    return m;
}

}  // namespace

TEST_CASE("init_model shapes and determinism") {
    SUBCASE("identical seeds give identical parameters") {
        const MlpModel a = init_model({{2, 3, 2}, 1});
        const MlpModel b = init_model({{2, 3, 2}, 1});
        for (std::size_t l = 0; l < a.num_layers(); ++l) {
            CHECK(a.weights[l].data == b.weights[l].data);
            CHECK(a.biases[l] == b.biases[l]);
        }
    }
    SUBCASE("single entry is rejected") {
        CHECK_THROWS_AS(init_model({{2}, 0}), ConfigError);
    }
    SUBCASE("weight matrices chain") {
        const MlpModel m = init_model({{784, 256, 10}, 0});
        REQUIRE(m.num_layers() == 2);
        CHECK(m.weights[0].rows == 784);
        CHECK(m.weights[0].cols == 256);
        CHECK(m.weights[1].rows == 256);
        CHECK(m.weights[1].cols == 10);
        const double bound = 1.0 / std::sqrt(784.0);
        for (double v : m.weights[0].data) CHECK(std::abs(v) <= bound);
        for (double v : m.biases[0]) CHECK(v == 0.0);
    }
}

TEST_CASE("forward basics") {
    SUBCASE("zero weights give zero logits") {
        MlpModel m = init_model({{3, 4, 2}, 0});
        for (auto& w : m.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
        const Matrix logits = forward(m, random_matrix(5, 3, 1));
        for (double v : logits.data) CHECK(v == 0.0);
    }
    SUBCASE("one-hot input on an identity-like layer copies the weight row") {
        MlpModel m;
        m.layer_sizes = {3, 2};
        Matrix w(3, 2);
        w.data = {1, 2, 3, 4, 5, 6};
        m.weights.push_back(w);
        m.biases.emplace_back(2, 0.0);
        Matrix x(1, 3, 0.0);
        x.at(0, 1) = 1.0;
        const Matrix logits = forward(m, x);
        CHECK(logits.at(0, 0) == 3.0);
        CHECK(logits.at(0, 1) == 4.0);
    }
    SUBCASE("empty batch gives empty logits") {
        const MlpModel m = init_model({{3, 2}, 0});
        const Matrix logits = forward(m, Matrix(0, 3));
        CHECK(logits.rows == 0);
    }
    SUBCASE("dimension mismatch throws") {
        const MlpModel m = init_model({{3, 2}, 0});
        CHECK_THROWS_AS(forward(m, Matrix(1, 4)), std::invalid_argument);
    }
}

TEST_CASE("softmax values and stability") {
    SUBCASE("uniform logits") {
        const auto p = softmax(std::vector<double>{0, 0, 0, 0});
        for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("extreme logits stay finite") {
        const auto p = softmax(std::vector<double>{1000.0, 0.0});
        CHECK(p[0] == doctest::Approx(1.0));
        CHECK(p[1] == doctest::Approx(0.0));
        CHECK(std::isfinite(p[0]));
        CHECK(std::isfinite(p[1]));
    }
    SUBCASE("hand value at log-odds 1:3") {
        const auto p = softmax(std::vector<double>{std::log(1.0), std::log(3.0)});
        CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("non-finite input throws") {
        CHECK_THROWS_AS(softmax(std::vector<double>{1.0, std::nan("")}),
                        std::invalid_argument);
    }
    SUBCASE("rows always sum to one") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> dist(-30.0, 30.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> logits(5);
            for (double& v : logits) v = dist(rng);
            const auto p = softmax(logits);
            double sum = 0.0;
            for (double v : p) {
                REQUIRE(std::isfinite(v));
                REQUIRE(v >= 0.0);
                sum += v;
            }
            REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    // [4,5,3] model, 6 samples, h = 1e-5, max relative error < 1e-4
    MlpModel model = init_model({{4, 5, 3}, 12345});
    const Matrix batch = random_matrix(6, 4, 777);
    const std::vector<int> labels = {0, 2, 1, 1, 0, 2};

    Gradients analytic;
    cross_entropy(model, batch, labels, &analytic);

    const double h = 1e-5;
    double max_rel = 0.0;
    auto check_param = [&](double& param, double analytic_grad) {
        const double saved = param;
        param = saved + h;
        const double lp = cross_entropy(model, batch, labels);
        param = saved - h;
        const double lm = cross_entropy(model, batch, labels);
        param = saved;
        const double fd = (lp - lm) / (2.0 * h);
        const double rel =
            std::abs(analytic_grad - fd) / std::max({std::abs(analytic_grad), std::abs(fd), 1e-6});
        max_rel = std::max(max_rel, rel);
    };
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        for (std::size_t i = 0; i < model.weights[l].data.size(); ++i) {
            check_param(model.weights[l].data[i], analytic.weights[l].data[i]);
        }
        for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
            check_param(model.biases[l][i], analytic.biases[l][i]);
        }
    }
    CHECK(max_rel < 1e-4);
}

TEST_CASE("adam with zero learning rate is a no-op") {
    MlpModel model = init_model({{3, 4, 2}, 5});
    const MlpModel before = model;
    AdamState state = init_adam(model, 0.0);
    const Matrix batch = random_matrix(8, 3, 2);
    const std::vector<int> labels = {0, 1, 0, 1, 1, 0, 1, 0};
    for (int step = 0; step < 5; ++step) train_step(model, state, batch, labels);
    CHECK(state.step_count == 5);
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        CHECK(model.weights[l].data == before.weights[l].data);
        CHECK(model.biases[l] == before.biases[l]);
    }
}

TEST_CASE("training drives separable blobs to perfect train accuracy") {
    const Dataset ds = synth_blobs(2, 60, 2, 0.5, 0.0, 21);
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Matrix features = ds.gather(all);

    // Separability oracle: the perceptron rule converges on this data.
    {
        std::vector<double> w = {0.0, 0.0, 0.0};  // bias, x, y
        bool converged = false;
        for (int epoch = 0; epoch < 200 && !converged; ++epoch) {
            converged = true;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                const double y = ds.labels[i] == 1 ? 1.0 : -1.0;
                const double act = w[0] + w[1] * features.at(i, 0) + w[2] * features.at(i, 1);
                if (y * act <= 0.0) {
                    w[0] += y;
                    w[1] += y * features.at(i, 0);
                    w[2] += y * features.at(i, 1);
                    converged = false;
                }
            }
        }
        REQUIRE(converged);  // data is linearly separable
    }

    MlpModel model = init_model({{2, 8, 2}, 3});
    TrainConfig cfg;
    cfg.epochs_per_round = 20;
    cfg.learning_rate = 0.05;
    cfg.shuffle_seed = 4;
    std::size_t callbacks = 0;
    train_epochs(model, features, ds.labels, cfg,
                 [&](std::size_t, const MlpModel&) { ++callbacks; });
    CHECK(callbacks == 20);
    CHECK(accuracy(model, features, ds.labels) == doctest::Approx(1.0));
}

TEST_CASE("train_epochs argument checks and determinism") {
    const Dataset ds = synth_blobs(2, 20, 2, 1.0, 0.0, 8);
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Matrix features = ds.gather(all);

    TrainConfig cfg;
    cfg.epochs_per_round = 0;
    MlpModel m = init_model({{2, 4, 2}, 0});
    CHECK_THROWS_AS(train_epochs(m, features, ds.labels, cfg), std::invalid_argument);

    cfg.epochs_per_round = 3;
    CHECK_THROWS_AS(train_epochs(m, Matrix(0, 2), std::vector<int>{}, cfg),
                    std::invalid_argument);

    MlpModel a = init_model({{2, 4, 2}, 7});
    MlpModel b = init_model({{2, 4, 2}, 7});
    cfg.learning_rate = 0.01;
    cfg.shuffle_seed = 5;
    train_epochs(a, features, ds.labels, cfg);
    train_epochs(b, features, ds.labels, cfg);
    for (std::size_t l = 0; l < a.num_layers(); ++l) {
        CHECK(a.weights[l].data == b.weights[l].data);
    }
}

TEST_CASE("per-step loss on a fixed batch is non-increasing at a tiny learning rate") {
    const Dataset ds = synth_blobs(3, 40, 2, 1.0, 0.0, 13);
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Matrix batch = ds.gather(all);

    MlpModel model = init_model({{2, 8, 3}, 17});
    AdamState state = init_adam(model, 1e-5);

    std::size_t increases = 0;
    const std::size_t steps = 200;
    double prev = cross_entropy(model, batch, ds.labels);
    for (std::size_t s = 0; s < steps; ++s) {
        train_step(model, state, batch, ds.labels);
        const double now = cross_entropy(model, batch, ds.labels);
        if (now > prev) ++increases;
        prev = now;
    }
    CHECK(double(increases) <= 0.01 * double(steps) + 1e-9);
}

TEST_CASE("predict ties break low and embed falls through") {
    SUBCASE("argmax and tie rule") {
        const MlpModel m = identity_model(3);
        Matrix x(2, 3);
        x.data = {0.1, 0.9, 0.3, 0.5, 0.5, 0.0};
        const auto preds = predict(m, x);
        CHECK(preds[0] == 1);
        CHECK(preds[1] == 0);  // tie goes to the lowest class
        CHECK(predict(m, Matrix(0, 3)).empty());
    }
    SUBCASE("embedding dimensionality") {
        const MlpModel m = init_model({{4, 8, 3}, 2});
        const Matrix e = embed(m, random_matrix(5, 4, 3));
        CHECK(e.rows == 5);
        CHECK(e.cols == 8);
    }
    SUBCASE("single-layer model embeds raw features") {
        const MlpModel m = identity_model(3);
        const Matrix x = random_matrix(4, 3, 9);
        const Matrix e = embed(m, x);
        CHECK(e.data == x.data);
    }
    SUBCASE("zero input and zero biases embed to zero") {
        const MlpModel m = init_model({{2, 4, 2}, 1});
        const Matrix e = embed(m, Matrix(3, 2, 0.0));
        for (double v : e.data) CHECK(v == 0.0);
    }
}

TEST_CASE("accuracy arithmetic") {
    const MlpModel m = identity_model(2);
    Matrix x(4, 2);
    x.data = {1, 0, 1, 0, 0, 1, 0, 1};  // preds: 0,0,1,1
    CHECK(accuracy(m, x, std::vector<int>{0, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(accuracy(m, x, std::vector<int>{1, 1, 0, 0}) == doctest::Approx(0.0));
    CHECK(accuracy(m, x, std::vector<int>{0, 0, 1, 0}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(accuracy(m, x, std::vector<int>{0}), std::invalid_argument);
}

TEST_CASE("checkpoint round trip") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "gauss_ckpt_test";
    fs::create_directories(dir);
    const fs::path path = dir / "model.gaml";

    const MlpModel model = init_model({{3, 5, 2}, 99});
    save_checkpoint(model, path.string());
    const MlpModel loaded = load_checkpoint(path.string());
    CHECK(loaded.layer_sizes == model.layer_sizes);
    for (std::size_t l = 0; l < model.num_layers(); ++l) {
        CHECK(loaded.weights[l].data == model.weights[l].data);
        CHECK(loaded.biases[l] == model.biases[l]);
    }

    SUBCASE("bad magic is rejected") {
        std::ofstream(dir / "bad.gaml", std::ios::binary) << "NOPE0000";
        CHECK_THROWS_AS(load_checkpoint((dir / "bad.gaml").string()), DataError);
    }
    SUBCASE("truncation is detected") {
        auto bytes = [&] {
            std::ifstream in(path, std::ios::binary);
            return std::string(std::istreambuf_iterator<char>(in), {});
        }();
        std::ofstream(dir / "trunc.gaml", std::ios::binary)
            << bytes.substr(0, bytes.size() / 2);
        CHECK_THROWS_AS(load_checkpoint((dir / "trunc.gaml").string()), DataError);
    }
}
