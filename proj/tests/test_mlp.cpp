#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "barriers/classifiers.hpp"
#include "barriers/rng.hpp"

using namespace barriers;

namespace {

SparseMatrix random_batch(Rng& rng, std::size_t rows, std::size_t dim) {
    SparseMatrix X;
    for (std::size_t r = 0; r < rows; ++r) {
        SparseVector v;
        v.dim = dim;
        for (std::size_t c = 0; c < dim; ++c) {
            if (rng.next_unit() < 0.7) {
                v.entries.emplace_back(c, rng.next_unit() * 2.0 - 1.0);
            }
        }
        X.push_back(std::move(v));
    }
    return X;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, int classes) {
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        y.push_back(static_cast<int>(rng.next_below(static_cast<std::size_t>(classes))));
    }
    for (int c = 0; c < classes && static_cast<std::size_t>(c) < n; ++c) {
        y[static_cast<std::size_t>(c)] = c;
    }
    return y;
}

// Guarded relative error, the usual gradient-check form: tiny components are
// compared absolutely (denominator floor), large ones relatively.
double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1e-3, std::abs(analytic) + std::abs(numeric));
}

// Central finite differences of `loss` with respect to params[i].
template <typename Loss>
double max_gradient_error(std::vector<double>& params, const std::vector<double>& analytic,
                          Loss&& loss, double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double up = loss();
        params[i] = saved - h;
        const double down = loss();
        params[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, relative_error(analytic[i], numeric));
    }
    return worst;
}

}  // namespace

TEST_CASE("softmax output sums to one for arbitrary logits") {
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> logits(2 + rng.next_below(5));
        for (double& v : logits) {
            v = (rng.next_unit() - 0.5) * 60.0;
        }
        softmax_inplace(logits);
        CHECK(std::abs(std::accumulate(logits.begin(), logits.end(), 0.0) - 1.0) <= 1e-6);
        for (double v : logits) {
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("logistic gradients match central finite differences") {
    Rng rng(42);
    const std::size_t dim = 5;
    const int classes = 3;
    LogisticCore core(dim, classes, 1e-4);
    const SparseMatrix X = random_batch(rng, 6, dim);
    const std::vector<int> y = random_labels(rng, 6, classes);
    std::vector<std::size_t> batch(X.size());
    std::iota(batch.begin(), batch.end(), 0);

    for (int round = 0; round < 2; ++round) {
        std::vector<double> params(core.param_count(), 0.0);
        if (round == 1) {
            // "after one epoch": take a few Adam steps first.
            TrainConfig config;
            AdamOptimizer adam(params.size(), config.learning_rate, config.adam_beta1,
                               config.adam_beta2, config.adam_epsilon);
            std::vector<double> grad(params.size());
            for (int step = 0; step < 5; ++step) {
                core.loss_and_grad(X, y, batch, params, grad);
                adam.step(params, grad);
            }
        }
        std::vector<double> analytic(params.size());
        core.loss_and_grad(X, y, batch, params, analytic);
        const double err = max_gradient_error(params, analytic, [&] {
            return core.loss_and_grad(X, y, batch, params, {});
        });
        CHECK(err <= 1e-4);
    }
}

TEST_CASE("mlp gradients match central finite differences") {
    Rng rng(43);
    const std::size_t dim = 5;
    const int classes = 3;
    MlpCore core(dim, 2, 6, classes);  // small but multi-layer
    const SparseMatrix X = random_batch(rng, 5, dim);
    const std::vector<int> y = random_labels(rng, 5, classes);
    std::vector<std::size_t> batch(X.size());
    std::iota(batch.begin(), batch.end(), 0);

    std::vector<double> params(core.param_count());
    Rng init(substream_seed(9, "mlp:init"));
    core.he_init(params, init);

    for (int round = 0; round < 2; ++round) {
        if (round == 1) {
            AdamOptimizer adam(params.size(), 0.001, 0.9, 0.999, 1e-8);
            std::vector<double> grad(params.size());
            for (int step = 0; step < 5; ++step) {
                core.loss_and_grad(X, y, batch, params, grad, nullptr, 0.0);
                adam.step(params, grad);
            }
        }
        std::vector<double> analytic(params.size());
        core.loss_and_grad(X, y, batch, params, analytic, nullptr, 0.0);
        const double err = max_gradient_error(params, analytic, [&] {
            return core.loss_and_grad(X, y, batch, params, {}, nullptr, 0.0);
        });
        CHECK(err <= 1e-4);
    }
}

TEST_CASE("mlp fits a separable toy set and outputs probabilities") {
    SparseMatrix X;
    std::vector<int> y;
    Rng rng(77);
    for (int i = 0; i < 40; ++i) {
        SparseVector v;
        v.dim = 4;
        const bool positive = i % 2 == 0;
        v.entries.emplace_back(0, positive ? 0.9 + rng.next_unit() * 0.1 : rng.next_unit() * 0.1);
        v.entries.emplace_back(1, rng.next_unit());
        X.push_back(std::move(v));
        y.push_back(positive ? 1 : 0);
    }
    TrainConfig config;
    config.hidden_layers = 2;
    config.hidden_units = 8;
    config.epochs = 30;
    config.batch_size = 8;
    config.seed = 20;
    const auto model = train_mlp(X, y, {{"neg", "pos"}, 4, 0}, config);
    const PredictionBatch batch = model->predict(X);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        correct += batch.predicted[i] == y[i];
        CHECK(std::abs(std::accumulate(batch.scores[i].begin(), batch.scores[i].end(), 0.0) -
                       1.0) <= 1e-6);
    }
    CHECK(correct == y.size());
}

TEST_CASE("mlp training is bit-reproducible for a fixed seed") {
    Rng rng(3111);
    const SparseMatrix X = random_batch(rng, 20, 6);
    const std::vector<int> y = random_labels(rng, 20, 2);
    TrainConfig config;
    config.hidden_layers = 3;
    config.hidden_units = 8;
    config.seed = 12345;
    config.dropout_rate = 0.0;
    const DatasetMeta meta{{"a", "b"}, 6, 0};
    const auto first = train_mlp(X, y, meta, config);
    const auto second = train_mlp(X, y, meta, config);
    REQUIRE(first->epoch_losses().size() == second->epoch_losses().size());
    for (std::size_t e = 0; e < first->epoch_losses().size(); ++e) {
        CHECK(first->epoch_losses()[e] == second->epoch_losses()[e]);
    }
    // Dropout draws from its own stream, so enabling it also stays reproducible.
    config.dropout_rate = 0.001;
    const auto third = train_mlp(X, y, meta, config);
    const auto fourth = train_mlp(X, y, meta, config);
    for (std::size_t e = 0; e < third->epoch_losses().size(); ++e) {
        CHECK(third->epoch_losses()[e] == fourth->epoch_losses()[e]);
    }
}

TEST_CASE("mlp per-epoch loss stays within the 10 percent sanity band") {
    Rng rng(555);
    SparseMatrix X;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        SparseVector v;
        v.dim = 6;
        const int cls = i % 2;
        v.entries.emplace_back(static_cast<std::size_t>(cls), 0.8 + rng.next_unit() * 0.2);
        v.entries.emplace_back(2 + rng.next_below(4), rng.next_unit() * 0.3);
        std::sort(v.entries.begin(), v.entries.end());
        v.entries.erase(std::unique(v.entries.begin(), v.entries.end(),
                                    [](const auto& a, const auto& b) { return a.first == b.first; }),
                        v.entries.end());
        X.push_back(std::move(v));
        y.push_back(cls);
    }
    TrainConfig config;
    config.hidden_layers = 3;
    config.hidden_units = 16;
    config.seed = 9;
    const auto model = train_mlp(X, y, {{"a", "b"}, 6, 0}, config);
    const auto& losses = model->epoch_losses();
    REQUIRE(losses.size() == static_cast<std::size_t>(config.epochs));
    for (std::size_t e = 1; e < losses.size(); ++e) {
        CHECK(losses[e] <= losses[e - 1] * 1.10);
    }
}
