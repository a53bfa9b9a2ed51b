#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "barriers/classifiers.hpp"
#include "barriers/errors.hpp"
#include "models_detail.hpp"

namespace barriers {

MlpCore::MlpCore(std::size_t input_dim, int hidden_layers, int hidden_units, int class_count) {
    if (hidden_layers < 1 || hidden_units < 1 || class_count < 2 || input_dim == 0) {
        throw std::invalid_argument("invalid MLP architecture");
    }
    int fan_in = static_cast<int>(input_dim);
    for (int l = 0; l < hidden_layers; ++l) {
        fan_in_.push_back(fan_in);
        fan_out_.push_back(hidden_units);
        fan_in = hidden_units;
    }
    fan_in_.push_back(fan_in);
    fan_out_.push_back(class_count);
    for (std::size_t l = 0; l < fan_in_.size(); ++l) {
        weight_offset_.push_back(param_count_);
        param_count_ += static_cast<std::size_t>(fan_out_[l]) * static_cast<std::size_t>(fan_in_[l]);
        bias_offset_.push_back(param_count_);
        param_count_ += static_cast<std::size_t>(fan_out_[l]);
    }
}

void MlpCore::he_init(std::span<double> params, Rng& rng) const {
    for (std::size_t l = 0; l < fan_in_.size(); ++l) {
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in_[l]));
        const std::size_t n = static_cast<std::size_t>(fan_out_[l]) * static_cast<std::size_t>(fan_in_[l]);
        for (std::size_t i = 0; i < n; ++i) {
            params[weight_offset_[l] + i] = rng.next_normal() * scale;
        }
        for (int i = 0; i < fan_out_[l]; ++i) {
            params[bias_offset_[l] + static_cast<std::size_t>(i)] = 0.0;
        }
    }
}

namespace {

// z = W a + b for one layer; `a` is dense.
void affine_dense(std::span<const double> params, std::size_t w_off, std::size_t b_off,
                  int fan_out, int fan_in, std::span<const double> a, std::span<double> z) {
    for (int o = 0; o < fan_out; ++o) {
        const std::size_t row = w_off + static_cast<std::size_t>(o) * static_cast<std::size_t>(fan_in);
        double sum = params[b_off + static_cast<std::size_t>(o)];
        for (int i = 0; i < fan_in; ++i) {
            sum += params[row + static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(i)];
        }
        z[static_cast<std::size_t>(o)] = sum;
    }
}

// First layer consumes the sparse input directly.
void affine_sparse(std::span<const double> params, std::size_t w_off, std::size_t b_off,
                   int fan_out, int fan_in, const SparseVector& x, std::span<double> z) {
    for (int o = 0; o < fan_out; ++o) {
        const std::size_t row = w_off + static_cast<std::size_t>(o) * static_cast<std::size_t>(fan_in);
        double sum = params[b_off + static_cast<std::size_t>(o)];
        for (const auto& [col, value] : x.entries) {
            sum += params[row + col] * value;
        }
        z[static_cast<std::size_t>(o)] = sum;
    }
}

}  // namespace

std::vector<double> MlpCore::probabilities(const SparseVector& x,
                                           std::span<const double> params) const {
    const int L = layer_count();
    std::vector<double> act;
    std::vector<double> next;
    for (int l = 0; l < L; ++l) {
        next.assign(static_cast<std::size_t>(fan_out_[static_cast<std::size_t>(l)]), 0.0);
        if (l == 0) {
            affine_sparse(params, weight_offset_[0], bias_offset_[0], fan_out_[0], fan_in_[0], x,
                          next);
        } else {
            affine_dense(params, weight_offset_[static_cast<std::size_t>(l)],
                         bias_offset_[static_cast<std::size_t>(l)],
                         fan_out_[static_cast<std::size_t>(l)],
                         fan_in_[static_cast<std::size_t>(l)], act, next);
        }
        if (l + 1 < L) {
            for (double& v : next) {
                v = std::max(v, 0.0);  // ReLU
            }
        }
        act = next;
    }
    softmax_inplace(act);
    return act;
}

double MlpCore::loss_and_grad(const SparseMatrix& X, const std::vector<int>& y,
                              std::span<const std::size_t> batch, std::span<const double> params,
                              std::span<double> grad, Rng* dropout_rng,
                              double dropout_rate) const {
    const bool want_grad = !grad.empty();
    if (want_grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    const int L = layer_count();
    const double keep = 1.0 - dropout_rate;

    // activations[l] is the post-ReLU (and post-dropout) output of layer l.
    std::vector<std::vector<double>> activations(static_cast<std::size_t>(L));
    std::vector<std::vector<double>> masks(static_cast<std::size_t>(L));
    std::vector<std::vector<double>> deltas(static_cast<std::size_t>(L));

    double loss = 0.0;
    for (std::size_t i : batch) {
        const SparseVector& x = X[i];
        for (int l = 0; l < L; ++l) {
            const auto lu = static_cast<std::size_t>(l);
            activations[lu].assign(static_cast<std::size_t>(fan_out_[lu]), 0.0);
            if (l == 0) {
                affine_sparse(params, weight_offset_[0], bias_offset_[0], fan_out_[0], fan_in_[0],
                              x, activations[0]);
            } else {
                affine_dense(params, weight_offset_[lu], bias_offset_[lu], fan_out_[lu],
                             fan_in_[lu], activations[lu - 1], activations[lu]);
            }
            if (l + 1 < L) {
                for (double& v : activations[lu]) {
                    v = std::max(v, 0.0);
                }
                if (dropout_rng != nullptr && dropout_rate > 0.0) {
                    masks[lu].assign(activations[lu].size(), 1.0);
                    for (std::size_t u = 0; u < activations[lu].size(); ++u) {
                        // Inverted dropout: zero with probability rate, scale
                        // the kept units by 1/keep.
                        if (dropout_rng->next_unit() < dropout_rate) {
                            masks[lu][u] = 0.0;
                        } else {
                            masks[lu][u] = 1.0 / keep;
                        }
                        activations[lu][u] *= masks[lu][u];
                    }
                }
            }
        }
        std::vector<double> probs = activations[static_cast<std::size_t>(L - 1)];
        softmax_inplace(probs);
        loss -= std::log(std::max(probs[static_cast<std::size_t>(y[i])], 1e-300));
        if (!want_grad) {
            continue;
        }

        // Output delta: softmax + cross-entropy.
        auto& out_delta = deltas[static_cast<std::size_t>(L - 1)];
        out_delta = probs;
        out_delta[static_cast<std::size_t>(y[i])] -= 1.0;

        for (int l = L - 1; l >= 0; --l) {
            const auto lu = static_cast<std::size_t>(l);
            const auto& delta = deltas[lu];
            // Gradients of W_l and b_l.
            if (l == 0) {
                for (int o = 0; o < fan_out_[0]; ++o) {
                    const double d = delta[static_cast<std::size_t>(o)];
                    grad[bias_offset_[0] + static_cast<std::size_t>(o)] += d;
                    const std::size_t row =
                        weight_offset_[0] + static_cast<std::size_t>(o) *
                                                static_cast<std::size_t>(fan_in_[0]);
                    for (const auto& [col, value] : x.entries) {
                        grad[row + col] += d * value;
                    }
                }
            } else {
                const auto& below = activations[lu - 1];
                for (int o = 0; o < fan_out_[lu]; ++o) {
                    const double d = delta[static_cast<std::size_t>(o)];
                    grad[bias_offset_[lu] + static_cast<std::size_t>(o)] += d;
                    const std::size_t row =
                        weight_offset_[lu] + static_cast<std::size_t>(o) *
                                                 static_cast<std::size_t>(fan_in_[lu]);
                    for (int in = 0; in < fan_in_[lu]; ++in) {
                        grad[row + static_cast<std::size_t>(in)] +=
                            d * below[static_cast<std::size_t>(in)];
                    }
                }
                // Delta for the layer below (through dropout mask and ReLU).
                auto& below_delta = deltas[lu - 1];
                below_delta.assign(below.size(), 0.0);
                for (int o = 0; o < fan_out_[lu]; ++o) {
                    const double d = delta[static_cast<std::size_t>(o)];
                    const std::size_t row =
                        weight_offset_[lu] + static_cast<std::size_t>(o) *
                                                 static_cast<std::size_t>(fan_in_[lu]);
                    for (int in = 0; in < fan_in_[lu]; ++in) {
                        below_delta[static_cast<std::size_t>(in)] +=
                            d * params[row + static_cast<std::size_t>(in)];
                    }
                }
                for (std::size_t u = 0; u < below_delta.size(); ++u) {
                    if (!masks[lu - 1].empty()) {
                        below_delta[u] *= masks[lu - 1][u];
                    }
                    if (below[u] <= 0.0) {
                        below_delta[u] = 0.0;  // ReLU gate
                    }
                }
            }
        }
    }
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    if (want_grad) {
        for (double& g : grad) {
            g *= inv_batch;
        }
    }
    return loss * inv_batch;
}

std::unique_ptr<TrainedModel> train_mlp(const SparseMatrix& X, const std::vector<int>& y,
                                        const DatasetMeta& meta, const TrainConfig& config) {
    config.validate();
    if (X.size() != y.size()) {
        throw std::invalid_argument("feature matrix and label list differ in length");
    }
    if (X.empty()) {
        throw std::invalid_argument("cannot train on an empty dataset");
    }
    {
        std::set<int> distinct(y.begin(), y.end());
        if (distinct.size() < 2) {
            throw std::invalid_argument(
                "mlp needs at least two classes present in the training labels");
        }
    }
    MlpCore core(meta.vocab_size, config.hidden_layers, config.hidden_units,
                 static_cast<int>(meta.class_names.size()));
    std::vector<double> params(core.param_count(), 0.0);
    Rng init_rng(substream_seed(config.seed, "mlp:init"));
    core.he_init(params, init_rng);
    Rng dropout_rng(substream_seed(config.seed, "mlp:dropout"));

    AdamOptimizer adam(params.size(), config.learning_rate, config.adam_beta1, config.adam_beta2,
                       config.adam_epsilon);
    Rng shuffle_rng(substream_seed(config.seed, "mlp:shuffle"));
    std::vector<std::size_t> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(params.size());
    std::vector<double> epoch_losses;
    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    Rng* mask_rng = config.dropout_rate > 0.0 ? &dropout_rng : nullptr;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double weighted_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t len = std::min(batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            const double loss =
                core.loss_and_grad(X, y, batch, params, grad, mask_rng, config.dropout_rate);
            adam.step(params, grad);
            weighted_loss += loss * static_cast<double>(len);
        }
        epoch_losses.push_back(weighted_loss / static_cast<double>(order.size()));
    }
    return std::make_unique<detail::MlpModel>(meta, config.hidden_layers, config.hidden_units,
                                              std::move(params), std::move(epoch_losses));
}

}  // namespace barriers
