#include "barriers/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "barriers/errors.hpp"
#include "models_detail.hpp"

namespace barriers {

namespace {

constexpr std::array<std::string_view, 5> kModelNames = {"lr", "nb", "knn", "dt", "mlp"};

int distinct_class_count(const std::vector<int>& y) {
    std::set<int> seen(y.begin(), y.end());
    return static_cast<int>(seen.size());
}

void check_labels(const std::vector<int>& y, const DatasetMeta& meta) {
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= meta.class_names.size()) {
            throw std::invalid_argument("training label out of range of the class list");
        }
    }
    if (y.empty()) {
        throw std::invalid_argument("cannot train on an empty dataset");
    }
}

}  // namespace

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {
        ModelKind::logistic_regression, ModelKind::naive_bayes, ModelKind::knn,
        ModelKind::decision_tree, ModelKind::mlp,
    };
    return kinds;
}

std::string_view to_string(ModelKind kind) {
    return kModelNames[static_cast<std::size_t>(kind)];
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kModelNames.size(); ++i) {
        if (kModelNames[i] == name) {
            return static_cast<ModelKind>(i);
        }
    }
    return std::nullopt;
}

void TrainConfig::validate() const {
    if (hidden_layers < 1 || hidden_units < 1 || epochs < 1 || batch_size < 1 || knn_k < 1 ||
        dt_max_depth < 1 || dt_min_leaf < 1) {
        throw ConfigError("training counts must be positive");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw ConfigError("dropout_rate must lie in [0, 1)");
    }
    if (learning_rate <= 0.0 || adam_epsilon <= 0.0 || nb_alpha <= 0.0 || l2_lambda < 0.0) {
        throw ConfigError("training rates must be positive");
    }
}

void softmax_inplace(std::span<double> logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - max_logit);
        sum += v;
    }
    for (double& v : logits) {
        v /= sum;
    }
}

double gini_impurity(std::span<const std::size_t> class_counts) {
    const auto total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    if (total == 0) {
        return 0.0;
    }
    double sum_sq = 0.0;
    for (std::size_t count : class_counts) {
        const double p = static_cast<double>(count) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

void TrainedModel::check_input(const SparseMatrix& X) const {
    for (const SparseVector& row : X) {
        if (row.dim != meta_.vocab_size) {
            throw std::invalid_argument("feature dimension " + std::to_string(row.dim) +
                                        " does not match the model vocabulary size " +
                                        std::to_string(meta_.vocab_size));
        }
    }
}

// --------------------------------------------------------------------------
// Adam

AdamOptimizer::AdamOptimizer(std::size_t n, double lr, double beta1, double beta2, double epsilon)
    : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double bias1 = 1.0 - std::pow(beta1_, t_);
    const double bias2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double m_hat = m_[i] / bias1;
        const double v_hat = v_[i] / bias2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + epsilon_);
    }
}

// --------------------------------------------------------------------------
// Logistic regression

LogisticCore::LogisticCore(std::size_t vocab_size, int class_count, double l2_lambda)
    : vocab_(vocab_size), classes_(class_count), l2_lambda_(l2_lambda) {}

std::vector<double> LogisticCore::probabilities(const SparseVector& x,
                                                std::span<const double> params) const {
    std::vector<double> logits(static_cast<std::size_t>(classes_));
    const std::size_t bias_base = vocab_ * static_cast<std::size_t>(classes_);
    for (int c = 0; c < classes_; ++c) {
        double z = params[bias_base + static_cast<std::size_t>(c)];
        const std::size_t row = static_cast<std::size_t>(c) * vocab_;
        for (const auto& [col, value] : x.entries) {
            z += params[row + col] * value;
        }
        logits[static_cast<std::size_t>(c)] = z;
    }
    softmax_inplace(logits);
    return logits;
}

double LogisticCore::loss_and_grad(const SparseMatrix& X, const std::vector<int>& y,
                                   std::span<const std::size_t> batch,
                                   std::span<const double> params, std::span<double> grad) const {
    const bool want_grad = !grad.empty();
    if (want_grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
    }
    const std::size_t bias_base = vocab_ * static_cast<std::size_t>(classes_);
    double loss = 0.0;
    for (std::size_t i : batch) {
        const auto probs = probabilities(X[i], params);
        loss -= std::log(std::max(probs[static_cast<std::size_t>(y[i])], 1e-300));
        if (!want_grad) {
            continue;
        }
        for (int c = 0; c < classes_; ++c) {
            const double g = probs[static_cast<std::size_t>(c)] - (c == y[i] ? 1.0 : 0.0);
            grad[bias_base + static_cast<std::size_t>(c)] += g;
            const std::size_t row = static_cast<std::size_t>(c) * vocab_;
            for (const auto& [col, value] : X[i].entries) {
                grad[row + col] += g * value;
            }
        }
    }
    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    loss *= inv_batch;
    if (want_grad) {
        for (double& g : grad) {
            g *= inv_batch;
        }
    }
    // L2 penalty on weights only; biases stay unpenalized.
    double penalty = 0.0;
    for (std::size_t i = 0; i < bias_base; ++i) {
        penalty += params[i] * params[i];
        if (want_grad) {
            grad[i] += l2_lambda_ * params[i];
        }
    }
    return loss + 0.5 * l2_lambda_ * penalty;
}

namespace {

// Shared Adam loop for the gradient-trained models. batch_loss must fill
// `grad` and return the batch loss.
template <typename BatchLoss>
std::vector<double> adam_training_loop(std::size_t n_instances, std::size_t param_count,
                                       std::span<double> params, const TrainConfig& config,
                                       std::uint64_t shuffle_seed, BatchLoss&& batch_loss,
                                       std::vector<double>& epoch_losses) {
    AdamOptimizer adam(param_count, config.learning_rate, config.adam_beta1, config.adam_beta2,
                       config.adam_epsilon);
    Rng shuffle_rng(shuffle_seed);
    std::vector<std::size_t> order(n_instances);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(param_count);
    const auto batch_size = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double weighted_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t len = std::min(batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            const double loss = batch_loss(batch, grad);
            adam.step(params, grad);
            weighted_loss += loss * static_cast<double>(len);
        }
        epoch_losses.push_back(weighted_loss / static_cast<double>(order.size()));
    }
    return epoch_losses;
}

}  // namespace

std::unique_ptr<TrainedModel> train_logistic(const SparseMatrix& X, const std::vector<int>& y,
                                             const DatasetMeta& meta, const TrainConfig& config) {
    config.validate();
    check_labels(y, meta);
    if (X.size() != y.size()) {
        throw std::invalid_argument("feature matrix and label list differ in length");
    }
    if (distinct_class_count(y) < 2) {
        throw std::invalid_argument(
            "logistic regression needs at least two classes present in the training labels");
    }
    const auto classes = static_cast<int>(meta.class_names.size());
    LogisticCore core(meta.vocab_size, classes, config.l2_lambda);
    std::vector<double> params(core.param_count(), 0.0);
    std::vector<double> epoch_losses;
    adam_training_loop(
        X.size(), params.size(), params, config, substream_seed(config.seed, "lr:shuffle"),
        [&](std::span<const std::size_t> batch, std::vector<double>& grad) {
            return core.loss_and_grad(X, y, batch, params, grad);
        },
        epoch_losses);
    return std::make_unique<detail::LogisticModel>(meta, config.l2_lambda, std::move(params),
                                                   std::move(epoch_losses));
}

// --------------------------------------------------------------------------
// Naive Bayes

std::unique_ptr<TrainedModel> train_naive_bayes(const SparseMatrix& X_counts,
                                                const std::vector<int>& y, const DatasetMeta& meta,
                                                double alpha) {
    check_labels(y, meta);
    if (X_counts.size() != y.size()) {
        throw std::invalid_argument("feature matrix and label list differ in length");
    }
    if (alpha <= 0.0) {
        throw std::invalid_argument("naive Bayes smoothing alpha must be positive");
    }
    const std::size_t C = meta.class_names.size();
    const std::size_t V = meta.vocab_size;

    std::vector<double> class_instances(C, 0.0);
    std::vector<double> token_counts(C * V, 0.0);
    std::vector<double> token_totals(C, 0.0);
    for (std::size_t i = 0; i < X_counts.size(); ++i) {
        const auto c = static_cast<std::size_t>(y[i]);
        class_instances[c] += 1.0;
        for (const auto& [col, count] : X_counts[i].entries) {
            token_counts[c * V + col] += count;
            token_totals[c] += count;
        }
    }
    std::vector<double> log_priors(C);
    std::vector<double> log_likelihoods(C * V);
    for (std::size_t c = 0; c < C; ++c) {
        if (class_instances[c] == 0.0) {
            throw std::invalid_argument("class '" + meta.class_names[c] +
                                        "' has no training instances");
        }
        log_priors[c] = std::log(class_instances[c] / static_cast<double>(y.size()));
        const double denom = token_totals[c] + alpha * static_cast<double>(V);
        for (std::size_t j = 0; j < V; ++j) {
            log_likelihoods[c * V + j] = std::log((token_counts[c * V + j] + alpha) / denom);
        }
    }
    return std::make_unique<detail::NaiveBayesModel>(meta, alpha, std::move(log_priors),
                                                     std::move(log_likelihoods));
}

// --------------------------------------------------------------------------
// k-nearest neighbors

std::unique_ptr<TrainedModel> train_knn(const SparseMatrix& X, const std::vector<int>& y,
                                        const DatasetMeta& meta, int k,
                                        std::vector<std::string>* warnings) {
    check_labels(y, meta);
    if (X.size() != y.size()) {
        throw std::invalid_argument("feature matrix and label list differ in length");
    }
    if (k < 1) {
        throw std::invalid_argument("knn requires k >= 1");
    }
    if (static_cast<std::size_t>(k) > X.size()) {
        if (warnings != nullptr) {
            warnings->push_back("knn k=" + std::to_string(k) + " exceeds training size " +
                                std::to_string(X.size()) + "; clamped");
        }
        k = static_cast<int>(X.size());
    }
    return std::make_unique<detail::KnnModel>(meta, k, X, y);
}

// --------------------------------------------------------------------------
// Decision tree

namespace {

struct TreeBuilder {
    const SparseMatrix& X;
    const std::vector<int>& y;
    std::size_t class_count;
    int max_depth;
    int min_leaf;
    std::vector<detail::TreeNode> nodes;

    int make_leaf(const std::vector<std::size_t>& counts) {
        detail::TreeNode node;
        node.class_counts = counts;
        nodes.push_back(std::move(node));
        return static_cast<int>(nodes.size() - 1);
    }

    int build(const std::vector<std::size_t>& idx, int depth) {
        std::vector<std::size_t> counts(class_count, 0);
        for (std::size_t i : idx) {
            ++counts[static_cast<std::size_t>(y[i])];
        }
        const double parent_gini = gini_impurity(counts);
        if (parent_gini == 0.0 || depth >= max_depth ||
            idx.size() < 2 * static_cast<std::size_t>(min_leaf)) {
            return make_leaf(counts);
        }

        // Candidate features: columns with a nonzero somewhere in this node;
        // all-zero columns have one distinct value and cannot split.
        std::vector<std::size_t> candidates;
        for (std::size_t i : idx) {
            for (const auto& [col, value] : X[i].entries) {
                candidates.push_back(col);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        double best_decrease = 1e-12;  // strict decrease, with an FP dust guard
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        const double n = static_cast<double>(idx.size());

        std::vector<std::pair<double, int>> values(idx.size());
        for (std::size_t feature : candidates) {
            for (std::size_t p = 0; p < idx.size(); ++p) {
                values[p] = {X[idx[p]].value_at(feature), y[idx[p]]};
            }
            std::sort(values.begin(), values.end());
            std::vector<std::size_t> left(class_count, 0);
            std::size_t left_n = 0;
            for (std::size_t p = 0; p + 1 < values.size(); ++p) {
                ++left[static_cast<std::size_t>(values[p].second)];
                ++left_n;
                if (values[p].first == values[p + 1].first) {
                    continue;  // not a boundary between distinct values
                }
                const std::size_t right_n = values.size() - left_n;
                if (left_n < static_cast<std::size_t>(min_leaf) ||
                    right_n < static_cast<std::size_t>(min_leaf)) {
                    continue;
                }
                std::vector<std::size_t> right(class_count, 0);
                for (std::size_t c = 0; c < class_count; ++c) {
                    right[c] = counts[c] - left[c];
                }
                const double weighted = (static_cast<double>(left_n) / n) * gini_impurity(left) +
                                        (static_cast<double>(right_n) / n) * gini_impurity(right);
                const double decrease = parent_gini - weighted;
                if (decrease > best_decrease) {
                    best_decrease = decrease;
                    best_feature = feature;
                    best_threshold = (values[p].first + values[p + 1].first) / 2.0;
                }
            }
        }
        if (best_decrease <= 1e-12) {
            return make_leaf(counts);
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            if (X[i].value_at(best_feature) <= best_threshold) {
                left_idx.push_back(i);
            } else {
                right_idx.push_back(i);
            }
        }
        detail::TreeNode node;
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        nodes.push_back(node);
        const auto self = static_cast<int>(nodes.size() - 1);
        const int left_child = build(left_idx, depth + 1);
        const int right_child = build(right_idx, depth + 1);
        nodes[static_cast<std::size_t>(self)].left = left_child;
        nodes[static_cast<std::size_t>(self)].right = right_child;
        return self;
    }
};

}  // namespace

std::unique_ptr<TrainedModel> train_decision_tree(const SparseMatrix& X, const std::vector<int>& y,
                                                  const DatasetMeta& meta, int max_depth,
                                                  int min_leaf) {
    check_labels(y, meta);
    if (X.size() != y.size()) {
        throw std::invalid_argument("feature matrix and label list differ in length");
    }
    if (max_depth < 1 || min_leaf < 1) {
        throw std::invalid_argument("decision tree needs max_depth >= 1 and min_leaf >= 1");
    }
    TreeBuilder builder{X, y, meta.class_names.size(), max_depth, min_leaf, {}};
    std::vector<std::size_t> idx(X.size());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(idx, 0);
    return std::make_unique<detail::TreeModel>(meta, std::move(builder.nodes));
}

// --------------------------------------------------------------------------

std::unique_ptr<TrainedModel> train_model(ModelKind kind, const SparseMatrix& tfidf,
                                          const SparseMatrix& counts, const std::vector<int>& y,
                                          const DatasetMeta& meta, const TrainConfig& config) {
    switch (kind) {
        case ModelKind::logistic_regression:
            return train_logistic(tfidf, y, meta, config);
        case ModelKind::naive_bayes:
            return train_naive_bayes(counts, y, meta, config.nb_alpha);
        case ModelKind::knn:
            return train_knn(tfidf, y, meta, config.knn_k);
        case ModelKind::decision_tree:
            return train_decision_tree(tfidf, y, meta, config.dt_max_depth, config.dt_min_leaf);
        case ModelKind::mlp:
            return train_mlp(tfidf, y, meta, config);
    }
    throw std::logic_error("unreachable model kind");
}

// --------------------------------------------------------------------------
// Concrete model prediction

namespace detail {

int argmax_lowest(std::span<const double> scores) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
        if (scores[static_cast<std::size_t>(i)] > scores[static_cast<std::size_t>(best)]) {
            best = i;
        }
    }
    return best;
}

LogisticModel::LogisticModel(DatasetMeta meta, double l2_lambda, std::vector<double> params,
                             std::vector<double> epoch_losses)
    : TrainedModel(std::move(meta)),
      l2_lambda_(l2_lambda),
      core_(meta_.vocab_size, static_cast<int>(meta_.class_names.size()), l2_lambda),
      params_(std::move(params)) {
    epoch_losses_ = std::move(epoch_losses);
}

PredictionBatch LogisticModel::predict(const SparseMatrix& X) const {
    check_input(X);
    PredictionBatch batch;
    batch.predicted.reserve(X.size());
    batch.scores.reserve(X.size());
    for (const SparseVector& x : X) {
        auto probs = core_.probabilities(x, params_);
        batch.predicted.push_back(argmax_lowest(probs));
        batch.scores.push_back(std::move(probs));
    }
    return batch;
}

NaiveBayesModel::NaiveBayesModel(DatasetMeta meta, double alpha, std::vector<double> log_priors,
                                 std::vector<double> log_likelihoods)
    : TrainedModel(std::move(meta)),
      alpha_(alpha),
      log_priors_(std::move(log_priors)),
      log_likelihoods_(std::move(log_likelihoods)) {}

double NaiveBayesModel::log_posterior(const SparseVector& counts, int cls) const {
    const auto c = static_cast<std::size_t>(cls);
    const std::size_t V = meta_.vocab_size;
    double lp = log_priors_[c];
    for (const auto& [col, count] : counts.entries) {
        lp += count * log_likelihoods_[c * V + col];
    }
    return lp;
}

PredictionBatch NaiveBayesModel::predict(const SparseMatrix& X) const {
    check_input(X);
    const std::size_t C = meta_.class_names.size();
    PredictionBatch batch;
    for (const SparseVector& x : X) {
        std::vector<double> scores(C);
        for (std::size_t c = 0; c < C; ++c) {
            scores[c] = log_posterior(x, static_cast<int>(c));
        }
        softmax_inplace(scores);
        batch.predicted.push_back(argmax_lowest(scores));
        batch.scores.push_back(std::move(scores));
    }
    return batch;
}

KnnModel::KnnModel(DatasetMeta meta, int k, SparseMatrix train, std::vector<int> labels)
    : TrainedModel(std::move(meta)), k_(k), train_(std::move(train)), labels_(std::move(labels)) {
    norms_.reserve(train_.size());
    for (const SparseVector& row : train_) {
        norms_.push_back(row.norm());
    }
}

PredictionBatch KnnModel::predict(const SparseMatrix& X) const {
    check_input(X);
    const std::size_t C = meta_.class_names.size();
    PredictionBatch batch;
    std::vector<double> dist(train_.size());
    for (const SparseVector& q : X) {
        const double qn = q.norm();
        for (std::size_t i = 0; i < train_.size(); ++i) {
            const double denom = qn * norms_[i];
            const double sim = denom > 0.0 ? q.dot(train_[i]) / denom : 0.0;
            dist[i] = 1.0 - sim;
        }
        // Neighbor set: everything within the k-th smallest distance, ties
        // included, so row order never matters.
        std::vector<double> sorted_dist = dist;
        std::nth_element(sorted_dist.begin(), sorted_dist.begin() + (k_ - 1), sorted_dist.end());
        const double radius = sorted_dist[static_cast<std::size_t>(k_ - 1)];

        std::vector<double> votes(C, 0.0), dist_sum(C, 0.0);
        double included = 0.0;
        for (std::size_t i = 0; i < train_.size(); ++i) {
            if (dist[i] <= radius) {
                const auto c = static_cast<std::size_t>(labels_[i]);
                votes[c] += 1.0;
                dist_sum[c] += dist[i];
                included += 1.0;
            }
        }
        const double top_votes = *std::max_element(votes.begin(), votes.end());
        int winner = -1;
        double winner_mean = 0.0;
        int top_classes = 0;
        for (std::size_t c = 0; c < C; ++c) {
            if (votes[c] != top_votes) {
                continue;
            }
            ++top_classes;
            const double mean = dist_sum[c] / votes[c];
            if (winner < 0 || mean < winner_mean) {
                winner = static_cast<int>(c);
                winner_mean = mean;
            }
        }
        // Vote shares as probabilities. On a vote tie the distance rule picks
        // the winner, and a half-vote bonus makes the scores agree with it.
        std::vector<double> scores(C);
        double denom = included;
        if (top_classes > 1) {
            denom += 0.5;
        }
        for (std::size_t c = 0; c < C; ++c) {
            double v = votes[c];
            if (top_classes > 1 && static_cast<int>(c) == winner) {
                v += 0.5;
            }
            scores[c] = v / denom;
        }
        batch.predicted.push_back(winner);
        batch.scores.push_back(std::move(scores));
    }
    return batch;
}

TreeModel::TreeModel(DatasetMeta meta, std::vector<TreeNode> nodes)
    : TrainedModel(std::move(meta)), nodes_(std::move(nodes)) {}

PredictionBatch TreeModel::predict(const SparseMatrix& X) const {
    check_input(X);
    const std::size_t C = meta_.class_names.size();
    PredictionBatch batch;
    for (const SparseVector& x : X) {
        std::size_t node = 0;
        while (nodes_[node].feature >= 0) {
            const double v = x.value_at(static_cast<std::size_t>(nodes_[node].feature));
            node = static_cast<std::size_t>(v <= nodes_[node].threshold ? nodes_[node].left
                                                                        : nodes_[node].right);
        }
        const auto& counts = nodes_[node].class_counts;
        const auto total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
        std::vector<double> scores(C, 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            scores[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
        }
        batch.predicted.push_back(argmax_lowest(scores));
        batch.scores.push_back(std::move(scores));
    }
    return batch;
}

MlpModel::MlpModel(DatasetMeta meta, int hidden_layers, int hidden_units,
                   std::vector<double> params, std::vector<double> epoch_losses)
    : TrainedModel(std::move(meta)),
      hidden_layers_(hidden_layers),
      hidden_units_(hidden_units),
      core_(meta_.vocab_size, hidden_layers, hidden_units,
            static_cast<int>(meta_.class_names.size())),
      params_(std::move(params)) {
    epoch_losses_ = std::move(epoch_losses);
}

PredictionBatch MlpModel::predict(const SparseMatrix& X) const {
    check_input(X);
    PredictionBatch batch;
    for (const SparseVector& x : X) {
        auto probs = core_.probabilities(x, params_);
        batch.predicted.push_back(argmax_lowest(probs));
        batch.scores.push_back(std::move(probs));
    }
    return batch;
}

}  // namespace detail

}  // namespace barriers
