#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "barriers/features.hpp"
#include "barriers/rng.hpp"

namespace barriers {

enum class ModelKind { logistic_regression, naive_bayes, knn, decision_tree, mlp };

const std::vector<ModelKind>& all_model_kinds();
std::string_view to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);

struct TrainConfig {
    int hidden_layers = 3;
    int hidden_units = 64;
    int epochs = 10;
    int batch_size = 64;
    double dropout_rate = 0.001;
    double learning_rate = 0.001;  // Adam step size
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double l2_lambda = 1e-4;  // logistic regression only
    double nb_alpha = 1.0;    // Laplace smoothing
    int knn_k = 5;
    int dt_max_depth = 20;
    int dt_min_leaf = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Class names and vocabulary identity carried into every trained model.
struct DatasetMeta {
    std::vector<std::string> class_names;
    std::size_t vocab_size = 0;
    std::uint64_t vocab_fingerprint = 0;
};

struct PredictionBatch {
    std::vector<int> predicted;                // class indexes
    std::vector<std::vector<double>> scores;   // per instance, sums to 1
};

class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    virtual ModelKind kind() const = 0;
    /// Naive Bayes predicts from raw count vectors; everything else from TF-IDF.
    bool wants_counts() const { return kind() == ModelKind::naive_bayes; }

    /// Scores are probability-normalized for every model kind; prediction is
    /// the argmax with ties resolved to the lowest class index (kNN applies
    /// its distance tie-break first and the scores reflect it).
    virtual PredictionBatch predict(const SparseMatrix& X) const = 0;

    const DatasetMeta& meta() const { return meta_; }
    const std::vector<std::string>& classes() const { return meta_.class_names; }
    /// Mean training loss per epoch; empty for models without a loss loop.
    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

    /// Versioned JSON with flat parameter arrays, 17 significant digits.
    void save_json(std::ostream& out) const;

protected:
    explicit TrainedModel(DatasetMeta meta) : meta_(std::move(meta)) {}
    void check_input(const SparseMatrix& X) const;  // throws on dimension mismatch
    virtual void save_params_json(std::ostream& out) const = 0;

    DatasetMeta meta_;
    std::vector<double> epoch_losses_;
};

/// Softmax regression, mean cross-entropy + 0.5 * l2_lambda * ||W||^2
/// (bias unpenalized), Adam with a seed-fixed shuffle schedule.
std::unique_ptr<TrainedModel> train_logistic(const SparseMatrix& X, const std::vector<int>& y,
                                             const DatasetMeta& meta, const TrainConfig& config);

/// Multinomial NB over raw counts, Laplace smoothing alpha.
std::unique_ptr<TrainedModel> train_naive_bayes(const SparseMatrix& X_counts,
                                                const std::vector<int>& y, const DatasetMeta& meta,
                                                double alpha);

/// Lazy cosine-distance kNN. The neighbor set is every training point within
/// the k-th smallest distance (ties included), which keeps predictions
/// invariant under training-row permutation. Vote ties go to the class with
/// the smallest mean distance, then the lowest class index. k larger than the
/// training size is clamped (warning appended when given).
std::unique_ptr<TrainedModel> train_knn(const SparseMatrix& X, const std::vector<int>& y,
                                        const DatasetMeta& meta, int k,
                                        std::vector<std::string>* warnings = nullptr);

/// CART-style binary tree; Gini impurity decrease; candidate thresholds are
/// midpoints of consecutive distinct feature values; splits must strictly
/// decrease weighted impurity. Feature ties break to the lowest column, then
/// the lowest threshold.
std::unique_ptr<TrainedModel> train_decision_tree(const SparseMatrix& X, const std::vector<int>& y,
                                                  const DatasetMeta& meta, int max_depth,
                                                  int min_leaf);

/// Dense V -> hidden^L -> C network, ReLU hidden, softmax output,
/// cross-entropy, inverted dropout on hidden activations during training,
/// He initialization, Adam.
std::unique_ptr<TrainedModel> train_mlp(const SparseMatrix& X, const std::vector<int>& y,
                                        const DatasetMeta& meta, const TrainConfig& config);

/// Dispatch by kind; picks the count matrix for NB, TF-IDF otherwise.
std::unique_ptr<TrainedModel> train_model(ModelKind kind, const SparseMatrix& tfidf,
                                          const SparseMatrix& counts, const std::vector<int>& y,
                                          const DatasetMeta& meta, const TrainConfig& config);

std::unique_ptr<TrainedModel> load_model_json(std::istream& in);

// ---------------------------------------------------------------------------
// Training cores. The optimizers descend exactly these functions, and the
// finite-difference tests probe the same code path.

class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n, double lr, double beta1, double beta2, double epsilon);
    void step(std::span<double> params, std::span<const double> grad);

private:
    double lr_, beta1_, beta2_, epsilon_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

/// Flat parameter layout: W row-major [C][V], then bias [C].
class LogisticCore {
public:
    LogisticCore(std::size_t vocab_size, int class_count, double l2_lambda);

    std::size_t param_count() const { return (vocab_ + 1) * classes_; }

    /// Mean cross-entropy over the batch plus the L2 penalty. When grad is
    /// non-empty (size param_count) it receives the analytic gradient.
    double loss_and_grad(const SparseMatrix& X, const std::vector<int>& y,
                         std::span<const std::size_t> batch, std::span<const double> params,
                         std::span<double> grad) const;

    std::vector<double> probabilities(const SparseVector& x, std::span<const double> params) const;

private:
    std::size_t vocab_;
    int classes_;
    double l2_lambda_;
};

/// Flat layout: per layer, weights row-major [fan_out][fan_in], then biases.
class MlpCore {
public:
    MlpCore(std::size_t input_dim, int hidden_layers, int hidden_units, int class_count);

    std::size_t param_count() const { return param_count_; }
    int layer_count() const { return static_cast<int>(fan_in_.size()); }

    void he_init(std::span<double> params, Rng& rng) const;

    /// Mean cross-entropy over the batch. dropout_rng == nullptr disables
    /// dropout (prediction and gradient checks); otherwise inverted dropout
    /// at dropout_rate is applied to hidden activations.
    double loss_and_grad(const SparseMatrix& X, const std::vector<int>& y,
                         std::span<const std::size_t> batch, std::span<const double> params,
                         std::span<double> grad, Rng* dropout_rng, double dropout_rate) const;

    std::vector<double> probabilities(const SparseVector& x, std::span<const double> params) const;

    std::size_t weight_offset(int layer) const { return weight_offset_[layer]; }
    std::size_t bias_offset(int layer) const { return bias_offset_[layer]; }
    int fan_in(int layer) const { return fan_in_[layer]; }
    int fan_out(int layer) const { return fan_out_[layer]; }

private:
    std::vector<int> fan_in_, fan_out_;
    std::vector<std::size_t> weight_offset_, bias_offset_;
    std::size_t param_count_ = 0;
};

/// Stable softmax in place.
void softmax_inplace(std::span<double> logits);

/// Gini impurity 1 - sum(p^2) of a class-count histogram.
double gini_impurity(std::span<const std::size_t> class_counts);

}  // namespace barriers
