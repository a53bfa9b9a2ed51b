#pragma once

#include <vector>

#include "barriers/classifiers.hpp"

namespace barriers::detail {

class LogisticModel final : public TrainedModel {
public:
    LogisticModel(DatasetMeta meta, double l2_lambda, std::vector<double> params,
                  std::vector<double> epoch_losses);

    ModelKind kind() const override { return ModelKind::logistic_regression; }
    PredictionBatch predict(const SparseMatrix& X) const override;
    const std::vector<double>& params() const { return params_; }
    double l2_lambda() const { return l2_lambda_; }

private:
    void save_params_json(std::ostream& out) const override;

    double l2_lambda_;
    LogisticCore core_;
    std::vector<double> params_;
};

class NaiveBayesModel final : public TrainedModel {
public:
    NaiveBayesModel(DatasetMeta meta, double alpha, std::vector<double> log_priors,
                    std::vector<double> log_likelihoods);

    ModelKind kind() const override { return ModelKind::naive_bayes; }
    PredictionBatch predict(const SparseMatrix& X) const override;

    /// Joint log probability log P(c) + sum_t count_t * log P(t|c).
    double log_posterior(const SparseVector& counts, int cls) const;

private:
    void save_params_json(std::ostream& out) const override;

    double alpha_;
    std::vector<double> log_priors_;       // [C]
    std::vector<double> log_likelihoods_;  // row-major [C][V]
};

class KnnModel final : public TrainedModel {
public:
    KnnModel(DatasetMeta meta, int k, SparseMatrix train, std::vector<int> labels);

    ModelKind kind() const override { return ModelKind::knn; }
    PredictionBatch predict(const SparseMatrix& X) const override;

    int k() const { return k_; }
    const SparseMatrix& train_rows() const { return train_; }
    const std::vector<int>& train_labels() const { return labels_; }

private:
    void save_params_json(std::ostream& out) const override;

    int k_;
    SparseMatrix train_;
    std::vector<int> labels_;
    std::vector<double> norms_;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<std::size_t> class_counts;  // leaves only
};

class TreeModel final : public TrainedModel {
public:
    TreeModel(DatasetMeta meta, std::vector<TreeNode> nodes);

    ModelKind kind() const override { return ModelKind::decision_tree; }
    PredictionBatch predict(const SparseMatrix& X) const override;
    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    void save_params_json(std::ostream& out) const override;

    std::vector<TreeNode> nodes_;
};

class MlpModel final : public TrainedModel {
public:
    MlpModel(DatasetMeta meta, int hidden_layers, int hidden_units, std::vector<double> params,
             std::vector<double> epoch_losses);

    ModelKind kind() const override { return ModelKind::mlp; }
    PredictionBatch predict(const SparseMatrix& X) const override;
    const std::vector<double>& params() const { return params_; }
    int hidden_layers() const { return hidden_layers_; }
    int hidden_units() const { return hidden_units_; }

private:
    void save_params_json(std::ostream& out) const override;

    int hidden_layers_;
    int hidden_units_;
    MlpCore core_;
    std::vector<double> params_;
};

/// Argmax with ties to the lowest index.
int argmax_lowest(std::span<const double> scores);

}  // namespace barriers::detail
