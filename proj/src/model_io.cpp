#include <istream>
#include <ostream>
#include <span>

#include "json.hpp"

#include "barriers/classifiers.hpp"
#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"
#include "models_detail.hpp"

namespace barriers {

namespace {

void write_double_array(std::ostream& out, std::span<const double> values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << format_g17(values[i]);
    }
    out << ']';
}

template <typename T>
void write_int_array(std::ostream& out, const std::vector<T>& values) {
    out << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << values[i];
    }
    out << ']';
}

}  // namespace

void TrainedModel::save_json(std::ostream& out) const {
    out << "{\n";
    out << "  \"format_version\": 1,\n";
    out << "  \"kind\": \"" << to_string(kind()) << "\",\n";
    out << "  \"classes\": [";
    for (std::size_t i = 0; i < meta_.class_names.size(); ++i) {
        if (i > 0) {
            out << ", ";
        }
        out << '"' << json_escape(meta_.class_names[i]) << '"';
    }
    out << "],\n";
    out << "  \"vocab_size\": " << meta_.vocab_size << ",\n";
    out << "  \"vocab_fingerprint\": \"" << to_hex(meta_.vocab_fingerprint) << "\",\n";
    out << "  \"epoch_losses\": ";
    write_double_array(out, epoch_losses_);
    out << ",\n  \"params\": ";
    save_params_json(out);
    out << "\n}\n";
}

namespace detail {

void LogisticModel::save_params_json(std::ostream& out) const {
    out << "{\"l2_lambda\": " << format_g17(l2_lambda_) << ", \"values\": ";
    write_double_array(out, params_);
    out << '}';
}

void NaiveBayesModel::save_params_json(std::ostream& out) const {
    out << "{\"alpha\": " << format_g17(alpha_) << ", \"log_priors\": ";
    write_double_array(out, log_priors_);
    out << ", \"log_likelihoods\": ";
    write_double_array(out, log_likelihoods_);
    out << '}';
}

void KnnModel::save_params_json(std::ostream& out) const {
    out << "{\"k\": " << k_ << ", \"labels\": ";
    write_int_array(out, labels_);
    out << ", \"rows\": [";
    for (std::size_t r = 0; r < train_.size(); ++r) {
        if (r > 0) {
            out << ',';
        }
        out << "{\"idx\": [";
        for (std::size_t e = 0; e < train_[r].entries.size(); ++e) {
            if (e > 0) {
                out << ',';
            }
            out << train_[r].entries[e].first;
        }
        out << "], \"val\": [";
        for (std::size_t e = 0; e < train_[r].entries.size(); ++e) {
            if (e > 0) {
                out << ',';
            }
            out << format_g17(train_[r].entries[e].second);
        }
        out << "]}";
    }
    out << "]}";
}

void TreeModel::save_params_json(std::ostream& out) const {
    out << "{\"nodes\": [";
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (n > 0) {
            out << ',';
        }
        const TreeNode& node = nodes_[n];
        out << "{\"feature\": " << node.feature << ", \"threshold\": "
            << format_g17(node.threshold) << ", \"left\": " << node.left
            << ", \"right\": " << node.right << ", \"counts\": ";
        write_int_array(out, node.class_counts);
        out << '}';
    }
    out << "]}";
}

void MlpModel::save_params_json(std::ostream& out) const {
    out << "{\"hidden_layers\": " << hidden_layers_ << ", \"hidden_units\": " << hidden_units_
        << ", \"values\": ";
    write_double_array(out, params_);
    out << '}';
}

}  // namespace detail

std::unique_ptr<TrainedModel> load_model_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError("model file is not valid JSON");
    }
    if (j.value("format_version", 0) != 1) {
        throw ConfigError("unsupported model format version");
    }
    DatasetMeta meta;
    meta.class_names = j.at("classes").get<std::vector<std::string>>();
    meta.vocab_size = j.at("vocab_size").get<std::size_t>();
    meta.vocab_fingerprint =
        std::stoull(j.at("vocab_fingerprint").get<std::string>(), nullptr, 16);
    std::vector<double> epoch_losses = j.at("epoch_losses").get<std::vector<double>>();

    const std::string kind_name = j.at("kind").get<std::string>();
    const auto kind = model_kind_from_string(kind_name);
    if (!kind) {
        throw ConfigError("unknown model kind: " + kind_name);
    }
    const nlohmann::json& p = j.at("params");
    switch (*kind) {
        case ModelKind::logistic_regression:
            return std::make_unique<detail::LogisticModel>(
                std::move(meta), p.at("l2_lambda").get<double>(),
                p.at("values").get<std::vector<double>>(), std::move(epoch_losses));
        case ModelKind::naive_bayes:
            return std::make_unique<detail::NaiveBayesModel>(
                std::move(meta), p.at("alpha").get<double>(),
                p.at("log_priors").get<std::vector<double>>(),
                p.at("log_likelihoods").get<std::vector<double>>());
        case ModelKind::knn: {
            SparseMatrix rows;
            for (const auto& row : p.at("rows")) {
                SparseVector v;
                v.dim = meta.vocab_size;
                const auto idx = row.at("idx").get<std::vector<std::size_t>>();
                const auto val = row.at("val").get<std::vector<double>>();
                for (std::size_t e = 0; e < idx.size(); ++e) {
                    v.entries.emplace_back(idx[e], val[e]);
                }
                rows.push_back(std::move(v));
            }
            return std::make_unique<detail::KnnModel>(std::move(meta), p.at("k").get<int>(),
                                                      std::move(rows),
                                                      p.at("labels").get<std::vector<int>>());
        }
        case ModelKind::decision_tree: {
            std::vector<detail::TreeNode> nodes;
            for (const auto& jn : p.at("nodes")) {
                detail::TreeNode node;
                node.feature = jn.at("feature").get<int>();
                node.threshold = jn.at("threshold").get<double>();
                node.left = jn.at("left").get<int>();
                node.right = jn.at("right").get<int>();
                node.class_counts = jn.at("counts").get<std::vector<std::size_t>>();
                nodes.push_back(std::move(node));
            }
            return std::make_unique<detail::TreeModel>(std::move(meta), std::move(nodes));
        }
        case ModelKind::mlp:
            return std::make_unique<detail::MlpModel>(
                std::move(meta), p.at("hidden_layers").get<int>(),
                p.at("hidden_units").get<int>(), p.at("values").get<std::vector<double>>(),
                std::move(epoch_losses));
    }
    throw std::logic_error("unreachable model kind");
}

}  // namespace barriers
