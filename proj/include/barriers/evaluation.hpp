#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "barriers/annotator.hpp"
#include "barriers/classifiers.hpp"
#include "barriers/corpus.hpp"

namespace barriers {

struct SplitPlan {
    std::uint64_t seed = 0;
    double train_ratio = 0.8;
};

struct EventSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

/// Splits whole events so no article leaks across sides; stratified by class
/// within +-1 event of the exact ratio, both sides non-empty per class.
/// Throws ConfigError when any class has fewer than two events.
EventSplit stratified_event_split(const std::vector<std::pair<std::string, int>>& labeled_events,
                                  int class_count, const SplitPlan& plan);

class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<std::string> class_order);

    static ConfusionMatrix from_labels(const std::vector<std::string>& y_true,
                                       const std::vector<std::string>& y_pred,
                                       const std::vector<std::string>& class_order);
    static ConfusionMatrix from_indices(const std::vector<int>& y_true,
                                        const std::vector<int>& y_pred,
                                        std::vector<std::string> class_order);

    void add(int true_class, int predicted_class);

    std::size_t count(int true_class, int predicted_class) const;
    std::size_t total() const { return total_; }
    std::size_t class_count() const { return classes_.size(); }
    const std::vector<std::string>& classes() const { return classes_; }

    std::size_t true_positives(int cls) const;
    std::size_t false_positives(int cls) const;
    std::size_t false_negatives(int cls) const;

private:
    std::vector<std::string> classes_;
    std::vector<std::size_t> counts_;  // row-major [true][pred]
    std::size_t total_ = 0;
};

/// trace / total; MetricError on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct F1Report {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<bool> absent;  // class missing from both y_true and y_pred
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
};

/// Per-class precision/recall/F1 with the 0/0 -> 0 convention; macro-F1 is
/// the unweighted mean over all classes in order.
F1Report f1_scores(const ConfusionMatrix& cm);

enum class FeatureMode { text_only, text_concepts };
std::string_view to_string(FeatureMode mode);
std::optional<FeatureMode> feature_mode_from_string(std::string_view name);

struct GridSelection {
    std::vector<BarrierKind> barriers;
    std::vector<Category> categories;
    std::vector<ModelKind> models;
    std::vector<FeatureMode> modes;
};

struct MetricReport {
    BarrierKind barrier{};
    Category category{};
    ModelKind model{};
    FeatureMode mode{};
    std::size_t n_test = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
    std::vector<std::string> class_names;
    std::vector<double> per_class_f1;
};

struct DeltaRow {
    BarrierKind barrier{};
    Category category{};
    ModelKind model{};
    double delta_macro_f1 = 0.0;
    double delta_accuracy = 0.0;
};

struct SkipRecord {
    BarrierKind barrier{};
    Category category{};
    std::string reason;
};

struct ExperimentConfig {
    GridSelection grid;
    FeatureConfig features;
    TrainConfig train;
    double train_ratio = 0.8;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct ExperimentResults {
    std::vector<MetricReport> reports;
    std::vector<DeltaRow> deltas;  // text+concepts minus text, per (barrier, category, model)
    std::vector<SkipRecord> skips;
    /// filename -> serialized model JSON, one per trained grid cell.
    std::vector<std::pair<std::string, std::string>> model_files;
};

/// Runs every (barrier, category, model, feature mode) cell with enough data;
/// cells without enough data are skipped with a reason. Deterministic for a
/// given seed regardless of the worker count.
ExperimentResults run_experiment_grid(const CorpusIndex& corpus, const AnnotatedCorpus& annotated,
                                      const ExperimentConfig& config);

struct ImprovementRow {
    BarrierKind barrier{};
    int improved = 0;
    int not_improved = 0;
};

/// Per barrier, the number of categories where the best model's macro-F1 or
/// accuracy strictly improves under text+concepts. Best is taken per feature
/// mode over the models of the cell. Throws on unpaired reports.
std::vector<ImprovementRow> improvement_table(const std::vector<MetricReport>& reports);

void write_reports_csv(const std::vector<MetricReport>& reports, std::ostream& out);
void write_deltas_csv(const std::vector<DeltaRow>& deltas, std::ostream& out);
void write_skips_csv(const std::vector<SkipRecord>& skips, std::ostream& out);
void write_improvement_csv(const std::vector<ImprovementRow>& rows, std::ostream& out);

}  // namespace barriers
