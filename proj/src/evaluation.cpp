#include "barriers/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"
#include "barriers/rng.hpp"

namespace barriers {

EventSplit stratified_event_split(const std::vector<std::pair<std::string, int>>& labeled_events,
                                  int class_count, const SplitPlan& plan) {
    if (plan.train_ratio <= 0.0 || plan.train_ratio >= 1.0) {
        throw ConfigError("train_ratio must lie strictly between 0 and 1");
    }
    std::vector<std::vector<std::string>> by_class(static_cast<std::size_t>(class_count));
    for (const auto& [event_id, cls] : labeled_events) {
        if (cls < 0 || cls >= class_count) {
            throw ConfigError("event class index out of range");
        }
        by_class[static_cast<std::size_t>(cls)].push_back(event_id);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (!by_class[c].empty() && by_class[c].size() < 2) {
            throw ConfigError("class " + std::to_string(c) +
                              " has fewer than 2 events; cannot split");
        }
    }
    Rng rng(plan.seed);
    EventSplit split;
    for (auto& ids : by_class) {
        if (ids.empty()) {
            continue;
        }
        rng.shuffle(ids);
        const double exact = plan.train_ratio * static_cast<double>(ids.size());
        auto train_n = static_cast<std::size_t>(std::llround(exact));
        // Both sides keep at least one event of every class.
        train_n = std::clamp<std::size_t>(train_n, 1, ids.size() - 1);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            (i < train_n ? split.train_ids : split.test_ids).push_back(std::move(ids[i]));
        }
    }
    return split;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_order)
    : classes_(std::move(class_order)), counts_(classes_.size() * classes_.size(), 0) {}

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<std::string>& y_true,
                                             const std::vector<std::string>& y_pred,
                                             const std::vector<std::string>& class_order) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("y_true and y_pred differ in length");
    }
    const auto index_of = [&](const std::string& label) {
        const auto it = std::find(class_order.begin(), class_order.end(), label);
        if (it == class_order.end()) {
            throw std::invalid_argument("unknown class label: " + label);
        }
        return static_cast<int>(it - class_order.begin());
    };
    ConfusionMatrix cm(class_order);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        cm.add(index_of(y_true[i]), index_of(y_pred[i]));
    }
    return cm;
}

ConfusionMatrix ConfusionMatrix::from_indices(const std::vector<int>& y_true,
                                              const std::vector<int>& y_pred,
                                              std::vector<std::string> class_order) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("y_true and y_pred differ in length");
    }
    ConfusionMatrix cm(std::move(class_order));
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        cm.add(y_true[i], y_pred[i]);
    }
    return cm;
}

void ConfusionMatrix::add(int true_class, int predicted_class) {
    const int c = static_cast<int>(classes_.size());
    if (true_class < 0 || true_class >= c || predicted_class < 0 || predicted_class >= c) {
        throw std::invalid_argument("class index outside the fixed class order");
    }
    ++counts_[static_cast<std::size_t>(true_class) * classes_.size() +
              static_cast<std::size_t>(predicted_class)];
    ++total_;
}

std::size_t ConfusionMatrix::count(int true_class, int predicted_class) const {
    return counts_[static_cast<std::size_t>(true_class) * classes_.size() +
                   static_cast<std::size_t>(predicted_class)];
}

std::size_t ConfusionMatrix::true_positives(int cls) const {
    return count(cls, cls);
}

std::size_t ConfusionMatrix::false_positives(int cls) const {
    std::size_t sum = 0;
    for (int r = 0; r < static_cast<int>(classes_.size()); ++r) {
        if (r != cls) {
            sum += count(r, cls);
        }
    }
    return sum;
}

std::size_t ConfusionMatrix::false_negatives(int cls) const {
    std::size_t sum = 0;
    for (int c = 0; c < static_cast<int>(classes_.size()); ++c) {
        if (c != cls) {
            sum += count(cls, c);
        }
    }
    return sum;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw MetricError("accuracy is undefined on an empty confusion matrix");
    }
    std::size_t trace = 0;
    for (int c = 0; c < static_cast<int>(cm.class_count()); ++c) {
        trace += cm.count(c, c);
    }
    return static_cast<double>(trace) / static_cast<double>(cm.total());
}

F1Report f1_scores(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw MetricError("F1 is undefined on an empty confusion matrix");
    }
    F1Report report;
    const auto C = static_cast<int>(cm.class_count());
    std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
    for (int c = 0; c < C; ++c) {
        const auto tp = cm.true_positives(c);
        const auto fp = cm.false_positives(c);
        const auto fn = cm.false_negatives(c);
        tp_sum += tp;
        fp_sum += fp;
        fn_sum += fn;
        const double precision =
            tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall =
            tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 = precision + recall == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        report.precision.push_back(precision);
        report.recall.push_back(recall);
        report.f1.push_back(f1);
        report.absent.push_back(tp + fp + fn == 0);
        report.macro_f1 += f1;
    }
    report.macro_f1 /= static_cast<double>(C);
    const double micro_p = tp_sum + fp_sum == 0
                               ? 0.0
                               : static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fp_sum);
    const double micro_r = tp_sum + fn_sum == 0
                               ? 0.0
                               : static_cast<double>(tp_sum) / static_cast<double>(tp_sum + fn_sum);
    report.micro_f1 =
        micro_p + micro_r == 0.0 ? 0.0 : 2.0 * micro_p * micro_r / (micro_p + micro_r);
    return report;
}

std::string_view to_string(FeatureMode mode) {
    return mode == FeatureMode::text_only ? "text" : "text+concepts";
}

std::optional<FeatureMode> feature_mode_from_string(std::string_view name) {
    if (name == "text") {
        return FeatureMode::text_only;
    }
    if (name == "text+concepts") {
        return FeatureMode::text_concepts;
    }
    return std::nullopt;
}

namespace {

struct CellTask {
    BarrierKind barrier;
    Category category;
};

struct CellResult {
    std::vector<MetricReport> reports;
    std::vector<DeltaRow> deltas;
    std::vector<SkipRecord> skips;
    std::vector<std::pair<std::string, std::string>> model_files;
};

std::string mode_file_tag(FeatureMode mode) {
    return mode == FeatureMode::text_only ? "text" : "text_concepts";
}

CellResult run_cell(const CorpusIndex& corpus, const AnnotatedCorpus& annotated,
                    const ExperimentConfig& config, const CellTask& task) {
    CellResult result;
    const auto skip = [&](std::string reason) {
        result.skips.push_back({task.barrier, task.category, std::move(reason)});
    };

    // Events labeled for this barrier within this category, in id order.
    const auto& classes = legal_classes(task.barrier);
    std::vector<std::pair<std::string, int>> labeled;  // (event_id, class index)
    std::vector<std::size_t> class_counts(classes.size(), 0);
    for (const Event& event : corpus.events()) {
        if (event.category != task.category) {
            continue;
        }
        const auto it = annotated.events.find(event.event_id);
        if (it == annotated.events.end()) {
            continue;
        }
        const auto label = it->second.label(task.barrier);
        if (!label) {
            continue;
        }
        const auto pos = std::find(classes.begin(), classes.end(), *label) - classes.begin();
        labeled.emplace_back(event.event_id, static_cast<int>(pos));
        ++class_counts[static_cast<std::size_t>(pos)];
    }
    std::sort(labeled.begin(), labeled.end());

    // Restrict to classes with data; canonical order kept.
    std::vector<std::string> class_names;
    std::vector<int> class_remap(classes.size(), -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (class_counts[c] > 0) {
            class_remap[c] = static_cast<int>(class_names.size());
            class_names.emplace_back(to_string(classes[c]));
        }
    }
    if (class_names.size() < 2) {
        skip("single class in labeled events");
        return result;
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (class_counts[c] == 1) {
            skip("class '" + std::string(to_string(classes[c])) + "' has fewer than 2 events");
            return result;
        }
    }
    for (auto& [event_id, cls] : labeled) {
        cls = class_remap[static_cast<std::size_t>(cls)];
    }

    const std::string cell_name = std::string(to_string(task.barrier)) + ":" +
                                  std::string(to_string(task.category));
    SplitPlan plan{substream_seed(config.seed, "split:" + cell_name), config.train_ratio};
    EventSplit split;
    try {
        split = stratified_event_split(labeled, static_cast<int>(class_names.size()), plan);
    } catch (const ConfigError& e) {
        skip(e.what());
        return result;
    }

    std::map<std::string, int> event_class(labeled.begin(), labeled.end());
    const auto collect = [&](const std::vector<std::string>& ids,
                             std::vector<const NewsArticle*>& articles, std::vector<int>& labels) {
        std::vector<std::string> sorted_ids = ids;
        std::sort(sorted_ids.begin(), sorted_ids.end());
        for (const std::string& event_id : sorted_ids) {
            const Event* event = corpus.event_by_id(event_id);
            const int cls = event_class.at(event_id);
            for (std::size_t row : event->article_rows) {
                articles.push_back(&corpus.articles()[row]);
                labels.push_back(cls);
            }
        }
    };
    std::vector<const NewsArticle*> train_articles, test_articles;
    std::vector<int> y_train, y_test;
    collect(split.train_ids, train_articles, y_train);
    collect(split.test_ids, test_articles, y_test);

    const auto distinct = [](const std::vector<int>& y) {
        std::vector<int> v = y;
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v.size();
    };
    if (distinct(y_train) < 2 || distinct(y_test) < 2) {
        skip("degenerate split");
        return result;
    }

    struct ModeData {
        bool ok = false;
        ArticleVectors train, test;
        DatasetMeta meta;
    };
    std::map<FeatureMode, ModeData> mode_data;
    for (FeatureMode mode : config.grid.modes) {
        FeatureConfig fc = config.features;
        fc.use_concepts = mode == FeatureMode::text_concepts;
        ModeData data;
        try {
            const Vocabulary vocab = build_vocabulary_from_articles(train_articles, fc);
            data.train = vectorize_articles(train_articles, vocab, fc);
            data.test = vectorize_articles(test_articles, vocab, fc);
            data.meta = {class_names, vocab.size(), vocab.fingerprint()};
            data.ok = true;
        } catch (const ConfigError& e) {
            skip(std::string(to_string(mode)) + ": " + e.what());
        }
        mode_data.emplace(mode, std::move(data));
    }

    struct Scored {
        bool ok = false;
        double macro_f1 = 0.0;
        double acc = 0.0;
    };
    std::map<std::pair<ModelKind, FeatureMode>, Scored> scored;

    for (FeatureMode mode : config.grid.modes) {
        const ModeData& data = mode_data.at(mode);
        if (!data.ok) {
            continue;
        }
        for (ModelKind model : config.grid.models) {
            TrainConfig tc = config.train;
            tc.seed = substream_seed(config.seed, "train:" + std::string(to_string(model)) + ":" +
                                                      cell_name + ":" +
                                                      std::string(to_string(mode)));
            const auto trained =
                train_model(model, data.train.tfidf, data.train.counts, y_train, data.meta, tc);
            const auto& X_test = trained->wants_counts() ? data.test.counts : data.test.tfidf;
            const PredictionBatch predictions = trained->predict(X_test);
            const auto cm = ConfusionMatrix::from_indices(y_test, predictions.predicted,
                                                          data.meta.class_names);
            const F1Report f1 = f1_scores(cm);

            MetricReport report;
            report.barrier = task.barrier;
            report.category = task.category;
            report.model = model;
            report.mode = mode;
            report.n_test = y_test.size();
            report.accuracy = accuracy(cm);
            report.macro_f1 = f1.macro_f1;
            report.micro_f1 = f1.micro_f1;
            report.class_names = data.meta.class_names;
            report.per_class_f1 = f1.f1;
            result.reports.push_back(std::move(report));
            scored[{model, mode}] = {true, f1.macro_f1, result.reports.back().accuracy};

            std::ostringstream model_json;
            trained->save_json(model_json);
            const std::string filename = std::string(to_string(task.barrier)) + "_" +
                                         std::string(to_string(task.category)) + "_" +
                                         std::string(to_string(model)) + "_" +
                                         mode_file_tag(mode) + ".json";
            result.model_files.emplace_back(filename, std::move(model_json).str());
        }
    }

    // Improvement deltas: proposed (text+concepts) minus baseline (text).
    for (ModelKind model : config.grid.models) {
        const auto base = scored.find({model, FeatureMode::text_only});
        const auto prop = scored.find({model, FeatureMode::text_concepts});
        if (base != scored.end() && base->second.ok && prop != scored.end() && prop->second.ok) {
            result.deltas.push_back({task.barrier, task.category, model,
                                     prop->second.macro_f1 - base->second.macro_f1,
                                     prop->second.acc - base->second.acc});
        }
    }
    return result;
}

}  // namespace

ExperimentResults run_experiment_grid(const CorpusIndex& corpus, const AnnotatedCorpus& annotated,
                                      const ExperimentConfig& config) {
    config.train.validate();
    std::vector<CellTask> tasks;
    for (BarrierKind barrier : config.grid.barriers) {
        for (Category category : config.grid.categories) {
            tasks.push_back({barrier, category});
        }
    }
    std::vector<CellResult> cell_results(tasks.size());

    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(tasks.size())));
    if (jobs <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            cell_results[t] = run_cell(corpus, annotated, config, tasks[t]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    while (true) {
                        const std::size_t t = next.fetch_add(1);
                        if (t >= tasks.size()) {
                            return;
                        }
                        cell_results[t] = run_cell(corpus, annotated, config, tasks[t]);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& worker : workers) {
            worker.join();
        }
        for (const auto& error : errors) {
            if (error) {
                std::rethrow_exception(error);
            }
        }
    }

    ExperimentResults results;
    for (CellResult& cell : cell_results) {
        std::move(cell.reports.begin(), cell.reports.end(), std::back_inserter(results.reports));
        std::move(cell.deltas.begin(), cell.deltas.end(), std::back_inserter(results.deltas));
        std::move(cell.skips.begin(), cell.skips.end(), std::back_inserter(results.skips));
        std::move(cell.model_files.begin(), cell.model_files.end(),
                  std::back_inserter(results.model_files));
    }
    return results;
}

std::vector<ImprovementRow> improvement_table(const std::vector<MetricReport>& reports) {
    // Pair up per (barrier, category, model); any unpaired report is fatal.
    std::map<std::tuple<BarrierKind, Category, ModelKind>,
             std::pair<const MetricReport*, const MetricReport*>>
        pairs;
    for (const MetricReport& report : reports) {
        auto& slot = pairs[{report.barrier, report.category, report.model}];
        (report.mode == FeatureMode::text_only ? slot.first : slot.second) = &report;
    }
    for (const auto& [key, slot] : pairs) {
        if (slot.first == nullptr || slot.second == nullptr) {
            throw ConfigError("unpaired baseline/proposed report for model '" +
                              std::string(to_string(std::get<2>(key))) + "' in " +
                              std::string(to_string(std::get<0>(key))) + "/" +
                              std::string(to_string(std::get<1>(key))));
        }
    }
    // Best model per (barrier, category, mode); improvement = strict increase
    // of either metric under text+concepts.
    struct Best {
        double f1_base = -1.0, acc_base = -1.0, f1_prop = -1.0, acc_prop = -1.0;
    };
    std::map<std::pair<BarrierKind, Category>, Best> cells;
    for (const MetricReport& report : reports) {
        Best& best = cells[{report.barrier, report.category}];
        if (report.mode == FeatureMode::text_only) {
            best.f1_base = std::max(best.f1_base, report.macro_f1);
            best.acc_base = std::max(best.acc_base, report.accuracy);
        } else {
            best.f1_prop = std::max(best.f1_prop, report.macro_f1);
            best.acc_prop = std::max(best.acc_prop, report.accuracy);
        }
    }
    std::map<BarrierKind, ImprovementRow> rows;
    for (const auto& [key, best] : cells) {
        ImprovementRow& row = rows[key.first];
        row.barrier = key.first;
        const bool improved = best.f1_prop > best.f1_base || best.acc_prop > best.acc_base;
        (improved ? row.improved : row.not_improved) += 1;
    }
    std::vector<ImprovementRow> out;
    for (BarrierKind barrier : all_barriers()) {
        const auto it = rows.find(barrier);
        if (it != rows.end()) {
            out.push_back(it->second);
        }
    }
    return out;
}

namespace {

std::string per_class_f1_json(const MetricReport& report) {
    std::string out = "{";
    for (std::size_t c = 0; c < report.class_names.size(); ++c) {
        if (c > 0) {
            out += ",";
        }
        out += "\"" + json_escape(report.class_names[c]) +
               "\":" + format_fixed(report.per_class_f1[c], 6);
    }
    out += "}";
    return out;
}

}  // namespace

void write_reports_csv(const std::vector<MetricReport>& reports, std::ostream& out) {
    out << "barrier,category,model,features,n_test,accuracy,macro_f1,micro_f1,per_class_f1\n";
    for (const MetricReport& r : reports) {
        out << to_string(r.barrier) << ',' << to_string(r.category) << ',' << to_string(r.model)
            << ',' << to_string(r.mode) << ',' << r.n_test << ',' << format_fixed(r.accuracy, 6)
            << ',' << format_fixed(r.macro_f1, 6) << ',' << format_fixed(r.micro_f1, 6) << ','
            << csv_quote(per_class_f1_json(r)) << '\n';
    }
}

void write_deltas_csv(const std::vector<DeltaRow>& deltas, std::ostream& out) {
    out << "barrier,category,model,delta_macro_f1,delta_accuracy\n";
    for (const DeltaRow& d : deltas) {
        out << to_string(d.barrier) << ',' << to_string(d.category) << ',' << to_string(d.model)
            << ',' << format_fixed(d.delta_macro_f1, 6) << ',' << format_fixed(d.delta_accuracy, 6)
            << '\n';
    }
}

void write_skips_csv(const std::vector<SkipRecord>& skips, std::ostream& out) {
    out << "barrier,category,reason\n";
    for (const SkipRecord& s : skips) {
        out << to_string(s.barrier) << ',' << to_string(s.category) << ','
            << csv_quote(s.reason) << '\n';
    }
}

void write_improvement_csv(const std::vector<ImprovementRow>& rows, std::ostream& out) {
    out << "barrier,categories_improved,categories_not_improved\n";
    for (const ImprovementRow& r : rows) {
        out << to_string(r.barrier) << ',' << r.improved << ',' << r.not_improved << '\n';
    }
}

}  // namespace barriers
