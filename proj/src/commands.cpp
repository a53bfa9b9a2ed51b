#include "barriers/commands.hpp"

#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "barriers/analytics.hpp"
#include "barriers/errors.hpp"
#include "barriers/evaluation.hpp"
#include "barriers/io_util.hpp"
#include "barriers/synthetic.hpp"

namespace barriers {

namespace fs = std::filesystem;

namespace {

struct LoadedInputs {
    ParseResult parsed;
    MetadataKb kb;
};

LoadedInputs load_inputs(const RunConfig& config) {
    LoadedInputs loaded;
    loaded.parsed = parse_corpus_file(config.corpus_path);
    loaded.kb = load_metadata_kb(config.countries_path, config.publishers_path);
    for (const std::string& warning : loaded.kb.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }
    return loaded;
}

fs::path ensure_out_dir(const RunConfig& config) {
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory: " + dir.string());
    }
    return dir;
}

}  // namespace

int cmd_validate(const RunConfig& config) {
    config.validate_for_run();
    const LoadedInputs loaded = load_inputs(config);
    const CorpusIndex& corpus = loaded.parsed.index;

    std::set<std::string> corpus_publishers;
    for (const NewsArticle& article : corpus.articles()) {
        corpus_publishers.insert(article.publisher_id);
    }
    std::size_t resolved = 0, with_profile = 0;
    for (const std::string& publisher_id : corpus_publishers) {
        const Publisher* publisher = lookup_publisher(loaded.kb.publishers, publisher_id);
        if (publisher == nullptr) {
            continue;
        }
        ++resolved;
        with_profile += loaded.kb.countries.contains(publisher->headquarters_country);
    }

    const fs::path dir = ensure_out_dir(config);
    std::ostringstream report;
    write_validation_report_json(loaded.parsed.issues, report);
    write_text_file(dir / "validation_report.json", report.str());
    write_manifest(dir, {"validation_report.json"});

    std::cout << "articles accepted: " << corpus.articles().size() << '\n'
              << "events: " << corpus.events().size() << '\n'
              << "validation issues: " << loaded.parsed.issues.size() << '\n'
              << "publishers in corpus: " << corpus_publishers.size() << '\n'
              << "publishers resolved in registry: " << resolved << '\n'
              << "publishers with country profile: " << with_profile << '\n';
    return kExitOk;
}

int cmd_annotate(const RunConfig& config) {
    config.validate_for_run();
    const LoadedInputs loaded = load_inputs(config);
    const AnnotatedCorpus annotated =
        annotate_corpus(loaded.parsed.index, loaded.kb, config.thresholds);

    const fs::path dir = ensure_out_dir(config);
    std::ostringstream labels;
    write_labels_jsonl(annotated, labels);
    write_text_file(dir / "labels.jsonl", labels.str());
    std::ostringstream report;
    write_annotation_report_json(annotated.report, report);
    write_text_file(dir / "annotation_report.json", report.str());
    write_manifest(dir, {"labels.jsonl", "annotation_report.json"});

    for (BarrierKind kind : all_barriers()) {
        const auto& per_barrier = annotated.report.barriers[static_cast<std::size_t>(kind)];
        std::cout << to_string(kind) << ": labeled " << per_barrier.labeled << ", dropped "
                  << per_barrier.dropped << '\n';
    }
    return kExitOk;
}

int cmd_train_eval(const RunConfig& config) {
    config.validate_for_run();
    const LoadedInputs loaded = load_inputs(config);
    const AnnotatedCorpus annotated =
        annotate_corpus(loaded.parsed.index, loaded.kb, config.thresholds);

    ExperimentConfig experiment;
    experiment.grid = config.grid;
    experiment.features = config.features;
    experiment.train = config.train;
    experiment.train_ratio = config.train_ratio;
    experiment.seed = config.seed;
    experiment.jobs = config.jobs;
    const ExperimentResults results =
        run_experiment_grid(loaded.parsed.index, annotated, experiment);

    const fs::path dir = ensure_out_dir(config);
    std::vector<std::string> produced;
    const auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        produced.push_back(name);
    };
    std::ostringstream reports, deltas, skips;
    write_reports_csv(results.reports, reports);
    emit("reports.csv", reports.str());
    write_deltas_csv(results.deltas, deltas);
    emit("deltas.csv", deltas.str());
    write_skips_csv(results.skips, skips);
    emit("skips.csv", skips.str());
    // The improvement table needs paired modes; emit it only when the grid
    // ran both feature modes.
    if (config.grid.modes.size() == 2 && !results.reports.empty()) {
        std::ostringstream improvement;
        write_improvement_csv(improvement_table(results.reports), improvement);
        emit("improvement.csv", improvement.str());
    }
    std::error_code ec;
    fs::create_directories(dir / "models", ec);
    if (ec) {
        throw IoError("cannot create models directory under " + dir.string());
    }
    for (const auto& [name, content] : results.model_files) {
        write_text_file(dir / "models" / name, content);
        produced.push_back("models/" + name);
    }
    write_manifest(dir, produced);

    std::cout << "grid reports: " << results.reports.size() << '\n'
              << "cells skipped: " << results.skips.size() << '\n';
    for (const SkipRecord& skip : results.skips) {
        std::cout << "skipped " << to_string(skip.barrier) << '/' << to_string(skip.category)
                  << ": " << skip.reason << '\n';
    }
    return results.skips.empty() ? kExitOk : kExitDegraded;
}

int cmd_stats(const RunConfig& config) {
    config.validate_for_run();
    const LoadedInputs loaded = load_inputs(config);
    const CorpusIndex& corpus = loaded.parsed.index;
    const AnnotatedCorpus annotated = annotate_corpus(corpus, loaded.kb, config.thresholds);

    const fs::path dir = ensure_out_dir(config);
    std::vector<std::string> produced;
    const auto emit = [&](const std::string& name, const std::string& content) {
        write_text_file(dir / name, content);
        produced.push_back(name);
    };

    std::ostringstream publisher_csv;
    write_publisher_stats_csv(publisher_stats(corpus, annotated), publisher_csv);
    emit("publisher_stats.csv", publisher_csv.str());

    const auto distribution = class_distribution(corpus, annotated);
    std::ostringstream distribution_csv;
    write_class_distribution_csv(distribution, distribution_csv);
    emit("class_distribution.csv", distribution_csv.str());

    std::ostringstream imbalance_csv;
    write_imbalance_csv(imbalance_ratios(distribution), imbalance_csv);
    emit("imbalance.csv", imbalance_csv.str());

    const auto groups = config.stats_groups == "categories"
                            ? concept_groups_by_category(corpus)
                            : concept_groups_by_barrier(corpus, annotated);
    const ConceptOverlap overlap = concept_overlap(groups);
    std::ostringstream overlap_csv;
    write_concept_overlap_csv(overlap, overlap_csv);
    emit("concept_overlap.csv", overlap_csv.str());

    for (BarrierKind kind : all_barriers()) {
        std::ostringstream svg;
        write_class_distribution_svg(kind, distribution, svg);
        emit("class_distribution_" + std::string(to_string(kind)) + ".svg", svg.str());
    }
    if (overlap.group_names.size() == 2 || overlap.group_names.size() == 3) {
        std::ostringstream venn;
        write_venn_svg(overlap, venn);
        emit("concept_overlap.svg", venn.str());
    }
    write_manifest(dir, produced);
    std::cout << "stats files written: " << produced.size() << '\n';
    return kExitOk;
}

int run_command(int (*command)(const RunConfig&), const RunConfig& config) {
    try {
        return command(config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace barriers
