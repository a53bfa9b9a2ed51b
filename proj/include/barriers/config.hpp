#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "barriers/annotator.hpp"
#include "barriers/classifiers.hpp"
#include "barriers/evaluation.hpp"
#include "barriers/features.hpp"

namespace barriers {

/// Every knob of a pipeline run. One key=value config file captures all of
/// it; CLI flags override file values.
struct RunConfig {
    std::string corpus_path;
    std::string countries_path;
    std::string publishers_path;
    std::string out_dir = "out";

    Thresholds thresholds;
    FeatureConfig features;
    TrainConfig train;
    GridSelection grid;  // defaults to all barriers/categories/models/modes
    double train_ratio = 0.8;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string stats_groups = "barriers";  // or "categories"

    /// Thresholds/ratio sanity plus existence of every referenced input path.
    void validate_for_run(bool need_corpus = true) const;
};

RunConfig default_run_config();

/// key=value lines; '#' comments and blank lines ignored. Unknown keys are a
/// ConfigError listing the valid names. List values are comma-separated;
/// barriers/categories/models accept "all".
RunConfig parse_config_text(const std::string& text, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

/// Applies one key=value pair (the CLI override path).
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace barriers
