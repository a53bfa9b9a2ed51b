#pragma once

#include "barriers/config.hpp"

namespace barriers {

/// Exit codes shared by every subcommand: 0 success, 1 degraded (grid cells
/// skipped), 2 usage/config error, 3 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDegraded = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Loads corpus and metadata, prints coverage, writes validation_report.json.
int cmd_validate(const RunConfig& config);
/// Writes labels.jsonl and annotation_report.json.
int cmd_annotate(const RunConfig& config);
/// Runs the experiment grid; writes reports/deltas/skips/improvement CSVs and
/// serialized models. Returns 1 when any cell was skipped.
int cmd_train_eval(const RunConfig& config);
/// Writes the descriptive-statistics CSVs and SVG charts.
int cmd_stats(const RunConfig& config);

/// Maps thrown errors onto the exit-code contract, printing the message.
int run_command(int (*command)(const RunConfig&), const RunConfig& config);

}  // namespace barriers
