#pragma once

#include <filesystem>
#include <string>

#include "eclipse/runner.hpp"

namespace eclipse {

/// {"name", "map", "ndcg", "per_query": {...}, "failures": [...]}.
void write_metrics_json(const RunOutcome& run, const std::filesystem::path& path);

/// Curve file for one pool size. The zero-padded size keeps lexicographic
/// and numeric order identical.
std::string curve_file_name(RunVariant variant, std::size_t pool_size);

/// Writes into config.output_dir:
///   sweep_<variant>.csv            one row per grid point, grid order
///   sweep_<variant>_per_query.csv  row index, query id, AP, nDCG
///   curve_<variant>_k<pool>.csv    best AP / nDCG per retained fraction
///   summary_<variant>.json         best point per metric, significance
void write_sweep(const SweepReport& report, const ExperimentConfig& config,
                 const RunMetrics& baseline);

/// sampling_<variant>.json and sampling_<variant>.txt.
void write_sampling(const SamplingReport& report, const ExperimentConfig& config);

/// Rows per window (exact bottom last), columns per retained fraction,
/// cells "mean ± std" for AP and nDCG.
std::string format_sampling_table(const SamplingReport& report);

/// One row per baseline and system, AP and nDCG columns. A system cell gets
/// the letter of every baseline it beats after correction; "n/a" marks a
/// comparison that could not be tested.
std::string format_comparison_table(const ComparisonTable& table);
std::string comparison_to_json(const ComparisonTable& table);

}  // namespace eclipse
