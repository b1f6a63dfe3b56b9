#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eclipse/retrieval.hpp"

namespace eclipse {

enum class RunVariant { kPrfDime, kLlmDime, kPrfEclipse, kLlmEclipse };

std::string_view to_string(RunVariant v);
RunVariant parse_variant(std::string_view name);
bool is_eclipse(RunVariant v);
bool uses_llm_answer(RunVariant v);

std::string_view to_string(Similarity s);
Similarity parse_similarity(std::string_view name);

enum class RerankMode { kFullCorpus, kPool };

/// Random moon construction from the bottom `window` documents of the pool.
struct SamplingConfig {
  std::vector<std::size_t> windows{30};
  std::size_t trials = 10;
  std::uint64_t seed = 0;
};

/// Everything an experiment needs. Defaults reproduce the published
/// protocol: pool of 1000, k+ in 2..14, k- in 2..6, alpha/beta and retained
/// fractions on 0.1..1.0 in steps of 0.1, k+ = 1 for standard PRF DIME.
struct ExperimentConfig {
  std::filesystem::path queries;
  std::filesystem::path corpus;
  std::filesystem::path qrels;
  std::optional<std::filesystem::path> answers;
  std::filesystem::path output_dir = "out";

  Similarity similarity = Similarity::kInnerProduct;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::size_t> k_plus;
  std::vector<std::size_t> k_minus;
  std::size_t dime_k_plus = 1;
  std::vector<double> retained_fraction;
  std::vector<std::size_t> pool_size{1000};
  RerankMode rerank = RerankMode::kFullCorpus;
  /// Documents written per query in every run file.
  std::size_t depth = 1000;
  std::size_t ndcg_k = 10;
  int relevance_threshold = 2;
  double significance_alpha = 0.05;
  std::optional<SamplingConfig> sampling;
  std::string run_tag = "eclipse";
  unsigned threads = 1;

  /// Filled by normalize(): one message per deduplicated grid.
  std::vector<std::string> warnings;

  static ExperimentConfig defaults();

  /// Sorts every grid and drops duplicates, recording a warning per grid.
  void normalize();
  /// Throws InvalidArgument on empty grids or out-of-range values; also
  /// checks that referenced input files exist when `check_paths` is set.
  void validate(bool check_paths = true) const;
};

/// Reads a JSON object; absent keys keep their defaults. Relative paths are
/// resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(std::string_view json_text,
                                  const std::filesystem::path& base_dir = {});
std::string config_to_json(const ExperimentConfig& config);

/// 0.1, 0.2, ..., 1.0 computed as i / 10 to avoid accumulated drift.
std::vector<double> tenths();

}  // namespace eclipse
