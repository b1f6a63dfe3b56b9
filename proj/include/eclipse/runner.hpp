#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eclipse/config.hpp"
#include "eclipse/dime.hpp"
#include "eclipse/embedding_store.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/stats.hpp"
#include "eclipse/trec_io.hpp"

namespace eclipse {

enum class ExitStatus { kOk = 0, kValidationError = 1, kPartialFailure = 2 };

struct Dataset {
  EmbeddingMatrix queries;
  EmbeddingMatrix corpus;
  Qrels qrels;
  std::optional<EmbeddingMatrix> answers;
};

/// Loads every input named by the config. Throws InvalidArgument when the
/// dimensions disagree or when some query has no judgments (all such query
/// ids are listed).
Dataset load_dataset(const ExperimentConfig& config);

/// One hyperparameter combination. Fields a variant does not use are zero:
/// standard DIME has beta = 0 and k_minus = 0, LLM variants have k_plus = 0.
struct GridPoint {
  std::size_t pool_size = 1000;
  std::size_t k_plus = 0;
  std::size_t k_minus = 0;
  double alpha = 1.0;
  double beta = 0.0;
  double retained_fraction = 1.0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Checks the point against the variant's constraints (see DimeConfig).
void validate_point(RunVariant variant, const GridPoint& point);

/// Every grid point of a variant, in a fixed nested order
/// (pool_size, k_plus, k_minus, alpha, beta, retained_fraction).
std::vector<GridPoint> expand_grid(const ExperimentConfig& config,
                                   RunVariant variant);

/// The first value of every grid: the point `dime-run` uses by default.
GridPoint first_point(const ExperimentConfig& config, RunVariant variant);

struct QueryFailure {
  std::string query_id;
  std::string reason;
};

struct RunOutcome {
  std::string name;
  std::vector<RunEntry> entries;
  RunMetrics metrics;
  std::vector<QueryFailure> failures;
  std::filesystem::path run_file;

  ExitStatus status() const {
    return failures.empty() ? ExitStatus::kOk : ExitStatus::kPartialFailure;
  }
};

struct SweepRow {
  GridPoint point;
  double map = 0.0;
  double ndcg = 0.0;
  std::size_t failed_queries = 0;
};

struct Annotation {
  std::string metric;
  std::string against;
  std::optional<stats::TestOutcome> outcome;  // empty when degenerate
  bool rejected = false;
  std::string note;
};

struct SweepReport {
  RunVariant variant = RunVariant::kPrfEclipse;
  std::vector<SweepRow> rows;
  /// Per-row per-query metrics, aligned with `rows`.
  std::vector<RunMetrics> per_query;
  std::size_t best_map = 0;
  std::size_t best_ndcg = 0;
  std::vector<Annotation> annotations;
  std::vector<std::string> warnings;
  std::vector<QueryFailure> failures;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct SamplingRow {
  /// Window size, or 0 for the exact bottom-k- reference.
  std::size_t window = 0;
  double retained_fraction = 1.0;
  MeanStd ap;
  MeanStd ndcg;
  std::vector<double> trial_ap;
  std::vector<double> trial_ndcg;
};

struct SamplingReport {
  RunVariant variant = RunVariant::kPrfEclipse;
  GridPoint point;
  std::size_t trials = 0;
  std::vector<SamplingRow> rows;
  std::vector<QueryFailure> failures;
};

/// Orchestrates runs over one loaded dataset. Full-dimensional pools are
/// computed once per pool size and reused by every run.
class Experiment {
 public:
  Experiment(ExperimentConfig config, Dataset data);

  const ExperimentConfig& config() const noexcept { return config_; }
  const Dataset& data() const noexcept { return data_; }

  /// Full-dimensional top-`depth` retrieval per query.
  RunOutcome run_baseline(bool write_file = true);

  /// Pool at full dimensionality, sun and moon per variant, importance,
  /// mask, masked re-retrieval, evaluation. Queries that fail (e.g. no LLM
  /// answer) are skipped and listed in `failures`.
  RunOutcome run_dime(RunVariant variant, const GridPoint& point,
                      bool write_file = true);

  /// Evaluates every grid point; writes CSV rows, per-query values, curves
  /// and a JSON summary into the output directory.
  SweepReport sweep(RunVariant variant, bool write_files = true);

  /// Moon built from k- documents sampled without replacement from the
  /// bottom `window` of the pool, over `trials` trials, for every retained
  /// fraction of the config; plus the exact bottom-k- reference rows.
  SamplingReport sample_bottom(RunVariant variant = RunVariant::kPrfEclipse,
                               bool write_files = true);

  const std::vector<CandidatePool>& pools(std::size_t pool_size);

  /// Importance mask for one query; throws when the query cannot be served
  /// (missing answer embedding, pool too short). `moon_positions` replaces
  /// the bottom-k- moon with explicit pool slots.
  DimensionMask mask_for(std::size_t query, RunVariant variant,
                         const GridPoint& point,
                         const std::vector<std::size_t>* moon_positions = nullptr);

  std::string run_name(RunVariant variant, const GridPoint& point) const;

 private:
  CandidatePool ranking_for(std::size_t query, const DimensionMask& mask,
                            std::size_t pool_size);
  RunMetrics evaluate(const std::vector<CandidatePool>& rankings) const;

  ExperimentConfig config_;
  Dataset data_;
  std::map<std::size_t, std::vector<CandidatePool>> pools_;
};

/// Pairwise significance of every system against every baseline, per metric,
/// with Holm-Bonferroni across the comparisons of a metric.
struct NamedMetrics {
  std::string name;
  RunMetrics metrics;
};

struct ComparisonTable {
  std::vector<NamedMetrics> baselines;  // letters a, b, c, ... in order
  std::vector<NamedMetrics> systems;
  std::vector<std::vector<Annotation>> annotations;  // [system] -> list
};

ComparisonTable compare(const std::vector<NamedMetrics>& baselines,
                        const std::vector<NamedMetrics>& systems,
                        double alpha = 0.05);

/// Parallel loop over [0, n); each index runs exactly once. Results written
/// by index stay independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn);

}  // namespace eclipse

#include "eclipse/detail/parallel.hpp"
