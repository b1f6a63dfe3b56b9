#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eclipse/retrieval.hpp"
#include "eclipse/trec_io.hpp"

namespace eclipse {

/// A per-query metric. `undefined` marks queries whose normalizer is zero
/// (no relevant documents for AP, IDCG = 0 for nDCG); their value is 0.0.
struct QueryMetric {
  double value = 0.0;
  bool undefined = false;
};

struct MetricResult {
  std::map<std::string, double> per_query;
  double mean = 0.0;
  /// Queries scored 0.0 because the metric was undefined for them.
  std::vector<std::string> undefined_queries;
};

inline constexpr int kDefaultRelevanceThreshold = 2;
inline constexpr std::size_t kDefaultNdcgDepth = 10;

/// AP = (1/R) * sum of precision@r over relevant ranks r, with R counting
/// every judged document of grade >= threshold, retrieved or not.
QueryMetric average_precision(const CandidatePool& ranking, const Qrels& qrels,
                              int binary_threshold = kDefaultRelevanceThreshold);

/// nDCG@k with exponential gain 2^grade - 1 and discount log2(rank + 1).
/// The ideal ordering sorts every judged document by grade.
QueryMetric ndcg_at_k(const CandidatePool& ranking, const Qrels& qrels,
                      std::size_t k = kDefaultNdcgDepth);

struct RunMetrics {
  MetricResult ap;
  MetricResult ndcg;
};

/// Scores every qrels query; queries missing from the run score 0. Queries
/// only present in the run are ignored. Throws InvalidArgument when the run
/// and qrels share no query.
RunMetrics evaluate_run(const std::vector<RunEntry>& run, const Qrels& qrels,
                        std::size_t k = kDefaultNdcgDepth,
                        int binary_threshold = kDefaultRelevanceThreshold);

/// Same as evaluate_run over already ranked pools.
RunMetrics evaluate_pools(const std::vector<CandidatePool>& pools,
                          const Qrels& qrels,
                          std::size_t k = kDefaultNdcgDepth,
                          int binary_threshold = kDefaultRelevanceThreshold);

/// Mean of per-query values summed in query-id order.
double mean_of(const std::map<std::string, double>& per_query);

}  // namespace eclipse
