#include "eclipse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace {

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }

double discount(std::size_t rank) {
  return std::log2(static_cast<double>(rank) + 1.0);
}

}  // namespace

QueryMetric average_precision(const CandidatePool& ranking, const Qrels& qrels,
                              int binary_threshold) {
  const std::size_t total_relevant =
      qrels.relevant_count(ranking.query_id, binary_threshold);
  if (total_relevant == 0) return {0.0, true};

  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (qrels.grade(ranking.query_id, ranking.entries[i].doc_id) >=
        binary_threshold) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return {sum / static_cast<double>(total_relevant), false};
}

QueryMetric ndcg_at_k(const CandidatePool& ranking, const Qrels& qrels,
                      std::size_t k) {
  if (k == 0) throw InvalidArgument("nDCG depth must be >= 1");
  std::vector<int> ideal;
  if (const auto* judged = qrels.judged(ranking.query_id)) {
    for (const auto& [_, g] : *judged) {
      if (g > 0) ideal.push_back(g);
    }
  }
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ideal.size()); ++i) {
    idcg += gain(ideal[i]) / discount(i + 1);
  }
  if (idcg == 0.0) return {0.0, true};

  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranking.size()); ++i) {
    const int g = qrels.grade(ranking.query_id, ranking.entries[i].doc_id);
    if (g > 0) dcg += gain(g) / discount(i + 1);
  }
  return {dcg / idcg, false};
}

double mean_of(const std::map<std::string, double>& per_query) {
  if (per_query.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, v] : per_query) sum += v;
  return sum / static_cast<double>(per_query.size());
}

RunMetrics evaluate_pools(const std::vector<CandidatePool>& pools,
                          const Qrels& qrels, std::size_t k,
                          int binary_threshold) {
  std::map<std::string, const CandidatePool*> by_query;
  bool overlap = false;
  for (const auto& p : pools) {
    by_query.emplace(p.query_id, &p);
    overlap = overlap || qrels.has_query(p.query_id);
  }
  if (!overlap) {
    throw InvalidArgument("run and qrels have no query in common");
  }

  RunMetrics out;
  for (const auto& qid : qrels.query_ids()) {
    auto it = by_query.find(qid);
    if (it == by_query.end()) {
      out.ap.per_query[qid] = 0.0;
      out.ndcg.per_query[qid] = 0.0;
      continue;
    }
    const auto ap = average_precision(*it->second, qrels, binary_threshold);
    const auto nd = ndcg_at_k(*it->second, qrels, k);
    out.ap.per_query[qid] = ap.value;
    out.ndcg.per_query[qid] = nd.value;
    if (ap.undefined) out.ap.undefined_queries.push_back(qid);
    if (nd.undefined) out.ndcg.undefined_queries.push_back(qid);
  }
  out.ap.mean = mean_of(out.ap.per_query);
  out.ndcg.mean = mean_of(out.ndcg.per_query);
  return out;
}

RunMetrics evaluate_run(const std::vector<RunEntry>& run, const Qrels& qrels,
                        std::size_t k, int binary_threshold) {
  // Ranks are 1..n in order of appearance after validation, so pool order
  // equals rank order.
  validate_run(run);
  return evaluate_pools(to_pools(run), qrels, k, binary_threshold);
}

}  // namespace eclipse
