// Generated by tools/oracles/metrics_oracle.py; do not edit by hand.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace eclipse::testing {

struct MetricReference {
  const char* name;
  std::vector<std::string> ranking;
  std::map<std::string, int> judgments;
  std::size_t k;
  int threshold;
  double ap;
  double ndcg;
};

inline const std::vector<MetricReference>& metric_references() {
  static const std::vector<MetricReference> refs = {
      {"two_relevant_one_gap", {"A", "C", "B"}, {{"A", 2}, {"B", 2}}, 10, 2, 0.8333333333333333, 0.9197207891481876},
      {"graded_201", {"A", "B", "C"}, {{"A", 2}, {"C", 1}}, 10, 2, 1.0, 0.9639404333166532},
      {"perfect", {"A", "B", "C", "D"}, {{"A", 3}, {"B", 2}, {"C", 2}}, 10, 2, 1.0, 1.0},
      {"nothing_retrieved", {"X", "Y", "Z"}, {{"A", 2}, {"B", 2}}, 10, 2, 0.0, 0.0},
      {"unretrieved_relevant", {"A", "X", "Y"}, {{"A", 2}, {"B", 3}, {"C", 2}}, 10, 2, 0.3333333333333333, 0.28866167924141933},
      {"binary_threshold_1", {"d1", "d2", "d3", "d4", "d5"}, {{"d2", 1}, {"d4", 1}, {"d9", 1}}, 10, 1, 0.3333333333333333, 0.49818925746641285},
      {"grade1_below_threshold", {"A", "B", "C"}, {{"A", 1}, {"B", 2}, {"C", 1}}, 10, 2, 0.5, 0.8213137146137828},
      {"cutoff_k1", {"B", "A", "C"}, {{"A", 3}, {"B", 3}, {"C", 1}}, 1, 2, 1.0, 1.0},
      {"cutoff_k3_long", {"a", "b", "c", "d", "e", "f"}, {{"d", 3}, {"a", 1}, {"f", 2}, {"z", 2}}, 3, 2, 0.19444444444444442, 0.09622055974713978},
      {"deep_ranks", {"d01", "d02", "d03", "d04", "d05", "d06", "d07", "d08", "d09", "d10", "d11", "d12", "d13", "d14", "d15"}, {{"d03", 2}, {"d07", 3}, {"d11", 2}, {"d15", 1}, {"d20", 2}}, 10, 2, 0.22294372294372294, 0.3175478438452421},
      {"inverted_order", {"C", "B", "A"}, {{"A", 3}, {"B", 2}, {"C", 1}}, 10, 1, 1.0, 0.6806060567602009},
      {"no_relevant_judged", {"A", "B"}, {{"A", 0}, {"B", 1}}, 10, 2, 0.0, 0.6309297535714575},
      {"all_relevant_reversed_grades", {"E", "D", "C", "B", "A"}, {{"A", 4}, {"B", 3}, {"C", 2}, {"D", 1}, {"E", 0}}, 5, 2, 0.4777777777777777, 0.5128759531627177},
  };
  return refs;
}

}  // namespace eclipse::testing
