#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../fixtures/metric_reference.hpp"
#include "eclipse/errors.hpp"
#include "eclipse/metrics.hpp"

using namespace eclipse;

namespace {

CandidatePool ranking(const std::string& qid, const std::vector<std::string>& docs) {
  CandidatePool p{qid, {}};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    p.entries.push_back({docs[i], static_cast<double>(docs.size() - i)});
  }
  return p;
}

Qrels qrels_for(const std::string& qid, const std::map<std::string, int>& judged) {
  Qrels q;
  for (const auto& [d, g] : judged) q.add(qid, d, g);
  return q;
}

}  // namespace

TEST(AveragePrecision, HandFixture) {
  const auto q = qrels_for("q", {{"A", 2}, {"B", 2}});
  EXPECT_NEAR(average_precision(ranking("q", {"A", "C", "B"}), q).value, 5.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(average_precision(ranking("q", {"A", "B", "C"}), q).value, 1.0);
  EXPECT_DOUBLE_EQ(average_precision(ranking("q", {"C", "D"}), q).value, 0.0);
}

TEST(AveragePrecision, NoRelevantIsFlagged) {
  const auto q = qrels_for("q", {{"A", 1}});
  const auto m = average_precision(ranking("q", {"A"}), q);
  EXPECT_EQ(m.value, 0.0);
  EXPECT_TRUE(m.undefined);
  EXPECT_FALSE(average_precision(ranking("q", {"A"}), q, 1).undefined);
}

TEST(Ndcg, HandFixture) {
  const auto q = qrels_for("q", {{"A", 2}, {"C", 1}});
  EXPECT_NEAR(ndcg_at_k(ranking("q", {"A", "B", "C"}), q, 10).value, 3.5 / 3.630929753571457,
              1e-12);
  EXPECT_NEAR(ndcg_at_k(ranking("q", {"A", "B", "C"}), q, 10).value, 0.963940, 1e-6);
  EXPECT_DOUBLE_EQ(ndcg_at_k(ranking("q", {"A", "C"}), q, 10).value, 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k(ranking("q", {"A", "X", "Y"}), q, 1).value, 1.0);
}

TEST(Ndcg, ZeroIdealIsFlagged) {
  const auto q = qrels_for("q", {{"A", 0}});
  const auto m = ndcg_at_k(ranking("q", {"A"}), q, 10);
  EXPECT_EQ(m.value, 0.0);
  EXPECT_TRUE(m.undefined);
}

TEST(MetricFixtures, MatchReferenceValues) {
  for (const auto& f : eclipse::testing::metric_references()) {
    const auto q = qrels_for("q", f.judgments);
    const auto r = ranking("q", f.ranking);
    EXPECT_NEAR(average_precision(r, q, f.threshold).value, f.ap, 1e-9) << f.name;
    EXPECT_NEAR(ndcg_at_k(r, q, f.k).value, f.ndcg, 1e-9) << f.name;
  }
}

TEST(EvaluateRun, Examples) {
  Qrels q;
  q.add("q1", "a", 2);
  q.add("q2", "b", 2);
  std::vector<RunEntry> run{{"q1", "a", 1, 1.0, "t"}, {"q2", "x", 1, 1.0, "t"}};
  const auto m = evaluate_run(run, q);
  EXPECT_DOUBLE_EQ(m.ap.mean, 0.5);
  EXPECT_DOUBLE_EQ(m.ap.per_query.at("q1"), 1.0);
  EXPECT_DOUBLE_EQ(m.ap.per_query.at("q2"), 0.0);

  std::vector<RunEntry> partial{{"q1", "a", 1, 1.0, "t"}};
  EXPECT_DOUBLE_EQ(evaluate_run(partial, q).ap.mean, 0.5);  // q2 absent counts 0

  std::vector<RunEntry> disjoint{{"q9", "a", 1, 1.0, "t"}};
  EXPECT_THROW(evaluate_run(disjoint, q), InvalidArgument);
}

TEST(EvaluateRun, ApFixtureAsRun) {
  const auto q = qrels_for("q1", {{"A", 2}, {"B", 2}});
  std::vector<RunEntry> run{{"q1", "A", 1, 3, "t"}, {"q1", "C", 2, 2, "t"}, {"q1", "B", 3, 1, "t"}};
  EXPECT_NEAR(evaluate_run(run, q).ap.mean, 0.833333, 1e-6);
}

TEST(Properties, ApMatchesBruteForce) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<std::string> docs;
    std::map<std::string, int> judged;
    for (std::size_t i = 0; i < n + 5; ++i) {
      const std::string id = "d" + std::to_string(i);
      if (i < n) docs.push_back(id);
      if (rng() % 2) judged[id] = static_cast<int>(rng() % 4);
    }
    std::shuffle(docs.begin(), docs.end(), rng);
    const auto q = qrels_for("q", judged);

    std::size_t relevant_total = 0;
    for (const auto& [d, g] : judged) relevant_total += g >= 2;
    double brute = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      auto it = judged.find(docs[r]);
      if (it == judged.end() || it->second < 2) continue;
      std::size_t hits = 0;
      for (std::size_t j = 0; j <= r; ++j) {
        auto jt = judged.find(docs[j]);
        hits += jt != judged.end() && jt->second >= 2;
      }
      brute += double(hits) / double(r + 1);
    }
    if (relevant_total > 0) brute /= double(relevant_total);
    EXPECT_NEAR(average_precision(ranking("q", docs), q).value, brute, 1e-12);
  }
}

TEST(Properties, RankBasedAndBounded) {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng() % 30;
    std::vector<std::string> docs;
    std::map<std::string, int> judged;
    for (std::size_t i = 0; i < n; ++i) {
      docs.push_back("d" + std::to_string(i));
      if (rng() % 3 == 0) judged[docs.back()] = static_cast<int>(rng() % 4);
    }
    judged["d0"] = 3;
    const auto q = qrels_for("q", judged);
    auto r1 = ranking("q", docs);
    auto r2 = r1;
    for (auto& e : r2.entries) e.score = std::exp(e.score) * 7.0 - 3.0;
    const double ap = average_precision(r1, q).value, nd = ndcg_at_k(r1, q, 10).value;
    EXPECT_EQ(ap, average_precision(r2, q).value);
    EXPECT_EQ(nd, ndcg_at_k(r2, q, 10).value);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
    EXPECT_GE(nd, 0.0);
    EXPECT_LE(nd, 1.0 + 1e-12);
  }
}

TEST(MeanOf, SortedSummation) {
  std::map<std::string, double> v{{"a", 1.0}, {"b", 0.0}, {"c", 0.5}};
  EXPECT_DOUBLE_EQ(mean_of(v), 0.5);
  EXPECT_EQ(mean_of({}), 0.0);
}
