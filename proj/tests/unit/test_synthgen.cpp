#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "eclipse/dime.hpp"
#include "eclipse/errors.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/synthgen.hpp"

using namespace eclipse;
using namespace eclipse::synth;

namespace {

SynthSpec small_spec(double sigma = 0.05) {
  SynthSpec s;
  s.dim = 32;
  s.planted_size = 4;
  s.queries = 6;
  s.relevant_per_query = 5;
  s.irrelevant_per_query = 40;
  s.noise_sigma = sigma;
  s.seed = 11;
  return s;
}

}  // namespace

TEST(SynthSpec, Validation) {
  auto s = small_spec();
  s.planted_size = s.dim;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.planted_size = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.queries = 0;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s = small_spec();
  s.noise_sigma = -1;
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(Generate, ShapesIdsAndQrels) {
  const auto spec = small_spec();
  const auto g = generate(spec);
  EXPECT_EQ(g.queries.size(), spec.queries);
  EXPECT_EQ(g.corpus.size(), spec.queries * (spec.relevant_per_query + spec.irrelevant_per_query));
  EXPECT_EQ(g.corpus.dim(), spec.dim);
  EXPECT_EQ(g.queries.id(0), query_id(spec, 0));
  for (std::size_t q = 0; q < spec.queries; ++q) {
    const auto qid = g.queries.id(q);
    EXPECT_EQ(g.qrels.relevant_count(qid, 2), spec.relevant_per_query);
    EXPECT_EQ(g.qrels.judged(qid)->size(),
              spec.relevant_per_query + spec.irrelevant_per_query);
    const auto& s = g.planted.at(qid);
    EXPECT_EQ(s.size(), spec.planted_size);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::uint32_t>(s.begin(), s.end()).size(), s.size());
  }
  EXPECT_EQ(g.qrels.grade(query_id(spec, 0), doc_id(spec, 0, 0)), kRelevantGrade);
  EXPECT_EQ(g.qrels.grade(query_id(spec, 0), doc_id(spec, 0, spec.relevant_per_query)), 0);
}

TEST(Generate, DeterministicAndThreadIndependent) {
  const auto spec = small_spec();
  const auto a = generate(spec, 1);
  const auto b = generate(spec, 1);
  const auto c = generate(spec, 4);
  EXPECT_EQ(a.queries, b.queries);
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_EQ(a.qrels, b.qrels);
  EXPECT_EQ(a.planted, b.planted);
  EXPECT_EQ(a.corpus, c.corpus);
  EXPECT_EQ(a.queries, c.queries);
  auto other = spec;
  other.seed = 12;
  EXPECT_NE(generate(other).corpus, a.corpus);
}

TEST(Generate, NoiselessSeparatesPerfectly) {
  const auto spec = small_spec(0.0);
  const auto g = generate(spec);
  std::vector<CandidatePool> pools;
  for (std::size_t q = 0; q < g.queries.size(); ++q) {
    pools.push_back(top_k(g.queries.embedding(q), g.corpus, 100, Similarity::kInnerProduct,
                          std::nullopt, g.queries.id(q)));
  }
  const auto m = evaluate_pools(pools, g.qrels);
  EXPECT_DOUBLE_EQ(m.ap.mean, 1.0);
}

TEST(Generate, NoiselessEclipseRecoversPlantedSet) {
  const auto spec = small_spec(0.0);
  const auto g = generate(spec);
  for (std::size_t q = 0; q < g.queries.size(); ++q) {
    const auto qe = g.queries.embedding(q);
    const auto pool = top_k(qe, g.corpus, 100, Similarity::kInnerProduct);
    const auto u = eclipse_score(qe, prf_centroid(pool, g.corpus, 2),
                                 moon_centroid(pool, g.corpus, 2), 1.0, 1.0);
    const double f = double(spec.planted_size) / double(spec.dim);
    const auto mask = select_dimensions(u, f);
    EXPECT_EQ(std::vector<std::uint32_t>(mask.selected().begin(), mask.selected().end()),
              g.planted.at(g.queries.id(q)));

    const auto masked = rerank(qe, g.corpus, mask, Similarity::kInnerProduct, 100, FullCorpus{},
                               g.queries.id(q));
    EXPECT_DOUBLE_EQ(average_precision(masked, g.qrels).value, 1.0);
  }
}

TEST(CounterRng, KeyedStreamsDiffer) {
  CounterRng a(7, 0, 0), b(7, 0, 1), c(7, 0, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_EQ(x, c());
  EXPECT_NE(a(), x);
}
