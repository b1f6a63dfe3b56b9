#include "eclipse/runner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/random/uniform_int_distribution.hpp>

#include "eclipse/errors.hpp"
#include "eclipse/reports.hpp"
#include "eclipse/synthgen.hpp"

namespace eclipse {

namespace fs = std::filesystem;

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

/// Per-query (AP, nDCG) for a ranking under the config's metric settings.
struct QueryScores {
  double ap = 0.0;
  double ndcg = 0.0;
};

QueryScores score_ranking(const CandidatePool& ranking, const Qrels& qrels,
                          const ExperimentConfig& config) {
  return {average_precision(ranking, qrels, config.relevance_threshold).value,
          ndcg_at_k(ranking, qrels, config.ndcg_k).value};
}

/// Builds RunMetrics for one grid point from per-query scores; queries in
/// qrels without scores (failed or absent) count as 0, matching
/// evaluate_run on the written run file.
RunMetrics assemble(const Qrels& qrels, const std::vector<std::string>& qids,
                    const std::vector<std::optional<QueryScores>>& scores) {
  RunMetrics m;
  for (const auto& qid : qrels.query_ids()) {
    m.ap.per_query[qid] = 0.0;
    m.ndcg.per_query[qid] = 0.0;
  }
  for (std::size_t i = 0; i < qids.size(); ++i) {
    if (!scores[i] || !qrels.has_query(qids[i])) continue;
    m.ap.per_query[qids[i]] = scores[i]->ap;
    m.ndcg.per_query[qids[i]] = scores[i]->ndcg;
  }
  m.ap.mean = mean_of(m.ap.per_query);
  m.ndcg.mean = mean_of(m.ndcg.per_query);
  return m;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& config) {
  config.validate(true);
  auto queries = load_matrix(config.queries);
  auto corpus = load_matrix(config.corpus);
  auto qrels = parse_qrels(config.qrels);
  if (corpus.empty()) throw InvalidArgument("corpus is empty: " + config.corpus.string());
  if (queries.empty()) throw InvalidArgument("query file is empty: " + config.queries.string());
  if (queries.dim() != corpus.dim()) {
    throw InvalidArgument("query dim " + std::to_string(queries.dim()) +
                          " != corpus dim " + std::to_string(corpus.dim()));
  }
  std::vector<std::string> missing;
  for (const auto& qid : queries.ids()) {
    if (!qrels.has_query(qid)) missing.push_back(qid);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& q : missing) list += (list.empty() ? "" : ", ") + q;
    throw InvalidArgument("queries without relevance judgments: " + list);
  }
  std::optional<EmbeddingMatrix> answers;
  if (config.answers) {
    answers = load_matrix(*config.answers);
    if (answers->dim() != corpus.dim()) {
      throw InvalidArgument("answer embedding dim " +
                            std::to_string(answers->dim()) + " != corpus dim " +
                            std::to_string(corpus.dim()));
    }
  }
  return Dataset{std::move(queries), std::move(corpus), std::move(qrels),
                 std::move(answers)};
}

void validate_point(RunVariant variant, const GridPoint& p) {
  if (p.pool_size == 0) throw InvalidArgument("pool_size must be >= 1");
  if (!(p.retained_fraction > 0.0 && p.retained_fraction <= 1.0)) {
    throw InvalidArgument("retained_fraction must lie in (0, 1]");
  }
  if (is_eclipse(variant)) {
    DimeConfig dc;
    dc.variant = uses_llm_answer(variant) ? DimeVariant::kLlm : DimeVariant::kPrf;
    dc.k_plus = p.k_plus;
    dc.k_minus = p.k_minus;
    dc.alpha = p.alpha;
    dc.beta = p.beta;
    dc.pool_size = p.pool_size;
    dc.retained_fraction = p.retained_fraction;
    dc.validate();
  } else if (variant == RunVariant::kPrfDime) {
    if (p.k_plus == 0 || p.k_plus > p.pool_size) {
      throw InvalidArgument("k_plus must satisfy 0 < k_plus <= pool_size");
    }
  }
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& c,
                                   RunVariant variant) {
  const bool eclipse = is_eclipse(variant);
  const bool prf = !uses_llm_answer(variant);
  const std::vector<std::size_t> k_plus =
      !prf ? std::vector<std::size_t>{0}
           : eclipse ? c.k_plus : std::vector<std::size_t>{c.dime_k_plus};
  const std::vector<std::size_t> k_minus =
      eclipse ? c.k_minus : std::vector<std::size_t>{0};
  const std::vector<double> alpha = eclipse ? c.alpha : std::vector<double>{1.0};
  const std::vector<double> beta = eclipse ? c.beta : std::vector<double>{0.0};

  std::vector<GridPoint> points;
  for (auto pool : c.pool_size)
    for (auto kp : k_plus)
      for (auto km : k_minus)
        for (double a : alpha)
          for (double b : beta)
            for (double f : c.retained_fraction) {
              points.push_back({pool, kp, km, a, b, f});
            }
  return points;
}

GridPoint first_point(const ExperimentConfig& c, RunVariant variant) {
  return expand_grid(c, variant).front();
}

Experiment::Experiment(ExperimentConfig config, Dataset data)
    : config_(std::move(config)), data_(std::move(data)) {
  config_.validate(false);
}

const std::vector<CandidatePool>& Experiment::pools(std::size_t pool_size) {
  auto it = pools_.find(pool_size);
  if (it != pools_.end()) return it->second;
  const std::size_t n = data_.queries.size();
  std::vector<CandidatePool> out(n);
  parallel_for(n, config_.threads, [&](std::size_t i) {
    out[i] = top_k(data_.queries.embedding(i), data_.corpus, pool_size,
                   config_.similarity, std::nullopt, data_.queries.id(i));
  });
  return pools_.emplace(pool_size, std::move(out)).first->second;
}

DimensionMask Experiment::mask_for(std::size_t query, RunVariant variant,
                                   const GridPoint& point,
                                   const std::vector<std::size_t>* moon_positions) {
  const auto& pool = pools(point.pool_size)[query];
  const auto q = data_.queries.embedding(query);
  const auto& qid = data_.queries.id(query);

  Embedding sun;
  if (uses_llm_answer(variant)) {
    const auto row = data_.answers ? data_.answers->find(qid) : std::nullopt;
    if (!row) throw InvalidArgument("no LLM answer embedding for query " + qid);
    sun = data_.answers->embedding(*row);
  } else {
    sun = prf_centroid(pool, data_.corpus, point.k_plus);
  }

  if (!is_eclipse(variant)) {
    return select_dimensions(dime_score_standard(q, sun),
                             point.retained_fraction);
  }
  const Embedding moon =
      moon_positions ? pool_centroid(pool, data_.corpus, *moon_positions)
                     : moon_centroid(pool, data_.corpus, point.k_minus);
  return select_dimensions(eclipse_score(q, sun, moon, point.alpha, point.beta),
                           point.retained_fraction);
}

CandidatePool Experiment::ranking_for(std::size_t query,
                                      const DimensionMask& mask,
                                      std::size_t pool_size) {
  const auto q = data_.queries.embedding(query);
  const auto& qid = data_.queries.id(query);
  if (config_.rerank == RerankMode::kPool) {
    const auto& pool = pools(pool_size)[query];
    return rerank(q, data_.corpus, mask, config_.similarity, config_.depth,
                  &pool, qid);
  }
  return rerank(q, data_.corpus, mask, config_.similarity, config_.depth,
                FullCorpus{}, qid);
}

RunMetrics Experiment::evaluate(const std::vector<CandidatePool>& rankings) const {
  return evaluate_pools(rankings, data_.qrels, config_.ndcg_k,
                        config_.relevance_threshold);
}

std::string Experiment::run_name(RunVariant variant, const GridPoint& p) const {
  std::string name(to_string(variant));
  name += "_k" + std::to_string(p.pool_size);
  if (p.k_plus > 0) name += "_kp" + std::to_string(p.k_plus);
  if (is_eclipse(variant)) {
    name += "_km" + std::to_string(p.k_minus);
    name += "_a" + format_value(p.alpha);
    name += "_b" + format_value(p.beta);
  }
  name += "_f" + format_value(p.retained_fraction);
  return name;
}

RunOutcome Experiment::run_baseline(bool write_file) {
  RunOutcome out;
  out.name = "baseline";
  const std::size_t n = data_.queries.size();
  std::vector<CandidatePool> rankings(n);
  parallel_for(n, config_.threads, [&](std::size_t i) {
    rankings[i] = top_k(data_.queries.embedding(i), data_.corpus, config_.depth,
                        config_.similarity, std::nullopt, data_.queries.id(i));
  });
  for (const auto& r : rankings) {
    auto entries = to_run_entries(r, config_.run_tag);
    out.entries.insert(out.entries.end(), entries.begin(), entries.end());
  }
  out.metrics = evaluate(rankings);
  if (write_file) {
    fs::create_directories(config_.output_dir);
    out.run_file = config_.output_dir / "baseline.run";
    write_run(out.entries, out.run_file);
    write_metrics_json(out, config_.output_dir / "baseline.metrics.json");
  }
  return out;
}

RunOutcome Experiment::run_dime(RunVariant variant, const GridPoint& point,
                                bool write_file) {
  validate_point(variant, point);
  if (uses_llm_answer(variant) && !data_.answers) {
    throw InvalidArgument(std::string(to_string(variant)) +
                          " needs an answers file in the config");
  }
  RunOutcome out;
  out.name = run_name(variant, point);
  pools(point.pool_size);

  const std::size_t n = data_.queries.size();
  std::vector<std::optional<CandidatePool>> rankings(n);
  std::vector<std::string> errors(n);
  parallel_for(n, config_.threads, [&](std::size_t i) {
    try {
      rankings[i] = ranking_for(i, mask_for(i, variant, point), point.pool_size);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  std::vector<CandidatePool> served;
  for (std::size_t i = 0; i < n; ++i) {
    if (!rankings[i]) {
      out.failures.push_back({data_.queries.id(i), errors[i]});
      continue;
    }
    auto entries = to_run_entries(*rankings[i], config_.run_tag);
    out.entries.insert(out.entries.end(), entries.begin(), entries.end());
    served.push_back(std::move(*rankings[i]));
  }
  if (served.empty()) {
    throw InvalidArgument("every query failed for " + out.name + ": " +
                          out.failures.front().reason);
  }
  out.metrics = evaluate(served);
  if (write_file) {
    fs::create_directories(config_.output_dir);
    out.run_file = config_.output_dir / (out.name + ".run");
    write_run(out.entries, out.run_file);
    write_metrics_json(out, config_.output_dir / (out.name + ".metrics.json"));
  }
  return out;
}

SweepReport Experiment::sweep(RunVariant variant, bool write_files) {
  if (uses_llm_answer(variant) && !data_.answers) {
    throw InvalidArgument(std::string(to_string(variant)) +
                          " needs an answers file in the config");
  }
  SweepReport report;
  report.variant = variant;
  report.warnings = config_.warnings;
  const auto points = expand_grid(config_, variant);
  for (const auto& p : points) validate_point(variant, p);
  for (auto size : config_.pool_size) pools(size);

  const std::size_t n = data_.queries.size();
  // scores[point][query]
  std::vector<std::vector<std::optional<QueryScores>>> scores(
      points.size(), std::vector<std::optional<QueryScores>>(n));
  std::vector<std::string> errors(n);

  parallel_for(n, config_.threads, [&](std::size_t q) {
    // Many grid points share a mask; rankings depend only on the mask (and
    // on the pool when re-ranking within it).
    std::map<std::pair<std::size_t, std::vector<std::uint32_t>>, QueryScores> cache;
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const auto& p = points[pi];
      try {
        const auto mask = mask_for(q, variant, p);
        std::pair key{config_.rerank == RerankMode::kPool ? p.pool_size : 0,
                      std::vector<std::uint32_t>(mask.selected().begin(),
                                                 mask.selected().end())};
        auto it = cache.find(key);
        if (it == cache.end()) {
          it = cache.emplace(std::move(key),
                             score_ranking(ranking_for(q, mask, p.pool_size),
                                           data_.qrels, config_))
                   .first;
        }
        scores[pi][q] = it->second;
      } catch (const Error& e) {
        if (errors[q].empty()) errors[q] = e.what();
      }
    }
  });

  for (std::size_t q = 0; q < n; ++q) {
    if (!errors[q].empty()) {
      report.failures.push_back({data_.queries.id(q), errors[q]});
    }
  }
  const auto& qids = data_.queries.ids();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    auto metrics = assemble(data_.qrels, qids, scores[pi]);
    std::size_t failed = 0;
    for (const auto& s : scores[pi]) failed += s ? 0 : 1;
    report.rows.push_back({points[pi], metrics.ap.mean, metrics.ndcg.mean, failed});
    report.per_query.push_back(std::move(metrics));
  }
  // First maximum wins, so ties resolve to the earliest grid point.
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].map > report.rows[report.best_map].map) report.best_map = i;
    if (report.rows[i].ndcg > report.rows[report.best_ndcg].ndcg) report.best_ndcg = i;
  }

  const auto baseline = run_baseline(false);
  std::vector<NamedMetrics> base{{"baseline", baseline.metrics}};
  std::vector<NamedMetrics> best{
      {"best_map", report.per_query[report.best_map]},
      {"best_ndcg", report.per_query[report.best_ndcg]}};
  const auto table = compare(base, best, config_.significance_alpha);
  for (const auto& a : table.annotations[0]) {
    if (a.metric == "map") report.annotations.push_back(a);
  }
  for (const auto& a : table.annotations[1]) {
    if (a.metric == "ndcg") report.annotations.push_back(a);
  }

  if (write_files) write_sweep(report, config_, baseline.metrics);
  return report;
}

SamplingReport Experiment::sample_bottom(RunVariant variant, bool write_files) {
  if (!is_eclipse(variant)) {
    throw InvalidArgument("sample-bottom needs an eclipse variant");
  }
  if (!config_.sampling) {
    throw InvalidArgument("sample-bottom needs a 'sampling' section in the config");
  }
  if (uses_llm_answer(variant) && !data_.answers) {
    throw InvalidArgument(std::string(to_string(variant)) +
                          " needs an answers file in the config");
  }
  const auto& sampling = *config_.sampling;
  SamplingReport report;
  report.variant = variant;
  report.trials = sampling.trials;
  report.point = first_point(config_, variant);
  const auto& fractions = config_.retained_fraction;
  for (double f : fractions) {
    auto p = report.point;
    p.retained_fraction = f;
    validate_point(variant, p);
  }
  const auto& pool_list = pools(report.point.pool_size);
  const std::size_t pool_len = std::min(report.point.pool_size, data_.corpus.size());
  for (auto w : sampling.windows) {
    if (w < report.point.k_minus) {
      throw InvalidArgument("sampling window " + std::to_string(w) +
                            " is smaller than k_minus=" +
                            std::to_string(report.point.k_minus));
    }
    if (w > pool_len) {
      throw InvalidArgument("sampling window " + std::to_string(w) +
                            " exceeds the pool size " + std::to_string(pool_len));
    }
  }

  const std::size_t n = data_.queries.size();
  const auto& qids = data_.queries.ids();
  std::vector<std::string> errors(n);

  // Windows first, then the exact reference (window 0).
  std::vector<std::size_t> windows = sampling.windows;
  windows.push_back(0);
  for (std::size_t w : windows) {
    const std::size_t trials = w == 0 ? 1 : sampling.trials;
    // scores[trial][fraction][query]
    std::vector<std::vector<std::vector<std::optional<QueryScores>>>> scores(
        trials, std::vector<std::vector<std::optional<QueryScores>>>(
                    fractions.size(), std::vector<std::optional<QueryScores>>(n)));
    parallel_for(n, config_.threads, [&](std::size_t q) {
      const auto& pool = pool_list[q];
      std::map<std::vector<std::uint32_t>, QueryScores> cache;
      for (std::size_t t = 0; t < trials; ++t) {
        std::vector<std::size_t> positions;
        if (w > 0) {
          synth::CounterRng rng(sampling.seed, (std::uint64_t{w} << 32) | t, q);
          const std::size_t len = pool.size();
          std::vector<std::size_t> window(std::min(w, len));
          std::iota(window.begin(), window.end(), len - window.size());
          for (std::size_t i = 0; i < report.point.k_minus && i < window.size(); ++i) {
            const std::size_t span = window.size() - i;
            boost::random::uniform_int_distribution<std::size_t> pick(0, span - 1);
            std::swap(window[i], window[i + pick(rng)]);
          }
          positions.assign(window.begin(),
                           window.begin() + static_cast<std::ptrdiff_t>(
                                                std::min(report.point.k_minus,
                                                         window.size())));
          // Same summation order as the exact bottom-k- moon.
          std::sort(positions.rbegin(), positions.rend());
        }
        for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
          auto p = report.point;
          p.retained_fraction = fractions[fi];
          try {
            const auto mask = mask_for(q, variant, p, w > 0 ? &positions : nullptr);
            std::vector<std::uint32_t> key(mask.selected().begin(),
                                           mask.selected().end());
            auto it = cache.find(key);
            if (it == cache.end()) {
              it = cache.emplace(std::move(key),
                                 score_ranking(ranking_for(q, mask, p.pool_size),
                                               data_.qrels, config_))
                       .first;
            }
            scores[t][fi][q] = it->second;
          } catch (const Error& e) {
            if (errors[q].empty()) errors[q] = e.what();
          }
        }
      }
    });

    for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
      SamplingRow row;
      row.window = w;
      row.retained_fraction = fractions[fi];
      for (std::size_t t = 0; t < trials; ++t) {
        const auto m = assemble(data_.qrels, qids, scores[t][fi]);
        row.trial_ap.push_back(m.ap.mean);
        row.trial_ndcg.push_back(m.ndcg.mean);
      }
      row.ap = mean_std(row.trial_ap);
      row.ndcg = mean_std(row.trial_ndcg);
      report.rows.push_back(std::move(row));
    }
  }
  for (std::size_t q = 0; q < n; ++q) {
    if (!errors[q].empty()) report.failures.push_back({qids[q], errors[q]});
  }
  if (write_files) write_sampling(report, config_);
  return report;
}

ComparisonTable compare(const std::vector<NamedMetrics>& baselines,
                        const std::vector<NamedMetrics>& systems, double alpha) {
  ComparisonTable table{baselines, systems, {}};
  table.annotations.assign(systems.size(), {});
  for (const std::string metric : {"map", "ndcg"}) {
    auto pick = [&](const RunMetrics& m) -> const MetricResult& {
      return metric == "map" ? m.ap : m.ndcg;
    };
    struct Slot {
      std::size_t system;
      std::size_t index;
    };
    std::vector<Slot> tested;
    std::vector<double> p_values;
    for (std::size_t s = 0; s < systems.size(); ++s) {
      for (const auto& b : baselines) {
        const auto& sys = pick(systems[s].metrics);
        const auto& base = pick(b.metrics);
        std::set<std::string> qa, qb;
        for (const auto& [q, _] : sys.per_query) qa.insert(q);
        for (const auto& [q, _] : base.per_query) qb.insert(q);
        if (qa != qb) {
          throw InvalidArgument("systems '" + systems[s].name + "' and '" +
                                b.name + "' cover different query sets");
        }
        Annotation a;
        a.metric = metric;
        a.against = b.name;
        try {
          a.outcome = stats::compare_systems(base, sys, alpha);
          tested.push_back({s, table.annotations[s].size()});
          p_values.push_back(a.outcome->p_value);
        } catch (const Error& e) {
          a.note = std::string("n/a: ") + e.what();
        }
        table.annotations[s].push_back(std::move(a));
      }
    }
    const auto reject = stats::holm_bonferroni(p_values, alpha);
    for (std::size_t i = 0; i < tested.size(); ++i) {
      table.annotations[tested[i].system][tested[i].index].rejected = reject[i];
    }
  }
  return table;
}

}  // namespace eclipse
