#include "eclipse/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

json point_json(const GridPoint& p) {
  return {{"pool_size", p.pool_size}, {"k_plus", p.k_plus},
          {"k_minus", p.k_minus},     {"alpha", p.alpha},
          {"beta", p.beta},           {"retained_fraction", p.retained_fraction}};
}

json failures_json(const std::vector<QueryFailure>& failures) {
  json arr = json::array();
  for (const auto& f : failures) {
    arr.push_back({{"query_id", f.query_id}, {"reason", f.reason}});
  }
  return arr;
}

json outcome_json(const Annotation& a) {
  json j{{"metric", a.metric}, {"against", a.against}, {"rejected", a.rejected}};
  if (a.outcome) {
    j["test"] = a.outcome->test_used == stats::TestKind::kTTest ? "t-test" : "wilcoxon";
    j["statistic"] = a.outcome->statistic;
    j["p_value"] = a.outcome->p_value;
    j["normality_p"] = a.outcome->normality_p;
  } else {
    j["note"] = a.note;
  }
  return j;
}

}  // namespace

void write_metrics_json(const RunOutcome& run, const fs::path& path) {
  json j{{"name", run.name},
         {"map", run.metrics.ap.mean},
         {"ndcg", run.metrics.ndcg.mean},
         {"per_query", json::object()},
         {"failures", failures_json(run.failures)}};
  for (const auto& [qid, ap] : run.metrics.ap.per_query) {
    j["per_query"][qid] = {{"map", ap}, {"ndcg", run.metrics.ndcg.per_query.at(qid)}};
  }
  write_text(path, j.dump(2) + "\n");
}

std::string curve_file_name(RunVariant variant, std::size_t pool_size) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_k%05zu.csv", pool_size);
  return "curve_" + std::string(to_string(variant)) + buf;
}

void write_sweep(const SweepReport& report, const ExperimentConfig& config,
                 const RunMetrics& baseline) {
  const std::string variant(to_string(report.variant));
  const std::string ndcg_col = "ndcg@" + std::to_string(config.ndcg_k);
  const fs::path dir = config.output_dir;

  std::ostringstream rows;
  rows << "variant,pool_size,k_plus,k_minus,alpha,beta,retained_fraction,map,"
       << ndcg_col << ",failed_queries\n";
  for (const auto& r : report.rows) {
    const auto& p = r.point;
    rows << variant << ',' << p.pool_size << ',' << p.k_plus << ',' << p.k_minus
         << ',' << shortest(p.alpha) << ',' << shortest(p.beta) << ','
         << shortest(p.retained_fraction) << ',' << fixed(r.map) << ','
         << fixed(r.ndcg) << ',' << r.failed_queries << '\n';
  }
  write_text(dir / ("sweep_" + variant + ".csv"), rows.str());

  std::ostringstream per_query;
  per_query << "row,query_id,map," << ndcg_col << '\n';
  for (std::size_t i = 0; i < report.per_query.size(); ++i) {
    const auto& m = report.per_query[i];
    for (const auto& [qid, ap] : m.ap.per_query) {
      per_query << i << ',' << qid << ',' << fixed(ap) << ','
                << fixed(m.ndcg.per_query.at(qid)) << '\n';
    }
  }
  write_text(dir / ("sweep_" + variant + "_per_query.csv"), per_query.str());

  // Best value per (pool size, fraction) over the remaining hyperparameters.
  std::map<std::size_t, std::map<double, std::pair<double, double>>> curves;
  for (const auto& r : report.rows) {
    auto [it, fresh] = curves[r.point.pool_size].try_emplace(
        r.point.retained_fraction, r.map, r.ndcg);
    if (!fresh) {
      it->second.first = std::max(it->second.first, r.map);
      it->second.second = std::max(it->second.second, r.ndcg);
    }
  }
  for (const auto& [pool, curve] : curves) {
    std::ostringstream out;
    out << "retained_fraction,map," << ndcg_col << '\n';
    for (const auto& [f, v] : curve) {
      out << shortest(f) << ',' << fixed(v.first) << ',' << fixed(v.second) << '\n';
    }
    write_text(dir / curve_file_name(report.variant, pool), out.str());
  }

  auto best = [&](std::size_t i, const char* metric) {
    const auto& r = report.rows.at(i);
    json j{{"row", i},       {"point", point_json(r.point)},
           {"map", r.map},   {"ndcg", r.ndcg},
           {"significance", json::array()}};
    for (const auto& a : report.annotations) {
      if (a.metric == metric) j["significance"].push_back(outcome_json(a));
    }
    return j;
  };
  json summary{{"variant", variant},
               {"grid_points", report.rows.size()},
               {"rerank_scope", config.rerank == RerankMode::kPool ? "pool" : "full_corpus"},
               {"baseline", {{"map", baseline.ap.mean}, {"ndcg", baseline.ndcg.mean}}},
               {"best_by_map", best(report.best_map, "map")},
               {"best_by_ndcg", best(report.best_ndcg, "ndcg")},
               {"curves", json::array()},
               {"warnings", report.warnings},
               {"failures", failures_json(report.failures)}};
  for (const auto& [pool, _] : curves) {
    summary["curves"].push_back(curve_file_name(report.variant, pool));
  }
  write_text(dir / ("summary_" + variant + ".json"), summary.dump(2) + "\n");
}

void write_sampling(const SamplingReport& report, const ExperimentConfig& config) {
  const std::string variant(to_string(report.variant));
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"window", r.window == 0 ? json("exact") : json(r.window)},
                    {"retained_fraction", r.retained_fraction},
                    {"map", {{"mean", r.ap.mean}, {"std", r.ap.std}}},
                    {"ndcg", {{"mean", r.ndcg.mean}, {"std", r.ndcg.std}}},
                    {"trial_map", r.trial_ap},
                    {"trial_ndcg", r.trial_ndcg}});
  }
  json j{{"variant", variant},
         {"point", point_json(report.point)},
         {"trials", report.trials},
         {"seed", config.sampling ? config.sampling->seed : 0},
         {"rows", rows},
         {"failures", failures_json(report.failures)}};
  write_text(config.output_dir / ("sampling_" + variant + ".json"), j.dump(2) + "\n");
  write_text(config.output_dir / ("sampling_" + variant + ".txt"),
             format_sampling_table(report));
}

std::string format_sampling_table(const SamplingReport& report) {
  std::vector<double> fractions;
  std::vector<std::size_t> windows;
  for (const auto& r : report.rows) {
    if (std::find(fractions.begin(), fractions.end(), r.retained_fraction) == fractions.end()) {
      fractions.push_back(r.retained_fraction);
    }
    if (std::find(windows.begin(), windows.end(), r.window) == windows.end()) {
      windows.push_back(r.window);
    }
  }
  auto find_row = [&](std::size_t w, double f) -> const SamplingRow* {
    for (const auto& r : report.rows) {
      if (r.window == w && r.retained_fraction == f) return &r;
    }
    return nullptr;
  };

  std::ostringstream out;
  char buf[128];
  for (const char* metric : {"AP", "nDCG@10"}) {
    const bool ap = metric[0] == 'A';
    std::snprintf(buf, sizeof buf, "%-14s", metric);
    out << buf;
    for (double f : fractions) {
      std::snprintf(buf, sizeof buf, " %17s", ("f=" + shortest(f)).c_str());
      out << buf;
    }
    out << '\n';
    for (std::size_t w : windows) {
      const std::string label = w == 0 ? "exact bottom" : "last " + std::to_string(w);
      std::snprintf(buf, sizeof buf, "%-14s", label.c_str());
      out << buf;
      for (double f : fractions) {
        const auto* r = find_row(w, f);
        const MeanStd v = r ? (ap ? r->ap : r->ndcg) : MeanStd{};
        std::snprintf(buf, sizeof buf, " %8.4f \xC2\xB1 %.4f", v.mean, v.std);
        out << buf;
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string cell(const ComparisonTable& table, std::size_t system,
                 const std::string& metric) {
  const auto& m = table.systems[system].metrics;
  std::string text = fixed(metric == "map" ? m.ap.mean : m.ndcg.mean, 4);
  std::string letters;
  bool degenerate = false;
  for (const auto& a : table.annotations[system]) {
    if (a.metric != metric) continue;
    if (!a.outcome) {
      degenerate = true;
      continue;
    }
    if (!a.rejected) continue;
    for (std::size_t b = 0; b < table.baselines.size(); ++b) {
      if (table.baselines[b].name == a.against) {
        letters += static_cast<char>('a' + b % 26);
      }
    }
  }
  if (!letters.empty()) text += "^" + letters;
  if (degenerate) text += " (n/a)";
  return text;
}

}  // namespace

std::string format_comparison_table(const ComparisonTable& table) {
  std::size_t width = 6;
  for (const auto& b : table.baselines) width = std::max(width, b.name.size() + 4);
  for (const auto& s : table.systems) width = std::max(width, s.name.size() + 4);

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %-20s %-20s\n", static_cast<int>(width),
                "system", "MAP", "nDCG@10");
  out << buf;
  for (std::size_t b = 0; b < table.baselines.size(); ++b) {
    const auto& m = table.baselines[b].metrics;
    const std::string label =
        std::string(1, static_cast<char>('a' + b % 26)) + ") " + table.baselines[b].name;
    std::snprintf(buf, sizeof buf, "%-*s %-20s %-20s\n", static_cast<int>(width),
                  label.c_str(), fixed(m.ap.mean, 4).c_str(),
                  fixed(m.ndcg.mean, 4).c_str());
    out << buf;
  }
  for (std::size_t s = 0; s < table.systems.size(); ++s) {
    const std::string label = "   " + table.systems[s].name;
    std::snprintf(buf, sizeof buf, "%-*s %-20s %-20s\n", static_cast<int>(width),
                  label.c_str(), cell(table, s, "map").c_str(),
                  cell(table, s, "ndcg").c_str());
    out << buf;
  }
  return out.str();
}

std::string comparison_to_json(const ComparisonTable& table) {
  json j{{"baselines", json::array()}, {"systems", json::array()}};
  for (std::size_t b = 0; b < table.baselines.size(); ++b) {
    const auto& m = table.baselines[b].metrics;
    j["baselines"].push_back({{"letter", std::string(1, static_cast<char>('a' + b % 26))},
                              {"name", table.baselines[b].name},
                              {"map", m.ap.mean},
                              {"ndcg", m.ndcg.mean}});
  }
  for (std::size_t s = 0; s < table.systems.size(); ++s) {
    const auto& m = table.systems[s].metrics;
    json comparisons = json::array();
    for (const auto& a : table.annotations[s]) comparisons.push_back(outcome_json(a));
    j["systems"].push_back({{"name", table.systems[s].name},
                            {"map", m.ap.mean},
                            {"ndcg", m.ndcg.mean},
                            {"comparisons", comparisons}});
  }
  return j.dump(2) + "\n";
}

}  // namespace eclipse
