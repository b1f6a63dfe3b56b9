#include "eclipse/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RunVariant v) {
  switch (v) {
    case RunVariant::kPrfDime: return "prf_dime";
    case RunVariant::kLlmDime: return "llm_dime";
    case RunVariant::kPrfEclipse: return "prf_eclipse";
    case RunVariant::kLlmEclipse: return "llm_eclipse";
  }
  return "unknown";
}

RunVariant parse_variant(std::string_view name) {
  for (auto v : {RunVariant::kPrfDime, RunVariant::kLlmDime,
                 RunVariant::kPrfEclipse, RunVariant::kLlmEclipse}) {
    if (to_string(v) == name) return v;
  }
  throw InvalidArgument("unknown variant '" + std::string(name) +
                        "' (expected prf_dime, llm_dime, prf_eclipse or "
                        "llm_eclipse)");
}

bool is_eclipse(RunVariant v) {
  return v == RunVariant::kPrfEclipse || v == RunVariant::kLlmEclipse;
}

bool uses_llm_answer(RunVariant v) {
  return v == RunVariant::kLlmDime || v == RunVariant::kLlmEclipse;
}

std::string_view to_string(Similarity s) {
  return s == Similarity::kCosine ? "cosine" : "inner_product";
}

Similarity parse_similarity(std::string_view name) {
  if (name == "inner_product") return Similarity::kInnerProduct;
  if (name == "cosine") return Similarity::kCosine;
  throw InvalidArgument("unknown similarity '" + std::string(name) + "'");
}

std::vector<double> tenths() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.alpha = tenths();
  c.beta = tenths();
  for (std::size_t k = 2; k <= 14; ++k) c.k_plus.push_back(k);
  for (std::size_t k = 2; k <= 6; ++k) c.k_minus.push_back(k);
  c.retained_fraction = tenths();
  return c;
}

namespace {

template <typename T>
void dedupe(std::vector<T>& grid, std::string_view name,
            std::vector<std::string>& warnings) {
  const std::size_t before = grid.size();
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() != before) {
    warnings.push_back("grid '" + std::string(name) + "' had " +
                       std::to_string(before - grid.size()) +
                       " duplicate value(s); deduplicated");
  }
}

template <typename T>
void require_non_empty(const std::vector<T>& grid, std::string_view name) {
  if (grid.empty()) {
    throw InvalidArgument("grid '" + std::string(name) + "' is empty");
  }
}

template <typename T>
std::vector<T> read_grid(const json& j, const char* key,
                         std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

void ExperimentConfig::normalize() {
  dedupe(alpha, "alpha", warnings);
  dedupe(beta, "beta", warnings);
  dedupe(k_plus, "k_plus", warnings);
  dedupe(k_minus, "k_minus", warnings);
  dedupe(retained_fraction, "retained_fraction", warnings);
  dedupe(pool_size, "pool_size", warnings);
  if (sampling) dedupe(sampling->windows, "sampling.window", warnings);
}

void ExperimentConfig::validate(bool check_paths) const {
  require_non_empty(alpha, "alpha");
  require_non_empty(beta, "beta");
  require_non_empty(k_plus, "k_plus");
  require_non_empty(k_minus, "k_minus");
  require_non_empty(retained_fraction, "retained_fraction");
  require_non_empty(pool_size, "pool_size");
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InvalidArgument("alpha values must be positive");
    }
  }
  for (double b : beta) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw InvalidArgument("beta values must be non-negative");
    }
  }
  for (double f : retained_fraction) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw InvalidArgument("retained fractions must lie in (0, 1]");
    }
  }
  auto positive = [](const std::vector<std::size_t>& g, const char* name) {
    for (auto v : g) {
      if (v == 0) throw InvalidArgument(std::string(name) + " values must be >= 1");
    }
  };
  positive(k_plus, "k_plus");
  positive(k_minus, "k_minus");
  positive(pool_size, "pool_size");
  if (dime_k_plus == 0) throw InvalidArgument("dime_k_plus must be >= 1");
  if (depth == 0) throw InvalidArgument("depth must be >= 1");
  if (ndcg_k == 0) throw InvalidArgument("ndcg_k must be >= 1");
  if (!(significance_alpha > 0.0 && significance_alpha < 1.0)) {
    throw InvalidArgument("significance_alpha must lie in (0, 1)");
  }
  if (run_tag.empty() ||
      run_tag.find_first_of(" \t\r\n") != std::string::npos) {
    throw InvalidArgument("run_tag must be a single non-empty token");
  }
  if (sampling) {
    require_non_empty(sampling->windows, "sampling.window");
    if (sampling->trials < 2) {
      throw InvalidArgument("sampling.trials must be >= 2");
    }
  }
  if (check_paths) {
    auto must_exist = [](const fs::path& p, const char* what) {
      if (p.empty()) throw InvalidArgument(std::string(what) + " path is not set");
      if (!fs::exists(p)) {
        throw InvalidArgument(std::string(what) + " does not exist: " + p.string());
      }
    };
    must_exist(queries, "queries");
    must_exist(corpus, "corpus");
    must_exist(qrels, "qrels");
    if (answers) must_exist(*answers, "answers");
  }
}

ExperimentConfig config_from_json(std::string_view json_text,
                                  const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");

  static const std::vector<std::string> known = {
      "queries", "corpus", "qrels", "answers", "output_dir", "similarity",
      "alpha", "beta", "k_plus", "k_minus", "dime_k_plus",
      "retained_fraction", "pool_size", "rerank_scope", "depth", "ndcg_k",
      "relevance_threshold", "significance_alpha", "sampling", "run_tag",
      "threads"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }

  ExperimentConfig c = ExperimentConfig::defaults();
  try {
    auto path_of = [&](const char* key) {
      return resolve(fs::path(j.at(key).get<std::string>()), base_dir);
    };
    if (j.contains("queries")) c.queries = path_of("queries");
    if (j.contains("corpus")) c.corpus = path_of("corpus");
    if (j.contains("qrels")) c.qrels = path_of("qrels");
    if (j.contains("answers") && !j.at("answers").is_null()) {
      c.answers = path_of("answers");
    }
    if (j.contains("output_dir")) c.output_dir = path_of("output_dir");
    if (j.contains("similarity")) {
      c.similarity = parse_similarity(j.at("similarity").get<std::string>());
    }
    c.alpha = read_grid<double>(j, "alpha", c.alpha);
    c.beta = read_grid<double>(j, "beta", c.beta);
    c.k_plus = read_grid<std::size_t>(j, "k_plus", c.k_plus);
    c.k_minus = read_grid<std::size_t>(j, "k_minus", c.k_minus);
    c.retained_fraction =
        read_grid<double>(j, "retained_fraction", c.retained_fraction);
    c.pool_size = read_grid<std::size_t>(j, "pool_size", c.pool_size);
    c.dime_k_plus = j.value("dime_k_plus", c.dime_k_plus);
    if (j.contains("rerank_scope")) {
      const auto scope = j.at("rerank_scope").get<std::string>();
      if (scope == "full_corpus") {
        c.rerank = RerankMode::kFullCorpus;
      } else if (scope == "pool") {
        c.rerank = RerankMode::kPool;
      } else {
        throw InvalidArgument("rerank_scope must be 'full_corpus' or 'pool'");
      }
    }
    c.depth = j.value("depth", c.depth);
    c.ndcg_k = j.value("ndcg_k", c.ndcg_k);
    c.relevance_threshold = j.value("relevance_threshold", c.relevance_threshold);
    c.significance_alpha = j.value("significance_alpha", c.significance_alpha);
    c.run_tag = j.value("run_tag", c.run_tag);
    c.threads = j.value("threads", c.threads);
    if (j.contains("sampling") && !j.at("sampling").is_null()) {
      const auto& s = j.at("sampling");
      SamplingConfig sc;
      sc.windows = read_grid<std::size_t>(s, "window", sc.windows);
      sc.trials = s.value("trials", sc.trials);
      sc.seed = s.value("seed", sc.seed);
      c.sampling = sc;
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config field has the wrong type: ") +
                          e.what());
  }
  c.normalize();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str(), path.parent_path());
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["queries"] = c.queries.string();
  j["corpus"] = c.corpus.string();
  j["qrels"] = c.qrels.string();
  j["answers"] = c.answers ? json(c.answers->string()) : json(nullptr);
  j["output_dir"] = c.output_dir.string();
  j["similarity"] = std::string(to_string(c.similarity));
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["k_plus"] = c.k_plus;
  j["k_minus"] = c.k_minus;
  j["dime_k_plus"] = c.dime_k_plus;
  j["retained_fraction"] = c.retained_fraction;
  j["pool_size"] = c.pool_size;
  j["rerank_scope"] = c.rerank == RerankMode::kPool ? "pool" : "full_corpus";
  j["depth"] = c.depth;
  j["ndcg_k"] = c.ndcg_k;
  j["relevance_threshold"] = c.relevance_threshold;
  j["significance_alpha"] = c.significance_alpha;
  j["run_tag"] = c.run_tag;
  j["threads"] = c.threads;
  if (c.sampling) {
    j["sampling"] = {{"window", c.sampling->windows},
                     {"trials", c.sampling->trials},
                     {"seed", c.sampling->seed}};
  } else {
    j["sampling"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace eclipse
