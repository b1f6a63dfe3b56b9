// Command-line front end: synthetic data, runs, sweeps, evaluation and
// significance tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eclipse/config.hpp"
#include "eclipse/errors.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/reports.hpp"
#include "eclipse/runner.hpp"
#include "eclipse/synthgen.hpp"
#include "eclipse/trec_io.hpp"

namespace fs = std::filesystem;
using namespace eclipse;

namespace {

struct Overrides {
  std::string variant = "prf_eclipse";
  std::optional<std::size_t> pool_size, k_plus, k_minus;
  std::optional<double> alpha, beta, fraction;
  std::optional<unsigned> threads;
  std::optional<std::string> output_dir;
};

void add_config_options(CLI::App* cmd, std::string& config, Overrides& o) {
  cmd->add_option("-c,--config", config, "experiment config (JSON)")->required();
  cmd->add_option("--threads", o.threads, "worker threads (overrides config)");
  cmd->add_option("-o,--output-dir", o.output_dir, "output directory (overrides config)");
}

Experiment make_experiment(const std::string& path, const Overrides& o) {
  auto config = load_config(path);
  if (o.threads) config.threads = *o.threads;
  if (o.output_dir) config.output_dir = *o.output_dir;
  for (const auto& w : config.warnings) std::cerr << "warning: " << w << '\n';
  auto data = load_dataset(config);
  return Experiment(std::move(config), std::move(data));
}

void print_failures(const std::vector<QueryFailure>& failures) {
  for (const auto& f : failures) {
    std::cerr << "query " << f.query_id << " skipped: " << f.reason << '\n';
  }
}

int status_code(bool partial) {
  return static_cast<int>(partial ? ExitStatus::kPartialFailure : ExitStatus::kOk);
}

void print_metrics(const std::string& name, const RunMetrics& m) {
  std::printf("%s\tmap=%.6f\tndcg=%.6f\tqueries=%zu\n", name.c_str(), m.ap.mean,
              m.ndcg.mean, m.ap.per_query.size());
}

// "name=path" or plain path (name = file stem).
std::pair<std::string, fs::path> named_path(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos) return {fs::path(arg).stem().string(), arg};
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

int cmd_synth(const synth::SynthSpec& spec, const fs::path& out,
              const std::string& format, unsigned threads) {
  const auto corpus = synth::generate(spec, threads);
  fs::create_directories(out);
  const std::string ext = format == "jsonl" ? ".jsonl" : ".emb";
  save_matrix(corpus.queries, out / ("queries" + ext));
  save_matrix(corpus.corpus, out / ("corpus" + ext));
  write_qrels(corpus.qrels, out / "qrels.txt");

  nlohmann::json planted = nlohmann::json::object();
  for (const auto& [qid, dims] : corpus.planted) planted[qid] = dims;
  std::ofstream(out / "planted.json") << planted.dump(1) << '\n';

  auto config = ExperimentConfig::defaults();
  config.queries = "queries" + ext;
  config.corpus = "corpus" + ext;
  config.qrels = "qrels.txt";
  config.output_dir = "runs";
  // Desk-scale grid; the full default grid is tens of thousands of points.
  config.k_plus = {1, 2, 4};
  config.k_minus = {2, 4};
  config.alpha = {1.0};
  config.beta = {0.5, 1.0};
  config.sampling = SamplingConfig{};
  std::ofstream(out / "config.json") << config_to_json(config) << '\n';

  std::printf("wrote %zu queries, %zu documents (d=%zu) to %s\n",
              corpus.queries.size(), corpus.corpus.size(), spec.dim,
              out.string().c_str());
  return 0;
}

GridPoint point_from(const Experiment& exp, RunVariant variant, const Overrides& o) {
  auto p = first_point(exp.config(), variant);
  if (o.pool_size) p.pool_size = *o.pool_size;
  if (o.k_plus) p.k_plus = *o.k_plus;
  if (o.k_minus) p.k_minus = *o.k_minus;
  if (o.alpha) p.alpha = *o.alpha;
  if (o.beta) p.beta = *o.beta;
  if (o.fraction) p.retained_fraction = *o.fraction;
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimension-importance re-ranking for dense retrieval"};
  app.require_subcommand(1);

  synth::SynthSpec spec;
  std::string synth_out = "synth", synth_format = "binary";
  unsigned synth_threads = 1;
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted-subspace corpus");
  synth_cmd->add_option("-o,--out", synth_out, "output directory");
  synth_cmd->add_option("--dim", spec.dim);
  synth_cmd->add_option("--planted", spec.planted_size, "planted dimensions per query");
  synth_cmd->add_option("--queries", spec.queries);
  synth_cmd->add_option("--relevant", spec.relevant_per_query);
  synth_cmd->add_option("--irrelevant", spec.irrelevant_per_query);
  synth_cmd->add_option("--sigma", spec.noise_sigma);
  synth_cmd->add_option("--mean", spec.signal_mean);
  synth_cmd->add_option("--seed", spec.seed);
  synth_cmd->add_option("--format", synth_format)->check(CLI::IsMember({"binary", "jsonl"}));
  synth_cmd->add_option("--threads", synth_threads);

  std::string config_path;
  Overrides o;
  auto* search_cmd = app.add_subcommand("search", "full-dimensional baseline run");
  add_config_options(search_cmd, config_path, o);

  auto* dime_cmd = app.add_subcommand("dime-run", "one masked run at a single grid point");
  add_config_options(dime_cmd, config_path, o);
  dime_cmd->add_option("--variant", o.variant)
      ->check(CLI::IsMember({"prf_dime", "llm_dime", "prf_eclipse", "llm_eclipse"}));
  dime_cmd->add_option("--pool-size", o.pool_size);
  dime_cmd->add_option("--k-plus", o.k_plus);
  dime_cmd->add_option("--k-minus", o.k_minus);
  dime_cmd->add_option("--alpha", o.alpha);
  dime_cmd->add_option("--beta", o.beta);
  dime_cmd->add_option("--fraction", o.fraction, "retained fraction");

  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate every grid point of a variant");
  add_config_options(sweep_cmd, config_path, o);
  sweep_cmd->add_option("--variant", o.variant)
      ->check(CLI::IsMember({"prf_dime", "llm_dime", "prf_eclipse", "llm_eclipse"}));

  auto* sample_cmd = app.add_subcommand("sample-bottom", "random moon from the pool tail");
  add_config_options(sample_cmd, config_path, o);
  sample_cmd->add_option("--variant", o.variant)
      ->check(CLI::IsMember({"prf_eclipse", "llm_eclipse"}));

  std::string run_path, qrels_path;
  std::size_t ndcg_k = 10;
  int threshold = 2;
  auto* eval_cmd = app.add_subcommand("eval", "AP and nDCG of a run file");
  eval_cmd->add_option("--run", run_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--qrels", qrels_path)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", ndcg_k, "nDCG depth");
  eval_cmd->add_option("--threshold", threshold, "minimum grade counted relevant by AP");
  bool per_query = false;
  eval_cmd->add_flag("--per-query", per_query);

  std::vector<std::string> baselines, systems;
  double alpha = 0.05;
  std::string json_out;
  auto* compare_cmd = app.add_subcommand("compare", "significance table of run files");
  compare_cmd->add_option("--qrels", qrels_path)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("-b,--baseline", baselines, "name=run (lettered a, b, ...)")
      ->required();
  compare_cmd->add_option("-s,--system", systems, "name=run")->required();
  compare_cmd->add_option("--alpha", alpha);
  compare_cmd->add_option("--k", ndcg_k);
  compare_cmd->add_option("--threshold", threshold);
  compare_cmd->add_option("--json", json_out, "also write the table as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) return cmd_synth(spec, synth_out, synth_format, synth_threads);

    if (*search_cmd) {
      auto exp = make_experiment(config_path, o);
      const auto run = exp.run_baseline();
      print_metrics(run.name, run.metrics);
      return 0;
    }
    if (*dime_cmd) {
      auto exp = make_experiment(config_path, o);
      const auto variant = parse_variant(o.variant);
      const auto run = exp.run_dime(variant, point_from(exp, variant, o));
      print_failures(run.failures);
      print_metrics(run.name, run.metrics);
      return static_cast<int>(run.status());
    }
    if (*sweep_cmd) {
      auto exp = make_experiment(config_path, o);
      const auto report = exp.sweep(parse_variant(o.variant));
      print_failures(report.failures);
      const auto& bm = report.rows[report.best_map];
      const auto& bn = report.rows[report.best_ndcg];
      std::printf("%zu grid points\nbest map  %.6f  (%s)\nbest ndcg %.6f  (%s)\n",
                  report.rows.size(), bm.map,
                  exp.run_name(report.variant, bm.point).c_str(), bn.ndcg,
                  exp.run_name(report.variant, bn.point).c_str());
      return status_code(!report.failures.empty());
    }
    if (*sample_cmd) {
      auto exp = make_experiment(config_path, o);
      const auto report = exp.sample_bottom(parse_variant(o.variant));
      print_failures(report.failures);
      std::cout << format_sampling_table(report);
      return status_code(!report.failures.empty());
    }
    if (*eval_cmd) {
      const auto qrels = parse_qrels(qrels_path);
      const auto m = evaluate_run(parse_run(run_path), qrels, ndcg_k, threshold);
      if (per_query) {
        for (const auto& [qid, ap] : m.ap.per_query) {
          std::printf("%s\tmap=%.6f\tndcg=%.6f\n", qid.c_str(), ap,
                      m.ndcg.per_query.at(qid));
        }
      }
      print_metrics("all", m);
      return 0;
    }
    if (*compare_cmd) {
      const auto qrels = parse_qrels(qrels_path);
      auto load = [&](const std::vector<std::string>& args) {
        std::vector<NamedMetrics> out;
        for (const auto& a : args) {
          auto [name, path] = named_path(a);
          out.push_back({name, evaluate_run(parse_run(path), qrels, ndcg_k, threshold)});
        }
        return out;
      };
      const auto table = compare(load(baselines), load(systems), alpha);
      std::cout << format_comparison_table(table);
      if (!json_out.empty()) std::ofstream(json_out) << comparison_to_json(table);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::kValidationError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::kValidationError);
  }
  return 0;
}
