#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "eclipse/config.hpp"
#include "eclipse/dime.hpp"
#include "eclipse/embedding_store.hpp"
#include "eclipse/errors.hpp"
#include "eclipse/metrics.hpp"
#include "eclipse/retrieval.hpp"
#include "eclipse/runner.hpp"
#include "eclipse/stats.hpp"
#include "eclipse/synthgen.hpp"
#include "eclipse/trec_io.hpp"

namespace py = pybind11;
using namespace eclipse;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Embedding to_embedding(const FloatArray& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-d vector");
  return Embedding(std::vector<float>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(std::span<const double> v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<float> matrix_values(const EmbeddingMatrix& m) {
  py::array_t<float> out({static_cast<py::ssize_t>(m.size()),
                          static_cast<py::ssize_t>(m.dim())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

Similarity similarity_of(const std::string& name) { return parse_similarity(name); }

py::dict qrels_to_dict(const Qrels& q) {
  py::dict out;
  for (const auto& qid : q.query_ids()) {
    py::dict docs;
    for (const auto& [doc, grade] : *q.judged(qid)) docs[py::str(doc)] = grade;
    out[py::str(qid)] = docs;
  }
  return out;
}

py::dict metrics_to_dict(const RunMetrics& m) {
  py::dict out;
  out["map"] = m.ap.mean;
  out["ndcg"] = m.ndcg.mean;
  out["ap_per_query"] = m.ap.per_query;
  out["ndcg_per_query"] = m.ndcg.per_query;
  out["undefined_ap"] = m.ap.undefined_queries;
  return out;
}

MetricResult metric_from(const std::map<std::string, double>& per_query) {
  MetricResult r;
  r.per_query = per_query;
  r.mean = mean_of(per_query);
  return r;
}

py::list failures_to_list(const std::vector<QueryFailure>& failures) {
  py::list out;
  for (const auto& f : failures) out.append(py::make_tuple(f.query_id, f.reason));
  return out;
}

py::dict outcome_to_dict(const RunOutcome& r) {
  py::dict out = metrics_to_dict(r.metrics);
  out["name"] = r.name;
  out["run_file"] = r.run_file.string();
  out["failures"] = failures_to_list(r.failures);
  return out;
}

py::dict point_to_dict(const GridPoint& p) {
  py::dict out;
  out["pool_size"] = p.pool_size;
  out["k_plus"] = p.k_plus;
  out["k_minus"] = p.k_minus;
  out["alpha"] = p.alpha;
  out["beta"] = p.beta;
  out["retained_fraction"] = p.retained_fraction;
  return out;
}

py::object json_loads(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

// Python-side exception types, created in the module init below.
PyObject* eclipse_error = nullptr;
PyObject* degenerate_error = nullptr;
PyObject* parse_error = nullptr;

void translate(std::exception_ptr p) {
  try {
    if (p) std::rethrow_exception(p);
  } catch (const ParseError& e) {
    py::object err = py::reinterpret_borrow<py::object>(parse_error)(e.what());
    err.attr("kind") = std::string(to_string(e.kind()));
    err.attr("line") = e.line();
    err.attr("path") = e.path();
    PyErr_SetObject(parse_error, err.ptr());
  } catch (const InvalidArgument& e) {
    PyErr_SetString(PyExc_ValueError, e.what());
  } catch (const IoError& e) {
    PyErr_SetString(PyExc_OSError, e.what());
  } catch (const DegenerateInput& e) {
    PyErr_SetString(degenerate_error, e.what());
  } catch (const Error& e) {
    PyErr_SetString(eclipse_error, e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dense retrieval with dimension-importance masking";

  eclipse_error = PyErr_NewException("eclipse_ir.EclipseError", PyExc_RuntimeError, nullptr);
  degenerate_error =
      PyErr_NewException("eclipse_ir.DegenerateInputError", eclipse_error, nullptr);
  parse_error = PyErr_NewException("eclipse_ir.ParseError", eclipse_error, nullptr);
  m.attr("EclipseError") = py::handle(eclipse_error);
  m.attr("DegenerateInputError") = py::handle(degenerate_error);
  m.attr("ParseError") = py::handle(parse_error);
  py::register_exception_translator(&translate);

  py::class_<EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def(py::init([](std::vector<std::string> ids, const FloatArray& values) {
             if (values.ndim() != 2) throw InvalidArgument("expected an (n, d) array");
             const auto d = static_cast<std::size_t>(values.shape(1));
             return EmbeddingMatrix(std::move(ids), d,
                                    std::vector<float>(values.data(),
                                                       values.data() + values.size()));
           }),
           py::arg("ids"), py::arg("values"))
      .def_property_readonly("ids", &EmbeddingMatrix::ids)
      .def_property_readonly("dim", &EmbeddingMatrix::dim)
      .def_property_readonly("values", &matrix_values)
      .def("index_of", &EmbeddingMatrix::index_of)
      .def("__len__", &EmbeddingMatrix::size)
      .def("__eq__", [](const EmbeddingMatrix& a, const EmbeddingMatrix& b) { return a == b; });

  m.def("load_matrix", [](const std::filesystem::path& p) { return load_matrix(p); },
        py::arg("path"), "Reads EMB1 (+ .ids sidecar) or .jsonl by extension.");
  m.def("save_matrix",
        [](const EmbeddingMatrix& mat, const std::filesystem::path& p) { save_matrix(mat, p); },
        py::arg("matrix"), py::arg("path"));

  py::class_<DimensionMask>(m, "DimensionMask")
      .def(py::init<std::vector<std::uint32_t>, std::size_t>(), py::arg("selected"),
           py::arg("dim"))
      .def_property_readonly("selected", [](const DimensionMask& d) {
        return std::vector<std::uint32_t>(d.selected().begin(), d.selected().end());
      })
      .def_property_readonly("dim", &DimensionMask::dim)
      .def("__len__", &DimensionMask::size)
      .def("__contains__", &DimensionMask::contains)
      .def("__eq__", [](const DimensionMask& a, const DimensionMask& b) { return a == b; });

  py::class_<CandidatePool>(m, "CandidatePool")
      .def_readonly("query_id", &CandidatePool::query_id)
      .def_property_readonly("entries",
                             [](const CandidatePool& p) {
                               py::list out;
                               for (const auto& e : p.entries) {
                                 out.append(py::make_tuple(e.doc_id, e.score));
                               }
                               return out;
                             })
      .def_property_readonly("doc_ids",
                             [](const CandidatePool& p) {
                               std::vector<std::string> ids;
                               for (const auto& e : p.entries) ids.push_back(e.doc_id);
                               return ids;
                             })
      .def("__len__", &CandidatePool::size);

  m.def(
      "top_k",
      [](const FloatArray& q, const EmbeddingMatrix& corpus, std::size_t k,
         const std::string& similarity, std::optional<DimensionMask> mask,
         std::string query_id, unsigned threads) {
        const auto e = to_embedding(q);
        py::gil_scoped_release release;
        return top_k(e, corpus, k, similarity_of(similarity), mask, std::move(query_id),
                     threads);
      },
      py::arg("query"), py::arg("corpus"), py::arg("k"), py::arg("similarity") = "inner_product",
      py::arg("mask") = py::none(), py::arg("query_id") = "", py::arg("threads") = 1);

  m.def(
      "rerank",
      [](const FloatArray& q, const EmbeddingMatrix& corpus, const DimensionMask& mask,
         std::size_t depth, const std::string& similarity, const CandidatePool* pool,
         std::string query_id) {
        RerankScope scope = FullCorpus{};
        if (pool) scope = pool;
        return rerank(to_embedding(q), corpus, mask, similarity_of(similarity), depth, scope,
                      std::move(query_id));
      },
      py::arg("query"), py::arg("corpus"), py::arg("mask"), py::arg("depth"),
      py::arg("similarity") = "inner_product", py::arg("pool") = nullptr, py::arg("query_id") = "");

  m.def(
      "dime_score_standard",
      [](const FloatArray& q, const FloatArray& s) {
        return to_array(dime_score_standard(to_embedding(q), to_embedding(s)).scores());
      },
      py::arg("query"), py::arg("sun"));
  m.def(
      "eclipse_score",
      [](const FloatArray& q, const FloatArray& s, const FloatArray& moon, double alpha,
         double beta) {
        return to_array(
            eclipse_score(to_embedding(q), to_embedding(s), to_embedding(moon), alpha, beta)
                .scores());
      },
      py::arg("query"), py::arg("sun"), py::arg("moon"), py::arg("alpha") = 1.0,
      py::arg("beta") = 1.0);
  m.def(
      "select_dimensions",
      [](const DoubleArray& u, double fraction) {
        return select_dimensions(
            DimensionImportance(std::vector<double>(u.data(), u.data() + u.size())), fraction);
      },
      py::arg("importance"), py::arg("retained_fraction"));
  m.def("retained_count", &retained_count, py::arg("retained_fraction"), py::arg("dim"));

  m.def("parse_qrels", [](const std::filesystem::path& p) { return qrels_to_dict(parse_qrels(p)); },
        py::arg("path"), "Returns {query_id: {doc_id: grade}}.");
  m.def(
      "parse_run",
      [](const std::filesystem::path& p) {
        py::list out;
        for (const auto& e : parse_run(p)) {
          out.append(py::make_tuple(e.query_id, e.doc_id, e.rank, e.score, e.tag));
        }
        return out;
      },
      py::arg("path"), "Returns (query_id, doc_id, rank, score, tag) tuples.");
  m.def(
      "write_run",
      [](const std::vector<std::tuple<std::string, std::string, std::size_t, double,
                                      std::string>>& rows,
         const std::filesystem::path& p) {
        std::vector<RunEntry> entries;
        for (const auto& [q, d, r, s, t] : rows) entries.push_back({q, d, r, s, t});
        write_run(entries, p);
      },
      py::arg("entries"), py::arg("path"));
  m.def(
      "evaluate_run",
      [](const std::filesystem::path& run, const std::filesystem::path& qrels, std::size_t k,
         int threshold) {
        return metrics_to_dict(evaluate_run(parse_run(run), parse_qrels(qrels), k, threshold));
      },
      py::arg("run"), py::arg("qrels"), py::arg("k") = kDefaultNdcgDepth,
      py::arg("threshold") = kDefaultRelevanceThreshold);

  py::class_<stats::TestOutcome>(m, "TestOutcome")
      .def_readonly("statistic", &stats::TestOutcome::statistic)
      .def_readonly("p_value", &stats::TestOutcome::p_value)
      .def_readonly("significant", &stats::TestOutcome::significant)
      .def_readonly("normality_p", &stats::TestOutcome::normality_p)
      .def_property_readonly("test", [](const stats::TestOutcome& t) {
        return t.test_used == stats::TestKind::kTTest ? "t-test" : "wilcoxon";
      });

  auto alternative_of = [](const std::string& s) {
    if (s == "greater") return stats::Alternative::kGreater;
    if (s == "two-sided") return stats::Alternative::kTwoSided;
    throw InvalidArgument("alternative must be 'greater' or 'two-sided', got " + s);
  };
  m.def(
      "shapiro_wilk",
      [](const DoubleArray& x) {
        const auto r = stats::shapiro_wilk({x.data(), static_cast<std::size_t>(x.size())});
        return py::make_tuple(r.w, r.p);
      },
      py::arg("sample"), "Returns (W, p).");
  m.def(
      "paired_t_test",
      [alternative_of](std::vector<double> a, std::vector<double> b,
                       const std::string& alternative) {
        return stats::paired_t_test(stats::PairedSample(std::move(a), std::move(b)),
                                    alternative_of(alternative));
      },
      py::arg("a"), py::arg("b"), py::arg("alternative") = "greater");
  m.def(
      "wilcoxon_signed_rank",
      [](const DoubleArray& d) {
        return stats::wilcoxon_signed_rank(
            std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
      },
      py::arg("differences"));
  m.def(
      "holm_bonferroni",
      [](const std::vector<double>& p, double alpha) { return stats::holm_bonferroni(p, alpha); },
      py::arg("p_values"), py::arg("alpha") = 0.05);
  m.def(
      "compare_systems",
      [](const std::map<std::string, double>& baseline,
         const std::map<std::string, double>& treatment, double alpha) {
        return stats::compare_systems(metric_from(baseline), metric_from(treatment), alpha);
      },
      py::arg("baseline"), py::arg("treatment"), py::arg("alpha") = 0.05,
      "Per-query values keyed by query id.");

  m.def(
      "synth_generate",
      [](std::size_t dim, std::size_t planted, std::size_t queries, std::size_t relevant,
         std::size_t irrelevant, double sigma, double mean, std::uint64_t seed,
         unsigned threads) {
        synth::SynthSpec s;
        s.dim = dim;
        s.planted_size = planted;
        s.queries = queries;
        s.relevant_per_query = relevant;
        s.irrelevant_per_query = irrelevant;
        s.noise_sigma = sigma;
        s.signal_mean = mean;
        s.seed = seed;
        auto g = synth::generate(s, threads);
        py::dict out;
        out["queries"] = std::move(g.queries);
        out["corpus"] = std::move(g.corpus);
        out["qrels"] = qrels_to_dict(g.qrels);
        out["planted"] = g.planted;
        return out;
      },
      py::arg("dim") = 128, py::arg("planted") = 16, py::arg("queries") = 50,
      py::arg("relevant") = 10, py::arg("irrelevant") = 490, py::arg("sigma") = 0.05,
      py::arg("mean") = 1.0, py::arg("seed") = 7, py::arg("threads") = 1);

  m.def(
      "load_config",
      [](const std::filesystem::path& p) { return json_loads(config_to_json(load_config(p))); },
      py::arg("path"), "Parsed config with defaults filled in, as a dict.");

  py::class_<Experiment>(m, "Experiment")
      .def(py::init([](const std::filesystem::path& config_path,
                       std::optional<std::filesystem::path> output_dir,
                       std::optional<unsigned> threads) {
             auto c = load_config(config_path);
             if (output_dir) c.output_dir = *output_dir;
             if (threads) c.threads = *threads;
             c.validate();
             auto data = load_dataset(c);
             return Experiment(std::move(c), std::move(data));
           }),
           py::arg("config"), py::arg("output_dir") = py::none(), py::arg("threads") = py::none())
      .def("run_baseline", [](Experiment& e, bool write) { return outcome_to_dict(e.run_baseline(write)); },
           py::arg("write_files") = true)
      .def(
          "run_dime",
          [](Experiment& e, const std::string& variant, std::size_t pool_size,
             std::size_t k_plus, std::size_t k_minus, double alpha, double beta,
             double fraction, bool write) {
            const GridPoint p{pool_size, k_plus, k_minus, alpha, beta, fraction};
            return outcome_to_dict(e.run_dime(parse_variant(variant), p, write));
          },
          py::arg("variant"), py::arg("pool_size"), py::arg("k_plus"), py::arg("k_minus"),
          py::arg("alpha"), py::arg("beta"), py::arg("retained_fraction"),
          py::arg("write_files") = true)
      .def(
          "sweep",
          [](Experiment& e, const std::string& variant, bool write) {
            const auto r = e.sweep(parse_variant(variant), write);
            py::list rows;
            for (const auto& row : r.rows) {
              py::dict d = point_to_dict(row.point);
              d["map"] = row.map;
              d["ndcg"] = row.ndcg;
              d["failed_queries"] = row.failed_queries;
              rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["best_map"] = r.best_map;
            out["best_ndcg"] = r.best_ndcg;
            out["warnings"] = r.warnings;
            out["failures"] = failures_to_list(r.failures);
            return out;
          },
          py::arg("variant") = "prf_eclipse", py::arg("write_files") = true)
      .def(
          "sample_bottom",
          [](Experiment& e, const std::string& variant, bool write) {
            const auto r = e.sample_bottom(parse_variant(variant), write);
            py::list rows;
            for (const auto& row : r.rows) {
              py::dict d;
              d["window"] = row.window;
              d["retained_fraction"] = row.retained_fraction;
              d["ap_mean"] = row.ap.mean;
              d["ap_std"] = row.ap.std;
              d["ndcg_mean"] = row.ndcg.mean;
              d["ndcg_std"] = row.ndcg.std;
              rows.append(d);
            }
            py::dict out;
            out["point"] = point_to_dict(r.point);
            out["trials"] = r.trials;
            out["rows"] = rows;
            return out;
          },
          py::arg("variant") = "prf_eclipse", py::arg("write_files") = true);
}
