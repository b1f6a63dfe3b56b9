#include "eclipse/dime.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace {

void check_same_dim(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a.dim()) +
                          " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

void DimeConfig::validate() const {
  if (pool_size == 0) throw InvalidArgument("pool_size must be >= 1");
  if (k_minus == 0 || k_minus >= pool_size) {
    throw InvalidArgument("k_minus must satisfy 0 < k_minus < pool_size (" +
                          std::to_string(k_minus) + ", " +
                          std::to_string(pool_size) + ")");
  }
  if (variant == DimeVariant::kPrf &&
      (k_plus == 0 || k_plus >= pool_size - k_minus)) {
    throw InvalidArgument(
        "k_plus must satisfy 0 < k_plus < pool_size - k_minus (" +
        std::to_string(k_plus) + ", " + std::to_string(pool_size) + ", " +
        std::to_string(k_minus) + ")");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("alpha must be positive");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("beta must be non-negative");
  }
  if (!(retained_fraction > 0.0 && retained_fraction <= 1.0)) {
    throw InvalidArgument("retained_fraction must lie in (0, 1]");
  }
}

DimensionImportance::DimensionImportance(std::vector<double> scores)
    : scores_(std::move(scores)) {
  for (double v : scores_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("dimension importance must be finite");
    }
  }
}

Embedding pool_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                        std::span<const std::size_t> positions) {
  if (positions.empty()) throw InvalidArgument("centroid of zero documents");
  std::vector<double> sum(corpus.dim(), 0.0);
  for (std::size_t pos : positions) {
    if (pos >= pool.size()) {
      throw InvalidArgument("pool position " + std::to_string(pos) +
                            " beyond pool of size " +
                            std::to_string(pool.size()));
    }
    const auto row = corpus.row(corpus.index_of(pool.entries[pos].doc_id));
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += row[i];
  }
  const double n = static_cast<double>(positions.size());
  std::vector<float> mean(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    mean[i] = static_cast<float>(sum[i] / n);
  }
  return Embedding(std::move(mean));
}

Embedding prf_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                       std::size_t k_plus) {
  if (k_plus == 0) throw InvalidArgument("k_plus must be >= 1");
  if (pool.size() < k_plus) {
    throw InvalidArgument("pool of size " + std::to_string(pool.size()) +
                          " is shorter than k_plus=" + std::to_string(k_plus));
  }
  std::vector<std::size_t> top(k_plus);
  std::iota(top.begin(), top.end(), std::size_t{0});
  return pool_centroid(pool, corpus, top);
}

Embedding moon_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                        std::size_t k_minus) {
  if (k_minus == 0) throw InvalidArgument("k_minus must be >= 1");
  if (pool.size() < k_minus) {
    throw InvalidArgument("pool of size " + std::to_string(pool.size()) +
                          " is shorter than k_minus=" +
                          std::to_string(k_minus));
  }
  std::vector<std::size_t> bottom(k_minus);
  for (std::size_t i = 0; i < k_minus; ++i) bottom[i] = pool.size() - 1 - i;
  return pool_centroid(pool, corpus, bottom);
}

DimensionImportance dime_score_standard(const Embedding& q,
                                        const Embedding& s) {
  check_same_dim(q, s);
  std::vector<double> u(q.dim());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = static_cast<double>(q[i]) * static_cast<double>(s[i]);
  }
  return DimensionImportance(std::move(u));
}

DimensionImportance eclipse_score(const Embedding& q, const Embedding& s,
                                  const Embedding& m, double alpha,
                                  double beta) {
  check_same_dim(q, s);
  check_same_dim(q, m);
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be non-negative");
  std::vector<double> u(q.dim());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double qi = q[i];
    u[i] = alpha * (qi * s[i]) - beta * (qi * m[i]);
  }
  return DimensionImportance(std::move(u));
}

std::size_t retained_count(double retained_fraction, std::size_t dim) {
  if (!(retained_fraction > 0.0 && retained_fraction <= 1.0)) {
    throw InvalidArgument("retained_fraction must lie in (0, 1]");
  }
  // The epsilon keeps products such as 0.35 * 10 = 3.4999999999999996 on the
  // intended side of the half-up boundary.
  const double exact = retained_fraction * static_cast<double>(dim);
  auto count = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
  return std::clamp<std::size_t>(count, 1, dim);
}

DimensionMask select_dimensions(const DimensionImportance& u,
                                double retained_fraction) {
  const std::size_t d = u.dim();
  if (d == 0) throw InvalidArgument("cannot select from zero dimensions");
  const std::size_t keep = retained_count(retained_fraction, d);
  std::vector<std::uint32_t> order(d);
  std::iota(order.begin(), order.end(), 0u);
  const auto scores = u.scores();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return scores[a] > scores[b];
                   });
  order.resize(keep);
  return DimensionMask(std::move(order), d);
}

}  // namespace eclipse
