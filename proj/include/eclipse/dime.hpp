#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eclipse/embedding_store.hpp"
#include "eclipse/retrieval.hpp"

namespace eclipse {

enum class DimeVariant { kPrf, kLlm };

/// Hyperparameters of one dimension-importance estimate.
///
///   k_plus            documents averaged into the PRF sun vector
///   k_minus           bottom-of-pool documents averaged into the moon
///   alpha, beta       independent weights of the sun and moon terms
///   pool_size         documents retrieved at full dimensionality
///   retained_fraction share of dimensions kept after ranking
struct DimeConfig {
  DimeVariant variant = DimeVariant::kPrf;
  std::size_t k_plus = 1;
  std::size_t k_minus = 2;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t pool_size = 1000;
  double retained_fraction = 0.5;

  /// Throws InvalidArgument when the invariants do not hold:
  /// 0 < k_minus < pool_size, 0 < k_plus < pool_size - k_minus (PRF),
  /// alpha > 0, beta >= 0, retained_fraction in (0, 1].
  void validate() const;
};

/// Per-dimension importance u_q; one finite score per embedding dimension.
class DimensionImportance {
 public:
  explicit DimensionImportance(std::vector<double> scores);

  std::span<const double> scores() const noexcept { return scores_; }
  std::size_t dim() const noexcept { return scores_.size(); }
  double operator[](std::size_t i) const noexcept { return scores_[i]; }

 private:
  std::vector<double> scores_;
};

/// Mean of the embeddings of the top `k_plus` pool documents (the PRF sun).
Embedding prf_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                       std::size_t k_plus);

/// Mean of the embeddings of the bottom `k_minus` pool documents (the moon),
/// i.e. pool ranks k, k-1, ..., k-k_minus+1.
Embedding moon_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                        std::size_t k_minus);

/// Mean of the embeddings at the given 0-based pool positions.
Embedding pool_centroid(const CandidatePool& pool, const EmbeddingMatrix& corpus,
                        std::span<const std::size_t> positions);

/// u[i] = q[i] * s[i]. PRF DIME when s is the PRF centroid, LLM DIME when s
/// is the answer embedding.
DimensionImportance dime_score_standard(const Embedding& q, const Embedding& s);

/// u[i] = alpha * q[i] * s[i] - beta * q[i] * m[i].
DimensionImportance eclipse_score(const Embedding& q, const Embedding& s,
                                  const Embedding& m, double alpha, double beta);

/// Number of dimensions kept for a fraction: round-half-up of fraction * d,
/// at least 1.
std::size_t retained_count(double retained_fraction, std::size_t dim);

/// Highest-scoring dimensions; ties at the cut go to the lower index.
DimensionMask select_dimensions(const DimensionImportance& u,
                                double retained_fraction);

}  // namespace eclipse
