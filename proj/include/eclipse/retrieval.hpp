#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "eclipse/embedding_store.hpp"

namespace eclipse {

enum class Similarity { kInnerProduct, kCosine };

struct PoolEntry {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

/// Ranked documents for one query: scores non-increasing, ties by ascending
/// doc id, doc ids unique.
struct CandidatePool {
  std::string query_id;
  std::vector<PoolEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  friend bool operator==(const CandidatePool&, const CandidatePool&) = default;
};

/// Sorted, non-empty set of retained dimension indices, all below `dim()`.
class DimensionMask {
 public:
  DimensionMask(std::vector<std::uint32_t> selected, std::size_t dim);

  static DimensionMask all(std::size_t dim);

  std::span<const std::uint32_t> selected() const noexcept { return selected_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return selected_.size(); }
  bool is_full() const noexcept { return selected_.size() == dim_; }
  bool contains(std::uint32_t index) const;

  friend bool operator==(const DimensionMask&, const DimensionMask&) = default;

 private:
  std::vector<std::uint32_t> selected_;
  std::size_t dim_;
};

/// Similarity of two raw vectors restricted to the masked-in coordinates.
/// Accumulates in double; a null mask means every coordinate.
double score(std::span<const float> q, std::span<const float> doc,
             Similarity sim, const DimensionMask* mask = nullptr);

double score(const Embedding& q, const Embedding& doc, Similarity sim,
             const std::optional<DimensionMask>& mask = std::nullopt);

/// Exact top-k over every corpus row. Deterministic regardless of `threads`.
CandidatePool top_k(const Embedding& q, const EmbeddingMatrix& corpus,
                    std::size_t k, Similarity sim,
                    const std::optional<DimensionMask>& mask = std::nullopt,
                    std::string query_id = {}, unsigned threads = 1);

struct FullCorpus {};
using RerankScope = std::variant<FullCorpus, const CandidatePool*>;

/// Ranking under masked similarity, over the whole corpus or only the
/// members of a pool, truncated to `depth`.
CandidatePool rerank(const Embedding& q, const EmbeddingMatrix& corpus,
                     const DimensionMask& mask, Similarity sim,
                     std::size_t depth, const RerankScope& scope,
                     std::string query_id = {});

/// Strict ranking order: higher score first, then ascending doc id.
bool ranks_before(const PoolEntry& a, const PoolEntry& b);

}  // namespace eclipse
