#include "eclipse/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "eclipse/errors.hpp"

namespace eclipse {

namespace {

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a) +
                          " vs " + std::to_string(b));
  }
}

struct Sums {
  double dot = 0.0;
  double qq = 0.0;
  double dd = 0.0;
};

template <bool kNorms>
Sums accumulate(std::span<const float> q, std::span<const float> doc,
                const DimensionMask* mask) {
  Sums s;
  auto add = [&](std::size_t i) {
    const double a = q[i];
    const double b = doc[i];
    s.dot += a * b;
    if constexpr (kNorms) {
      s.qq += a * a;
      s.dd += b * b;
    }
  };
  if (mask == nullptr || mask->is_full()) {
    for (std::size_t i = 0; i < q.size(); ++i) add(i);
  } else {
    for (std::uint32_t i : mask->selected()) add(i);
  }
  return s;
}

double finish(Similarity sim, const Sums& s) {
  if (sim == Similarity::kInnerProduct) return s.dot;
  if (s.qq == 0.0 || s.dd == 0.0) {
    throw InvalidArgument("cosine similarity with zero norm over active dims");
  }
  return s.dot / (std::sqrt(s.qq) * std::sqrt(s.dd));
}

void check_mask(const DimensionMask* mask, std::size_t dim) {
  if (mask != nullptr && mask->dim() != dim) {
    throw InvalidArgument("mask dimension " + std::to_string(mask->dim()) +
                          " does not match vectors of dimension " +
                          std::to_string(dim));
  }
}

struct Scored {
  double score;
  std::size_t row;
};

// Best `k` rows by score, ties by ascending doc id; ids are only copied for
// the survivors.
CandidatePool take_best(std::vector<Scored> all, std::size_t k,
                        const EmbeddingMatrix& corpus, std::string query_id) {
  k = std::min(k, all.size());
  auto before = [&](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return corpus.id(a.row) < corpus.id(b.row);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), before);
  CandidatePool pool{std::move(query_id), {}};
  pool.entries.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    pool.entries.push_back({corpus.id(all[i].row), all[i].score});
  }
  return pool;
}

}  // namespace

DimensionMask::DimensionMask(std::vector<std::uint32_t> selected,
                             std::size_t dim)
    : selected_(std::move(selected)), dim_(dim) {
  std::sort(selected_.begin(), selected_.end());
  selected_.erase(std::unique(selected_.begin(), selected_.end()),
                  selected_.end());
  if (selected_.empty()) throw InvalidArgument("dimension mask is empty");
  if (selected_.back() >= dim_) {
    throw InvalidArgument("mask index " + std::to_string(selected_.back()) +
                          " out of range for dim " + std::to_string(dim_));
  }
}

DimensionMask DimensionMask::all(std::size_t dim) {
  std::vector<std::uint32_t> idx(dim);
  std::iota(idx.begin(), idx.end(), 0u);
  return DimensionMask(std::move(idx), dim);
}

bool DimensionMask::contains(std::uint32_t index) const {
  return std::binary_search(selected_.begin(), selected_.end(), index);
}

bool ranks_before(const PoolEntry& a, const PoolEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

double score(std::span<const float> q, std::span<const float> doc,
             Similarity sim, const DimensionMask* mask) {
  check_dims(q.size(), doc.size());
  check_mask(mask, q.size());
  if (sim == Similarity::kInnerProduct) {
    return finish(sim, accumulate<false>(q, doc, mask));
  }
  return finish(sim, accumulate<true>(q, doc, mask));
}

double score(const Embedding& q, const Embedding& doc, Similarity sim,
             const std::optional<DimensionMask>& mask) {
  return score(q.values(), doc.values(), sim, mask ? &*mask : nullptr);
}

CandidatePool top_k(const Embedding& q, const EmbeddingMatrix& corpus,
                    std::size_t k, Similarity sim,
                    const std::optional<DimensionMask>& mask,
                    std::string query_id, unsigned threads) {
  if (k == 0) throw InvalidArgument("top_k requires k >= 1");
  if (corpus.empty()) throw InvalidArgument("cannot search an empty corpus");
  check_dims(q.dim(), corpus.dim());
  const DimensionMask* m = mask ? &*mask : nullptr;
  check_mask(m, q.dim());

  const std::size_t n = corpus.size();
  std::vector<Scored> all(n);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      all[i] = {score(q.values(), corpus.row(i), sim, m), i};
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    score_range(0, n);
  } else {
    // Each worker writes a disjoint slice; the final sort fixes the order.
    std::vector<std::jthread> workers;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      workers.emplace_back(score_range, begin, std::min(n, begin + chunk));
    }
  }
  return take_best(std::move(all), k, corpus, std::move(query_id));
}

CandidatePool rerank(const Embedding& q, const EmbeddingMatrix& corpus,
                     const DimensionMask& mask, Similarity sim,
                     std::size_t depth, const RerankScope& scope,
                     std::string query_id) {
  if (depth == 0) throw InvalidArgument("rerank requires depth >= 1");
  check_dims(q.dim(), corpus.dim());
  check_mask(&mask, q.dim());

  if (std::holds_alternative<FullCorpus>(scope)) {
    return top_k(q, corpus, depth, sim, mask, std::move(query_id));
  }
  const CandidatePool* pool = std::get<const CandidatePool*>(scope);
  if (pool == nullptr) throw InvalidArgument("rerank scope pool is null");
  std::vector<Scored> all;
  all.reserve(pool->size());
  for (const auto& e : pool->entries) {
    const auto row = corpus.find(e.doc_id);
    if (!row) {
      throw InvalidArgument("pool document not in corpus: " + e.doc_id);
    }
    all.push_back({score(q.values(), corpus.row(*row), sim, &mask), *row});
  }
  if (all.empty()) throw InvalidArgument("cannot rerank an empty pool");
  return take_best(std::move(all), depth, corpus, std::move(query_id));
}

}  // namespace eclipse
