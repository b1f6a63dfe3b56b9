#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eclipse/embedding_store.hpp"
#include "eclipse/trec_io.hpp"

namespace eclipse::synth {

/// Planted-subspace corpus description. Every query owns `relevant_per_query`
/// relevant and `irrelevant_per_query` irrelevant documents.
struct SynthSpec {
  std::size_t dim = 128;
  std::size_t planted_size = 16;
  std::size_t queries = 50;
  std::size_t relevant_per_query = 10;
  std::size_t irrelevant_per_query = 490;
  double noise_sigma = 0.05;
  double signal_mean = 1.0;
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthCorpus {
  EmbeddingMatrix queries;
  EmbeddingMatrix corpus;
  Qrels qrels;
  /// Sorted planted dimensions per query id.
  std::map<std::string, std::vector<std::uint32_t>> planted;
};

inline constexpr int kRelevantGrade = 2;

/// Deterministic in `spec`: every vector draws from its own counter-based
/// stream keyed by (seed, query index, document index), so the output does not
/// depend on generation order or thread count.
SynthCorpus generate(const SynthSpec& spec, unsigned threads = 1);

std::string query_id(const SynthSpec& spec, std::size_t query);
std::string doc_id(const SynthSpec& spec, std::size_t query, std::size_t doc);

/// SplitMix64-style counter generator: output i is a bijective mix of
/// key + i * golden-ratio increment. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace eclipse::synth
