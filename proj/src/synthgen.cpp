#include "eclipse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "eclipse/errors.hpp"

namespace eclipse::synth {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kQueryStream = ~std::uint64_t{0};

std::size_t digits(std::size_t n) {
  std::size_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

std::string padded(std::size_t value, std::size_t width) {
  std::string s = std::to_string(value);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

class Gaussian {
 public:
  Gaussian(double mean, double sd) : mean_(mean), sd_(sd), dist_(0.0, 1.0) {}

  float operator()(CounterRng& rng) {
    if (sd_ == 0.0) return static_cast<float>(mean_);
    return static_cast<float>(mean_ + sd_ * dist_(rng));
  }

 private:
  double mean_;
  double sd_;
  boost::random::normal_distribution<double> dist_;
};

/// First `count` entries of a Fisher-Yates shuffle of `pool`, sorted.
std::vector<std::uint32_t> sample_subset(std::vector<std::uint32_t> pool,
                                         std::size_t count, CounterRng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    : key_(mix64(mix64(mix64(seed) ^ (a + kGolden)) ^ (b + 2 * kGolden))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

void SynthSpec::validate() const {
  if (dim == 0) throw InvalidArgument("synthetic dim must be >= 1");
  if (planted_size == 0 || planted_size >= dim) {
    throw InvalidArgument("planted_size must satisfy 1 <= r < d");
  }
  if (queries == 0 || relevant_per_query == 0 || irrelevant_per_query == 0) {
    throw InvalidArgument("query and document counts must be >= 1");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise_sigma must be non-negative");
  }
  if (!std::isfinite(signal_mean)) {
    throw InvalidArgument("signal_mean must be finite");
  }
}

std::string query_id(const SynthSpec& spec, std::size_t query) {
  return "q" + padded(query, digits(spec.queries - 1));
}

std::string doc_id(const SynthSpec& spec, std::size_t query, std::size_t doc) {
  const std::size_t per_query =
      spec.relevant_per_query + spec.irrelevant_per_query;
  return "d" + padded(query, digits(spec.queries - 1)) + "-" +
         padded(doc, digits(per_query - 1));
}

SynthCorpus generate(const SynthSpec& spec, unsigned threads) {
  spec.validate();
  const std::size_t d = spec.dim;
  const std::size_t r = spec.planted_size;
  const std::size_t distractor = std::min(r, d - r);
  const std::size_t per_query =
      spec.relevant_per_query + spec.irrelevant_per_query;
  const double signal_sd = 0.1 * std::fabs(spec.signal_mean);

  std::vector<float> query_data(spec.queries * d, 0.0f);
  std::vector<float> doc_data(spec.queries * per_query * d, 0.0f);
  std::vector<std::vector<std::uint32_t>> planted(spec.queries);

  std::vector<std::uint32_t> all_dims(d);
  std::iota(all_dims.begin(), all_dims.end(), 0u);

  auto fill = [&](float* out, const std::vector<std::uint32_t>& signal_dims,
                  CounterRng& rng) {
    Gaussian noise(0.0, spec.noise_sigma);
    Gaussian signal(spec.signal_mean, signal_sd);
    for (std::size_t i = 0; i < d; ++i) out[i] = noise(rng);
    for (std::uint32_t i : signal_dims) out[i] = signal(rng);
  };

  auto build_query = [&](std::size_t q) {
    CounterRng qrng(spec.seed, q, kQueryStream);
    planted[q] = sample_subset(all_dims, r, qrng);
    fill(query_data.data() + q * d, planted[q], qrng);

    std::vector<std::uint32_t> complement;
    complement.reserve(d - r);
    std::set_difference(all_dims.begin(), all_dims.end(), planted[q].begin(),
                        planted[q].end(), std::back_inserter(complement));

    for (std::size_t j = 0; j < per_query; ++j) {
      CounterRng rng(spec.seed, q, j);
      float* row = doc_data.data() + (q * per_query + j) * d;
      if (j < spec.relevant_per_query) {
        fill(row, planted[q], rng);
      } else {
        fill(row, sample_subset(complement, distractor, rng), rng);
      }
    }
  };

  threads = std::max(1u, std::min<unsigned>(
                             threads, static_cast<unsigned>(spec.queries)));
  if (threads == 1) {
    for (std::size_t q = 0; q < spec.queries; ++q) build_query(q);
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t q = t; q < spec.queries; q += threads) build_query(q);
      });
    }
  }

  std::vector<std::string> qids, dids;
  qids.reserve(spec.queries);
  dids.reserve(spec.queries * per_query);
  Qrels qrels;
  std::map<std::string, std::vector<std::uint32_t>> planted_by_id;
  for (std::size_t q = 0; q < spec.queries; ++q) {
    qids.push_back(query_id(spec, q));
    planted_by_id[qids.back()] = planted[q];
    for (std::size_t j = 0; j < per_query; ++j) {
      dids.push_back(doc_id(spec, q, j));
      qrels.add(qids.back(), dids.back(),
                j < spec.relevant_per_query ? kRelevantGrade : 0);
    }
  }
  return SynthCorpus{EmbeddingMatrix(std::move(qids), d, std::move(query_data)),
                     EmbeddingMatrix(std::move(dids), d, std::move(doc_data)),
                     std::move(qrels), std::move(planted_by_id)};
}

}  // namespace eclipse::synth
