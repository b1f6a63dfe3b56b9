#include "eclipse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "eclipse/errors.hpp"

namespace eclipse::stats {

namespace {

double poly(std::span<const double> coef, double x) {
  double result = 0.0;
  for (std::size_t i = coef.size(); i-- > 0;) result = result * x + coef[i];
  return result;
}

double normal_upper(double z, double mean = 0.0, double sd = 1.0) {
  boost::math::normal_distribution<double> dist(mean, sd);
  return boost::math::cdf(boost::math::complement(dist, z));
}

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

/// Average ranks (1-based) of the given non-negative magnitudes.
std::vector<double> average_ranks(std::span<const double> magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return magnitudes[a] < magnitudes[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

PairedSample::PairedSample(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != b_.size()) {
    throw InvalidArgument("paired sample sides differ in length");
  }
  if (a_.empty()) throw InvalidArgument("paired sample is empty");
}

PairedSample PairedSample::from_metrics(const MetricResult& a,
                                        const MetricResult& b) {
  if (a.per_query.size() != b.per_query.size()) {
    throw InvalidArgument("metric results cover different query sets");
  }
  std::vector<double> va, vb;
  va.reserve(a.per_query.size());
  vb.reserve(b.per_query.size());
  auto it = b.per_query.begin();
  for (const auto& [qid, value] : a.per_query) {
    if (it->first != qid) {
      throw InvalidArgument("metric results cover different query sets (" +
                            qid + " vs " + it->first + ")");
    }
    va.push_back(value);
    vb.push_back(it->second);
    ++it;
  }
  return PairedSample(std::move(va), std::move(vb));
}

std::vector<double> PairedSample::differences() const {
  std::vector<double> d(a_.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a_[i] - b_[i];
  return d;
}

ShapiroWilkResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) {
    throw InvalidArgument("Shapiro-Wilk needs 3 <= n <= 5000, got " +
                          std::to_string(n));
  }
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  // Centering on the median improves precision without changing W.
  const double median = n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
  for (double& v : x) v -= median;
  const double range = x.back() - x.front();
  if (!(range > 1e-19)) {
    throw DegenerateInput("Shapiro-Wilk sample has zero range");
  }

  // Coefficients for the lower half of the order statistics, AS R94.
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    boost::math::normal_distribution<double> unit;
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = boost::math::quantile(
          unit, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[0] / ssumm2;
    std::size_t first = 1;
    double fac;
    if (n > 5) {
      first = 2;
      const double a2 = -m[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  // W as the squared correlation between the data and the antisymmetric
  // coefficient vector, in the 1 - w1 form that stays accurate near W = 1.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    coef[i] = -a[i];
    coef[n - 1 - i] = a[i];
  }
  const double coef_mean = std::accumulate(coef.begin(), coef.end(), 0.0) / an;
  double x_mean = 0.0;
  for (double v : x) x_mean += v / range;
  x_mean /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ca = coef[i] - coef_mean;
    const double cx = x[i] / range - x_mean;
    ssa += ca * ca;
    ssx += cx * cx;
    sax += ca * cx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  if (n == 3) {
    constexpr double kSixOverPi = 1.90985931710274;
    constexpr double kPiOverThree = 1.04719755119660;
    const double p = kSixOverPi * (std::asin(std::sqrt(w)) - kPiOverThree);
    return {w, clamp_probability(p)};
  }

  double y = std::log(w1);
  const double log_n = std::log(an);
  double mean, sd;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) return {w, 1e-99};
    y = -std::log(gamma - y);
    mean = poly(c3, an);
    sd = std::exp(poly(c4, an));
  } else {
    mean = poly(c5, log_n);
    sd = std::exp(poly(c6, log_n));
  }
  return {w, clamp_probability(normal_upper(y, mean, sd))};
}

TestOutcome paired_t_test(const PairedSample& s, Alternative alternative) {
  const auto d = s.differences();
  const double n = static_cast<double>(d.size());
  if (d.size() < 2) throw InvalidArgument("paired t-test needs n >= 2");
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) {
    throw DegenerateInput("paired differences have zero variance");
  }
  const double t = mean / (sd / std::sqrt(n));
  boost::math::students_t_distribution<double> dist(n - 1.0);
  double p;
  if (alternative == Alternative::kGreater) {
    p = boost::math::cdf(boost::math::complement(dist, t));
  } else {
    p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  }
  TestOutcome out;
  out.statistic = t;
  out.p_value = clamp_probability(p);
  out.test_used = TestKind::kTTest;
  return out;
}

double wilcoxon_exact_upper_tail(std::span<const double> ranks, double w_plus) {
  // Ranks are multiples of 0.5, so doubled ranks are integers and the null
  // distribution of 2 W+ is a subset-sum count over them.
  std::vector<std::size_t> doubled(ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t r : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  const auto threshold = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  double upper = 0.0;
  for (std::size_t s = threshold; s <= total; ++s) upper += counts[s];
  return clamp_probability(upper / std::exp2(static_cast<double>(ranks.size())));
}

TestOutcome wilcoxon_signed_rank(std::span<const double> differences) {
  std::vector<double> nonzero;
  for (double d : differences) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty()) {
    throw DegenerateInput("Wilcoxon test: all differences are zero");
  }
  std::vector<double> magnitude(nonzero.size());
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    magnitude[i] = std::fabs(nonzero[i]);
  }
  const auto ranks = average_ranks(magnitude);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (nonzero[i] > 0.0) w_plus += ranks[i];
  }

  TestOutcome out;
  out.statistic = w_plus;
  out.test_used = TestKind::kWilcoxon;
  const auto n = static_cast<double>(ranks.size());
  if (ranks.size() <= kWilcoxonExactLimit) {
    out.p_value = wilcoxon_exact_upper_tail(ranks, w_plus);
    return out;
  }
  // Tie correction: sum over tie groups of (t^3 - t) / 48.
  std::vector<double> sorted = magnitude;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  out.p_value = clamp_probability(normal_upper(z));
  return out;
}

TestOutcome wilcoxon_signed_rank(const PairedSample& s) {
  const auto d = s.differences();
  return wilcoxon_signed_rank(std::span<const double>(d));
}

std::vector<bool> holm_bonferroni(std::span<const double> p_values,
                                  double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("p-values must lie in [0, 1]");
    }
  }
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::vector<bool> reject(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (p_values[order[i]] > alpha / static_cast<double>(m - i)) break;
    reject[order[i]] = true;
  }
  return reject;
}

TestOutcome compare_systems(const MetricResult& baseline,
                            const MetricResult& treatment, double alpha) {
  const auto sample = PairedSample::from_metrics(treatment, baseline);
  const auto diffs = sample.differences();
  if (std::adjacent_find(diffs.begin(), diffs.end(), std::not_equal_to<>()) ==
      diffs.end()) {
    throw DegenerateInput("per-query differences are constant");
  }
  const auto normality = shapiro_wilk(diffs);
  TestOutcome out = normality.p >= alpha
                        ? paired_t_test(sample, Alternative::kGreater)
                        : wilcoxon_signed_rank(sample);
  out.normality_p = normality.p;
  out.significant = out.p_value < alpha;
  return out;
}

}  // namespace eclipse::stats
