#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "eclipse/metrics.hpp"

namespace eclipse::stats {

/// Per-query metric values of two systems, aligned by query.
class PairedSample {
 public:
  /// Throws InvalidArgument unless both sides are non-empty and equally long.
  PairedSample(std::vector<double> a, std::vector<double> b);

  /// Aligns two metric results by query id. Throws InvalidArgument when the
  /// query sets differ.
  static PairedSample from_metrics(const MetricResult& a, const MetricResult& b);

  std::span<const double> a() const noexcept { return a_; }
  std::span<const double> b() const noexcept { return b_; }
  std::size_t size() const noexcept { return a_.size(); }
  /// a[i] - b[i]
  std::vector<double> differences() const;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

enum class Alternative { kTwoSided, kGreater };
enum class TestKind { kTTest, kWilcoxon };

struct TestOutcome {
  double statistic = 0.0;
  double p_value = 1.0;
  TestKind test_used = TestKind::kTTest;
  bool significant = false;
  /// Shapiro-Wilk p of the differences when chosen by compare_systems.
  double normality_p = -1.0;
};

struct ShapiroWilkResult {
  double w = 1.0;
  double p = 1.0;
};

/// Royston's AS R94 algorithm; 3 <= n <= 5000, non-constant sample.
ShapiroWilkResult shapiro_wilk(std::span<const double> sample);

/// t = mean(d) / (sd(d) / sqrt(n)), df = n - 1, d = a - b.
TestOutcome paired_t_test(const PairedSample& s, Alternative alternative);

/// Signed-rank test of a - b > 0. Zero differences are dropped, tied
/// magnitudes share their average rank. Exact null distribution for up to
/// kWilcoxonExactLimit nonzero differences, otherwise the normal
/// approximation with tie and continuity corrections. The statistic is the
/// positive rank sum W+.
TestOutcome wilcoxon_signed_rank(const PairedSample& s);
TestOutcome wilcoxon_signed_rank(std::span<const double> differences);

inline constexpr std::size_t kWilcoxonExactLimit = 20;

/// Exact upper tail P(W+ >= w_plus) for the given (possibly tied) ranks.
double wilcoxon_exact_upper_tail(std::span<const double> ranks, double w_plus);

/// Holm step-down procedure. Returns rejections in input order.
std::vector<bool> holm_bonferroni(std::span<const double> p_values,
                                  double alpha);

/// Shapiro-Wilk on the per-query differences (treatment - baseline); a
/// one-sided paired t-test when normality is not rejected at alpha, else a
/// one-sided Wilcoxon. Throws DegenerateInput when the differences are
/// constant.
TestOutcome compare_systems(const MetricResult& baseline,
                            const MetricResult& treatment, double alpha = 0.05);

}  // namespace eclipse::stats
