#include "dpslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

namespace dps::stats {
namespace {

constexpr double kEps = 1e-14;

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  size_t n = values.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Series expansion of P(a, x), valid for x < a + 1.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), valid for x >= a + 1 (modified Lentz).
static double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double regularized_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw OutOfRange("invalid incomplete gamma argument");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw OutOfRange("invalid incomplete gamma argument");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(df / 2.0, x / 2.0);
}

// Continued fraction for the incomplete beta function (modified Lentz).
static double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0)
    throw OutOfRange("invalid incomplete beta argument");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double students_t_two_sided_p(double t, double df) {
  if (df <= 0.0) throw OutOfRange("degrees of freedom must be positive");
  if (!std::isfinite(t)) return 0.0;
  double x = df / (df + t * t);
  return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

// ---------------------------------------------------------------------------
// Ranks
// ---------------------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
  size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&values](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    double average = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = average;
    i = j;
  }
  return ranks;
}

std::vector<std::vector<double>> rank_rows_descending(
    const std::vector<std::vector<double>>& scores) {
  std::vector<std::vector<double>> out;
  out.reserve(scores.size());
  for (const auto& row : scores) {
    std::vector<double> negated(row.size());
    for (size_t i = 0; i < row.size(); ++i) negated[i] = -row[i];
    out.push_back(average_ranks(negated));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank
// ---------------------------------------------------------------------------

namespace {

// Exact tail probabilities for the signed-rank sum over possibly tied
// (average) ranks. Ranks are doubled to integers; the distribution of the
// doubled positive-rank sum is built by the standard subset-sum recurrence.
double exact_two_sided_p(const std::vector<double>& ranks, double w_min) {
  int total2 = 0;
  std::vector<int> doubled;
  doubled.reserve(ranks.size());
  for (double r : ranks) {
    int d = static_cast<int>(std::llround(2.0 * r));
    doubled.push_back(d);
    total2 += d;
  }
  std::vector<double> counts(static_cast<size_t>(total2) + 1, 0.0);
  counts[0] = 1.0;
  int reached = 0;
  for (int d : doubled) {
    reached += d;
    for (int s = reached; s >= d; --s) counts[s] += counts[s - d];
  }
  double w2 = 2.0 * w_min;
  double lower = 0.0;
  double upper = 0.0;
  for (int s = 0; s <= total2; ++s) {
    if (static_cast<double>(s) <= w2 + kEps) lower += counts[s];
    if (static_cast<double>(s) >= static_cast<double>(total2) - w2 - kEps)
      upper += counts[s];
  }
  double assignments = std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, (lower + upper) / assignments);
}

}  // namespace

StatResult wilcoxon_signed_rank_diffs(std::span<const double> diffs) {
  std::vector<double> all(diffs.begin(), diffs.end());
  std::vector<double> nonzero;
  for (double d : all) {
    if (d != 0.0) nonzero.push_back(d);
  }
  if (nonzero.empty())
    throw AllZeroDifferences("all pairwise differences are zero");

  size_t n = nonzero.size();
  std::vector<double> magnitudes(n);
  for (size_t i = 0; i < n; ++i) magnitudes[i] = std::fabs(nonzero[i]);
  std::vector<double> ranks = average_ranks(magnitudes);

  double w_plus = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (nonzero[i] > 0.0) w_plus += ranks[i];
  }
  double total = static_cast<double>(n) * (n + 1) / 2.0;
  double w_minus = total - w_plus;
  double w = std::min(w_plus, w_minus);

  // Tie correction over groups of equal magnitudes.
  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  double dn = static_cast<double>(n);
  double mu = dn * (dn + 1.0) / 4.0;
  double sigma2 = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
  double sigma = std::sqrt(std::max(sigma2, 0.0));

  double z = 0.0;
  if (sigma > 0.0) z = std::min(0.0, (w - mu + 0.5) / sigma);

  StatResult result;
  result.test_name = "wilcoxon_signed_rank";
  result.n = static_cast<int>(n);
  result.statistic = w;
  result.effect_size = std::fabs(z) / std::sqrt(dn);
  result.median_difference = median_of(all);
  if (n <= 25) {
    result.p_value = exact_two_sided_p(ranks, w);
  } else {
    result.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  return result;
}

StatResult wilcoxon_signed_rank(
    std::span<const std::pair<double, double>> pairs) {
  std::vector<double> diffs;
  diffs.reserve(pairs.size());
  for (const auto& [x, y] : pairs) diffs.push_back(x - y);
  return wilcoxon_signed_rank_diffs(diffs);
}

// ---------------------------------------------------------------------------
// Friedman / Kendall's W
// ---------------------------------------------------------------------------

StatResult friedman(const std::vector<std::vector<double>>& ranks) {
  size_t n = ranks.size();
  if (n < 2) throw DegenerateMatrix("friedman requires at least 2 blocks");
  size_t k = ranks.front().size();
  if (k < 2) throw DegenerateMatrix("friedman requires at least 2 treatments");
  double expected_row_sum = static_cast<double>(k) * (k + 1) / 2.0;
  for (const auto& row : ranks) {
    if (row.size() != k)
      throw DegenerateMatrix("friedman rank matrix rows differ in length");
    double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (std::fabs(sum - expected_row_sum) > 1e-9)
      throw DegenerateMatrix("friedman rows must be average-ranked rankings");
  }

  double dn = static_cast<double>(n);
  double dk = static_cast<double>(k);
  std::vector<double> column_sums(k, 0.0);
  double sum_squares = 0.0;
  for (const auto& row : ranks) {
    for (size_t j = 0; j < k; ++j) {
      column_sums[j] += row[j];
      sum_squares += row[j] * row[j];
    }
  }
  double numerator = 0.0;
  for (double rj : column_sums) numerator += rj * rj;
  numerator = (dk - 1.0) * (numerator - dn * dn * dk * (dk + 1.0) * (dk + 1.0) / 4.0);
  double denominator = sum_squares - dn * dk * (dk + 1.0) * (dk + 1.0) / 4.0;

  StatResult result;
  result.test_name = "friedman";
  result.n = static_cast<int>(n);
  if (denominator <= kEps) {
    // Fully tied matrix: no discriminating information.
    result.statistic = 0.0;
    result.p_value = 1.0;
    result.kendall_w = 0.0;
    return result;
  }
  result.statistic = numerator / denominator;
  result.p_value = chi_square_sf(result.statistic, dk - 1.0);
  result.kendall_w = result.statistic / (dn * (dk - 1.0));
  return result;
}

std::vector<PairwiseResult> pairwise_posthoc(
    const std::vector<std::vector<double>>& ranks, Adjustment adjustment) {
  if (ranks.empty() || ranks.front().size() < 2)
    throw DegenerateMatrix("posthoc requires at least 2 treatments");
  size_t k = ranks.front().size();
  std::vector<PairwiseResult> results;
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a + 1; b < k; ++b) {
      PairwiseResult pr;
      pr.treatment_a = static_cast<int>(a);
      pr.treatment_b = static_cast<int>(b);
      std::vector<double> diffs;
      diffs.reserve(ranks.size());
      for (const auto& row : ranks) diffs.push_back(row[a] - row[b]);
      try {
        pr.result = wilcoxon_signed_rank_diffs(diffs);
        pr.result.test_name = "wilcoxon[" + std::to_string(a) + " vs " +
                              std::to_string(b) + "]";
      } catch (const AllZeroDifferences&) {
        pr.skipped = true;
        pr.result.test_name = "wilcoxon[" + std::to_string(a) + " vs " +
                              std::to_string(b) + "] (skipped: identical columns)";
      }
      results.push_back(std::move(pr));
    }
  }
  std::vector<double> ps;
  for (const auto& pr : results) {
    if (!pr.skipped) ps.push_back(pr.result.p_value);
  }
  if (!ps.empty()) {
    std::vector<double> adjusted = adjust_p(ps, adjustment);
    size_t index = 0;
    for (auto& pr : results) {
      if (!pr.skipped) pr.result.adjusted_p = adjusted[index++];
    }
  }
  return results;
}

// ---------------------------------------------------------------------------
// Spearman
// ---------------------------------------------------------------------------

StatResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw OutOfRange("spearman requires equal-length inputs");
  if (x.size() < 3) throw OutOfRange("spearman requires at least 3 observations");
  std::vector<double> rx = average_ranks(x);
  std::vector<double> ry = average_ranks(y);
  double n = static_cast<double>(x.size());
  double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double dx = rx[i] - mean;
    double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= kEps || syy <= kEps)
    throw ConstantInput("spearman input has zero rank variance");
  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::clamp(rho, -1.0, 1.0);

  StatResult result;
  result.test_name = "spearman";
  result.n = static_cast<int>(x.size());
  result.statistic = rho;
  result.rho = rho;
  if (std::fabs(rho) >= 1.0 - 1e-12) {
    result.p_value = 0.0;
  } else {
    double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
    result.p_value = students_t_two_sided_p(t, n - 2.0);
  }
  return result;
}

// ---------------------------------------------------------------------------
// p-value adjustment
// ---------------------------------------------------------------------------

std::vector<double> adjust_p(std::span<const double> p_values,
                             Adjustment adjustment) {
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0))
      throw OutOfRange("p-values must lie in [0, 1]");
  }
  size_t m = p_values.size();
  std::vector<double> adjusted(m, 0.0);
  if (adjustment == Adjustment::Bonferroni) {
    for (size_t i = 0; i < m; ++i)
      adjusted[i] = std::min(1.0, static_cast<double>(m) * p_values[i]);
    return adjusted;
  }
  // Holm step-down.
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&p_values](size_t a, size_t b) {
    return p_values[a] < p_values[b];
  });
  double running = 0.0;
  for (size_t i = 0; i < m; ++i) {
    double scaled = static_cast<double>(m - i) * p_values[order[i]];
    running = std::max(running, std::min(1.0, scaled));
    adjusted[order[i]] = running;
  }
  return adjusted;
}

}  // namespace dps::stats
