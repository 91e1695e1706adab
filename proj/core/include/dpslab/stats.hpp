#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpslab/errors.hpp"

namespace dps::stats {

class AllZeroDifferences : public Error {
 public:
  explicit AllZeroDifferences(const std::string& message) : Error(message) {}
};

class DegenerateMatrix : public Error {
 public:
  explicit DegenerateMatrix(const std::string& message) : Error(message) {}
};

class ConstantInput : public Error {
 public:
  explicit ConstantInput(const std::string& message) : Error(message) {}
};

class OutOfRange : public Error {
 public:
  explicit OutOfRange(const std::string& message) : Error(message) {}
};

struct StatResult {
  std::string test_name;
  int n = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> adjusted_p;
  std::optional<double> effect_size;
  std::optional<double> median_difference;
  std::optional<double> kendall_w;
  std::optional<double> rho;
};

enum class Adjustment { Bonferroni, Holm };

// Two-sided Wilcoxon signed-rank test. Zero differences are dropped; ties get
// average ranks; the statistic is min(W+, W-). The p-value is exact (from the
// signed-rank sum distribution over the tied ranks) for effective n <= 25 and
// a tie- and continuity-corrected normal approximation beyond. effect_size is
// r = |z| / sqrt(n_effective); median_difference covers all original pairs.
// Throws AllZeroDifferences when every difference is zero.
StatResult wilcoxon_signed_rank(std::span<const std::pair<double, double>> pairs);
StatResult wilcoxon_signed_rank_diffs(std::span<const double> diffs);

// Tie-corrected Friedman test over an n x k matrix of within-block ranks.
// kendall_w = statistic / (n (k - 1)). Throws DegenerateMatrix for n < 2,
// k < 2 or rows that are not average-ranked rankings of k treatments.
StatResult friedman(const std::vector<std::vector<double>>& ranks);

struct PairwiseResult {
  int treatment_a = 0;
  int treatment_b = 0;
  bool skipped = false;  // all-zero differences for this pair
  StatResult result;
};

// All k(k-1)/2 pairwise Wilcoxon tests on rank columns, with adjusted_p
// filled per the chosen method over the non-skipped tests.
std::vector<PairwiseResult> pairwise_posthoc(
    const std::vector<std::vector<double>>& ranks, Adjustment adjustment);

// Spearman correlation: Pearson over average ranks, p via the
// t-approximation with n - 2 degrees of freedom, two-sided.
// Throws ConstantInput on zero rank variance.
StatResult spearman(std::span<const double> x, std::span<const double> y);

// Multiple-comparison adjustment. Bonferroni: min(1, m * p). Holm: step-down
// with monotonicity. Throws OutOfRange for inputs outside [0, 1].
std::vector<double> adjust_p(std::span<const double> p_values,
                             Adjustment adjustment);

// Ascending average ranks (smallest value gets rank 1; ties averaged).
std::vector<double> average_ranks(std::span<const double> values);

// Within-row descending ranks (highest score gets rank 1); orchestration
// helper for turning score columns into Friedman input.
std::vector<std::vector<double>> rank_rows_descending(
    const std::vector<std::vector<double>>& scores);

// Special functions, exposed for accuracy tests.
double normal_cdf(double z);
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
double chi_square_sf(double x, double df);
double regularized_incomplete_beta(double a, double b, double x);
double students_t_two_sided_p(double t, double df);

}  // namespace dps::stats
