#include "doctest.h"

#include <cmath>
#include <vector>

#include "dpslab/stats.hpp"

using namespace dps::stats;

namespace {

// Literal sign-enumeration oracle for the exact two-sided Wilcoxon p-value,
// feasible for n <= 12.
double enumeration_p(const std::vector<double>& diffs) {
  std::vector<double> nonzero;
  for (double d : diffs)
    if (d != 0.0) nonzero.push_back(d);
  size_t n = nonzero.size();
  std::vector<double> magnitudes(n);
  for (size_t i = 0; i < n; ++i) magnitudes[i] = std::fabs(nonzero[i]);
  std::vector<double> ranks = average_ranks(magnitudes);
  double total = 0.0;
  for (double r : ranks) total += r;
  double w_plus = 0.0;
  for (size_t i = 0; i < n; ++i)
    if (nonzero[i] > 0.0) w_plus += ranks[i];
  double w = std::min(w_plus, total - w_plus);
  size_t count = 0;
  size_t assignments = size_t{1} << n;
  for (size_t mask = 0; mask < assignments; ++mask) {
    double wp = 0.0;
    for (size_t i = 0; i < n; ++i)
      if (mask & (size_t{1} << i)) wp += ranks[i];
    if (std::min(wp, total - wp) <= w + 1e-12) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(assignments);
}

uint64_t lcg(uint64_t& state) {
  state = state * 6364136223846793005ULL + 1442695040888963407ULL;
  return state >> 33;
}

std::vector<double> random_diffs(uint64_t& state, int n, bool with_ties) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    int magnitude = with_ties ? 1 + static_cast<int>(lcg(state) % 4)
                              : 1 + static_cast<int>(lcg(state) % 1000);
    double sign = (lcg(state) % 2 == 0) ? 1.0 : -1.0;
    out.push_back(sign * magnitude);
  }
  // tie-free mode must actually be tie-free
  if (!with_ties) {
    for (size_t i = 0; i < out.size(); ++i) out[i] += (out[i] > 0 ? 1 : -1) * i * 0.001;
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("stats");

TEST_CASE("special functions match tabulated values to 1e-10") {
  CHECK(std::fabs(chi_square_sf(10.0, 2) - 6.737946999085468e-03) < 1e-10);
  CHECK(std::fabs(chi_square_sf(8.4, 2) - 1.499557682047771e-02) < 1e-10);
  CHECK(std::fabs(chi_square_sf(3.841458820694124, 1) - 0.05) < 1e-10);
  CHECK(std::fabs(chi_square_sf(15.086272469388987, 5) - 0.01) < 1e-10);
  CHECK(std::fabs(chi_square_sf(1.0, 3) - 8.012519569012009e-01) < 1e-10);
  CHECK(std::fabs(chi_square_sf(0.5, 4) - 9.735009788392561e-01) < 1e-10);
  CHECK(std::fabs(chi_square_sf(23.685, 14) - 4.999712466122488e-02) < 1e-10);
  CHECK(chi_square_sf(-1.0, 3) == 1.0);

  CHECK(std::fabs(students_t_two_sided_p(2.0, 10) - 7.338803477074039e-02) < 1e-10);
  CHECK(std::fabs(students_t_two_sided_p(1.0, 5) - 3.632174676491225e-01) < 1e-10);
  CHECK(std::fabs(students_t_two_sided_p(2.228138851986273, 10) - 0.05) < 1e-10);
  CHECK(std::fabs(students_t_two_sided_p(3.5, 148) - 6.150234044948636e-04) < 1e-10);

  CHECK(std::fabs(normal_cdf(-1.959963984540054) - 0.025) < 1e-12);
  CHECK(std::fabs(normal_cdf(-1.0) - 1.586552539314571e-01) < 1e-12);
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));

  CHECK(std::fabs(regularized_gamma_p(1.0, 1.0) + regularized_gamma_q(1.0, 1.0) -
                  1.0) < 1e-14);
  CHECK_THROWS_AS(regularized_gamma_p(-1.0, 1.0), OutOfRange);
}

TEST_CASE("wilcoxon hand examples") {
  StatResult ascending = wilcoxon_signed_rank_diffs(
      std::vector<double>{1, 2, 3, 4, 5});
  CHECK(ascending.statistic == doctest::Approx(0.0));
  CHECK(ascending.p_value == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(ascending.n == 5);
  CHECK(ascending.median_difference == doctest::Approx(3.0));

  StatResult two = wilcoxon_signed_rank_diffs(std::vector<double>{2, -1});
  CHECK(two.statistic == doctest::Approx(1.0));
  CHECK(two.p_value == doctest::Approx(1.0));

  CHECK_THROWS_AS(wilcoxon_signed_rank_diffs(std::vector<double>{0, 0, 0}),
                  AllZeroDifferences);

  // scipy cross-check: diffs [3,-1,2,-4,5,-6,7,8,-9,10] -> W=20, p=0.4921875
  StatResult mixed = wilcoxon_signed_rank_diffs(
      std::vector<double>{3, -1, 2, -4, 5, -6, 7, 8, -9, 10});
  CHECK(mixed.statistic == doctest::Approx(20.0));
  CHECK(mixed.p_value == doctest::Approx(0.4921875).epsilon(1e-12));

  // zeros dropped, median over all original pairs: diffs [0, 2, 3, -2]
  std::vector<std::pair<double, double>> pairs = {{1, 1}, {3, 1}, {5, 2}, {2, 4}};
  StatResult from_pairs = wilcoxon_signed_rank(pairs);
  CHECK(from_pairs.n == 3);
  CHECK(from_pairs.median_difference == doctest::Approx(1.0));
}

TEST_CASE("exact p matches the sign-enumeration oracle for all n <= 12") {
  uint64_t state = 99;
  for (int n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 8; ++trial) {
      for (bool with_ties : {false, true}) {
        std::vector<double> diffs = random_diffs(state, n, with_ties);
        StatResult got = wilcoxon_signed_rank_diffs(diffs);
        double want = enumeration_p(diffs);
        CHECK(std::fabs(got.p_value - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("normal approximation is close to exact for 13 <= n <= 25") {
  uint64_t state = 123;
  for (int n = 13; n <= 25; n += 3) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<double> diffs = random_diffs(state, n, false);
      StatResult exact = wilcoxon_signed_rank_diffs(diffs);  // exact regime
      // recompute the approximation from the reported z (via effect size)
      double z = *exact.effect_size * std::sqrt(static_cast<double>(exact.n));
      double approx_p = std::min(1.0, 2.0 * normal_cdf(-z));
      CHECK(std::fabs(approx_p - exact.p_value) < 0.01);
    }
  }
}

TEST_CASE("exact/approximate crossover sits at n = 25") {
  uint64_t state = 9;
  // n = 25: the p-value comes from the signed-rank distribution, so
  // p * 2^25 counts whole sign assignments.
  std::vector<double> at_25 = random_diffs(state, 25, false);
  StatResult exact = wilcoxon_signed_rank_diffs(at_25);
  double scaled = exact.p_value * std::ldexp(1.0, 25);
  CHECK(std::fabs(scaled - std::round(scaled)) < 1e-6);

  // n = 26: the p-value equals the normal approximation derived from the
  // reported z (recovered via the effect size).
  std::vector<double> at_26 = random_diffs(state, 26, false);
  StatResult approx = wilcoxon_signed_rank_diffs(at_26);
  double z = *approx.effect_size * std::sqrt(26.0);
  CHECK(approx.p_value ==
        doctest::Approx(std::min(1.0, 2.0 * normal_cdf(-z))).epsilon(1e-12));
}

TEST_CASE("large-sample path uses the normal approximation") {
  std::vector<double> diffs;
  uint64_t state = 5;
  for (int i = 0; i < 60; ++i)
    diffs.push_back((lcg(state) % 2 ? 1.0 : -1.0) * (1.0 + (lcg(state) % 50)) +
                    i * 1e-6);
  StatResult r = wilcoxon_signed_rank_diffs(diffs);
  CHECK(r.n == 60);
  CHECK(r.p_value >= 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK(r.effect_size.has_value());
}

TEST_CASE("friedman identical rankings") {
  std::vector<std::vector<double>> all_same(5, {1, 2, 3});
  StatResult r = friedman(all_same);
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(*r.kendall_w == doctest::Approx(1.0));
  CHECK(std::fabs(r.p_value - 6.737946999085468e-03) < 1e-10);
}

TEST_CASE("friedman balanced matrix") {
  std::vector<std::vector<double>> balanced = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
  StatResult r = friedman(balanced);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(*r.kendall_w == doctest::Approx(0.0));
}

TEST_CASE("friedman scipy cross-check") {
  // treatments [1,1,1,2], [2,2,2,1], [3,3,3,3] -> chi2 = 6.5
  std::vector<std::vector<double>> rows = {
      {1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {2, 1, 3}};
  StatResult r = friedman(rows);
  CHECK(r.statistic == doctest::Approx(6.5).epsilon(1e-12));
  CHECK(std::fabs(r.p_value - 0.03877420783172202) < 1e-10);
}

TEST_CASE("friedman with average-ranked ties") {
  std::vector<std::vector<double>> rows = {{1.5, 1.5, 3}, {1, 2, 3}, {1, 3, 2}};
  StatResult r = friedman(rows);
  CHECK(r.statistic >= 0.0);
  CHECK(*r.kendall_w >= 0.0);
  CHECK(*r.kendall_w <= 1.0);
}

TEST_CASE("friedman statistic invariant under rank-preserving relabeling") {
  // Ranking scores descending yields the same matrix as ranking their
  // monotone transforms.
  std::vector<std::vector<double>> scores = {
      {0.9, 0.5, 0.1}, {0.8, 0.2, 0.4}, {0.7, 0.6, 0.3}, {0.95, 0.15, 0.55}};
  std::vector<std::vector<double>> transformed;
  for (const auto& row : scores) {
    std::vector<double> t;
    for (double v : row) t.push_back(std::exp(5.0 * v) + 3.0);
    transformed.push_back(t);
  }
  StatResult a = friedman(rank_rows_descending(scores));
  StatResult b = friedman(rank_rows_descending(transformed));
  CHECK(a.statistic == doctest::Approx(b.statistic));
}

TEST_CASE("friedman degenerate inputs") {
  CHECK_THROWS_AS(friedman({{1, 2, 3}}), DegenerateMatrix);
  CHECK_THROWS_AS(friedman({{1}, {1}}), DegenerateMatrix);
  CHECK_THROWS_AS(friedman({{1, 2, 3}, {4, 5, 6}}), DegenerateMatrix);
  // fully tied rows carry no information
  StatResult tied = friedman({{2, 2, 2}, {2, 2, 2}});
  CHECK(tied.statistic == doctest::Approx(0.0));
  CHECK(*tied.kendall_w == doctest::Approx(0.0));
  CHECK(tied.p_value == doctest::Approx(1.0));
}

TEST_CASE("kendall w from the reference per-criterion outcomes") {
  // Mean ranks computed from the reference five-criterion ranking counts,
  // re-ranked within each criterion.
  struct Row {
    std::array<std::array<int, 3>, 3> counts;  // NLG, LLM, SWUM
    int total;
  };
  const std::vector<Row> rows = {
      {{{{3, 82, 64}, {145, 0, 4}, {1, 67, 81}}}, 149},
      {{{{81, 19, 49}, {67, 10, 72}, {1, 47, 102}}}, 149},
      {{{{5, 102, 43}, {144, 1, 5}, {1, 47, 102}}}, 150},
      {{{{3, 93, 53}, {143, 1, 5}, {3, 55, 91}}}, 149},
      {{{{6, 95, 46}, {133, 1, 13}, {8, 51, 88}}}, 147},
  };
  std::vector<std::vector<double>> matrix;
  for (const Row& row : rows) {
    std::vector<double> means;
    for (int g = 0; g < 3; ++g) {
      double sum = 0.0;
      for (int place = 0; place < 3; ++place)
        sum += static_cast<double>(row.counts[g][place]) * (place + 1);
      means.push_back(sum / row.total);
    }
    matrix.push_back(average_ranks(means));
  }
  StatResult r = friedman(matrix);
  CHECK(*r.kendall_w == doctest::Approx(0.840).epsilon(0.005 / 0.84));
  CHECK(r.statistic == doctest::Approx(8.4).epsilon(1e-12));
}

TEST_CASE("posthoc pairwise tests") {
  std::vector<std::vector<double>> rows(12, {1, 2, 3});
  std::vector<PairwiseResult> results =
      pairwise_posthoc(rows, Adjustment::Bonferroni);
  REQUIRE(results.size() == 3);  // k = 3 -> 3 pairs
  for (const auto& pr : results) {
    CHECK(!pr.skipped);
    REQUIRE(pr.result.adjusted_p.has_value());
    CHECK(*pr.result.adjusted_p >= pr.result.p_value);
    CHECK(*pr.result.adjusted_p <= 1.0);
  }

  // identical columns yield a skipped-pair marker, not a failure
  std::vector<std::vector<double>> with_tie = {{1.5, 1.5, 3}, {1.5, 1.5, 3},
                                               {1.5, 1.5, 3}, {1.5, 1.5, 3}};
  std::vector<PairwiseResult> skipped =
      pairwise_posthoc(with_tie, Adjustment::Bonferroni);
  REQUIRE(skipped.size() == 3);
  CHECK(skipped[0].skipped);  // columns 0 and 1 are identical
  CHECK(!skipped[1].skipped);
  CHECK(!skipped[2].skipped);
}

TEST_CASE("spearman hand values") {
  std::vector<double> x = {1, 2, 3};
  std::vector<double> y_up = {10, 20, 30};
  std::vector<double> y_down = {3, 2, 1};
  CHECK(*spearman(x, y_up).rho == doctest::Approx(1.0));
  CHECK(spearman(x, y_up).p_value == doctest::Approx(0.0));
  CHECK(*spearman(x, y_down).rho == doctest::Approx(-1.0));

  // scipy cross-check with a tie
  std::vector<double> a = {1, 2, 3, 4, 5};
  std::vector<double> b = {5, 6, 7, 8, 7};
  StatResult r = spearman(a, b);
  CHECK(*r.rho == doctest::Approx(0.8207826816681233).epsilon(1e-12));
  CHECK(std::fabs(r.p_value - 0.08858700531354381) < 1e-10);

  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1},
                           std::vector<double>{1, 2, 3}),
                  ConstantInput);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2},
                           std::vector<double>{1, 2}),
                  OutOfRange);
}

TEST_CASE("spearman symmetry and monotone invariance") {
  uint64_t state = 11;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(static_cast<double>(lcg(state) % 100));
      y.push_back(static_cast<double>(lcg(state) % 100));
    }
    StatResult xy = spearman(x, y);
    StatResult yx = spearman(y, x);
    CHECK(*xy.rho == doctest::Approx(*yx.rho).epsilon(1e-12));
    std::vector<double> x_transformed;
    for (double v : x) x_transformed.push_back(std::exp(v / 10.0));
    CHECK(*spearman(x_transformed, y).rho == doctest::Approx(*xy.rho));
  }
}

TEST_CASE("p-value adjustments") {
  std::vector<double> single = {0.05};
  CHECK(adjust_p(single, Adjustment::Bonferroni) == std::vector<double>{0.05});
  CHECK(adjust_p(single, Adjustment::Holm) == std::vector<double>{0.05});

  std::vector<double> two = {0.02, 0.5};
  std::vector<double> bonferroni = adjust_p(two, Adjustment::Bonferroni);
  CHECK(bonferroni[0] == doctest::Approx(0.04));
  CHECK(bonferroni[1] == doctest::Approx(1.0));

  std::vector<double> three = {0.01, 0.04, 0.20};
  std::vector<double> b3 = adjust_p(three, Adjustment::Bonferroni);
  CHECK(b3[0] == doctest::Approx(0.03));
  CHECK(b3[1] == doctest::Approx(0.12));
  CHECK(b3[2] == doctest::Approx(0.60));

  std::vector<double> holm_in = {0.01, 0.02, 0.03};
  std::vector<double> holm = adjust_p(holm_in, Adjustment::Holm);
  CHECK(holm[0] == doctest::Approx(0.03));
  CHECK(holm[1] == doctest::Approx(0.04));
  CHECK(holm[2] == doctest::Approx(0.04));

  CHECK_THROWS_AS(adjust_p(std::vector<double>{1.5}, Adjustment::Bonferroni),
                  OutOfRange);
  CHECK_THROWS_AS(adjust_p(std::vector<double>{-0.1}, Adjustment::Holm),
                  OutOfRange);
}

TEST_CASE("adjusted p-values dominate inputs and stay within [0, 1]") {
  uint64_t state = 77;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> ps;
    int m = 1 + static_cast<int>(lcg(state) % 8);
    for (int i = 0; i < m; ++i)
      ps.push_back(static_cast<double>(lcg(state) % 1000) / 1000.0);
    for (Adjustment method : {Adjustment::Bonferroni, Adjustment::Holm}) {
      std::vector<double> adjusted = adjust_p(ps, method);
      for (size_t i = 0; i < ps.size(); ++i) {
        CHECK(adjusted[i] >= ps[i]);
        CHECK(adjusted[i] <= 1.0);
      }
    }
  }
}

TEST_CASE("average ranks") {
  std::vector<double> values = {10, 20, 20, 30};
  CHECK(average_ranks(values) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
  std::vector<std::vector<double>> ranked =
      rank_rows_descending({{0.9, 0.1, 0.5}});
  CHECK(ranked[0] == std::vector<double>{1.0, 3.0, 2.0});
}

TEST_SUITE_END();
