#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "qgeval/random.hpp"
#include "qgeval/stats.hpp"
#include "support.hpp"

using namespace qgeval;
using namespace qgeval::stats;

namespace {

std::vector<double> vec(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

PairedSample paired(const std::vector<double>& x, const std::vector<double>& y) {
  PairedSample s;
  for (std::size_t i = 0; i < x.size(); ++i) s.pairs.emplace_back(x[i], y[i]);
  return s;
}

void expect_three_ways(const nlohmann::json& o, const std::function<TestResult(Alternative)>& run, double tol) {
  EXPECT_NEAR(run(Alternative::greater).p_value, o["greater"].get<double>(), tol);
  EXPECT_NEAR(run(Alternative::less).p_value, o["less"].get<double>(), tol);
  EXPECT_NEAR(run(Alternative::two_sided).p_value, o["two-sided"].get<double>(), tol);
}

}  // namespace

TEST(Distributions, NormalCdfOracle) {
  for (const auto& row : fixture::oracle("stats")["normal_cdf"]) {
    const double z = row[0];
    const double want = row[1];
    EXPECT_NEAR(normal_cdf(z), want, 1e-15 + 1e-13 * want) << z;
  }
}

TEST(Distributions, StudentTOracle) {
  for (const auto& row : fixture::oracle("stats")["t_cdf"]) {
    const double t = row[0];
    const double df = row[1];
    EXPECT_NEAR(t_cdf(t, df), row[2].get<double>(), 1e-12) << t << " df=" << df;
    EXPECT_NEAR(t_sf(t, df), 1.0 - row[2].get<double>(), 1e-12);
  }
}

TEST(Rank, Midranks) {
  const std::vector<double> v{10, 20, 20, 5, 20};
  EXPECT_EQ(rank_with_ties(v), (std::vector<double>{2, 4, 4, 1, 4}));
  EXPECT_DOUBLE_EQ(tie_term(v), 24.0);
  const std::vector<double> none{3, 1, 2};
  EXPECT_DOUBLE_EQ(tie_term(none), 0.0);
}

TEST(RankSum, NormalApproxOracle) {
  const auto o = fixture::oracle("stats")["rank_sum_gauss30"];
  const auto x = vec(o["x"]);
  const auto y = vec(o["y"]);
  const auto r = wilcoxon_rank_sum(x, y);
  EXPECT_EQ(r.method, Method::normal_approx);
  EXPECT_DOUBLE_EQ(r.statistic, o["u_x"].get<double>());
  expect_three_ways(o, [&](Alternative a) { return wilcoxon_rank_sum(x, y, a); }, 1e-12);
}

TEST(RankSum, TiesOracle) {
  const auto o = fixture::oracle("stats")["rank_sum_ties"];
  const auto x = vec(o["x"]);
  const auto y = vec(o["y"]);
  expect_three_ways(o, [&](Alternative a) { return wilcoxon_rank_sum(x, y, a); }, 1e-12);
}

TEST(RankSum, ExactOracle) {
  const auto o = fixture::oracle("stats")["rank_sum_exact"];
  const auto x = vec(o["x"]);
  const auto y = vec(o["y"]);
  EXPECT_EQ(wilcoxon_rank_sum(x, y).method, Method::exact);
  expect_three_ways(o, [&](Alternative a) { return wilcoxon_rank_sum(x, y, a); }, 1e-14);
}

TEST(RankSum, SmallestSeparatedSamples) {
  const std::vector<double> x{4, 5, 6};
  const std::vector<double> y{1, 2, 3};
  const auto r = wilcoxon_rank_sum(x, y);
  EXPECT_EQ(r.method, Method::exact);
  EXPECT_DOUBLE_EQ(r.p_value, 0.05);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(x, y, Alternative::two_sided).p_value, 0.1);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(x, y, Alternative::less).p_value, 1.0);
}

TEST(RankSum, ExactMatchesEnumeration) {
  // Every split of 1..n into groups of size k, compared with direct counting.
  for (std::size_t n = 2; n <= 8; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      std::vector<int> mask(n, 0);
      std::fill(mask.end() - static_cast<long>(k), mask.end(), 1);
      std::vector<double> sums;
      do {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (mask[i]) s += static_cast<double>(i + 1);
        sums.push_back(s);
      } while (std::next_permutation(mask.begin(), mask.end()));
      const double total = static_cast<double>(sums.size());
      for (double obs : sums) {
        std::vector<double> x;
        std::vector<double> y;
        // Rebuild an assignment realising the observed sum.
        std::fill(mask.begin(), mask.end(), 0);
        std::fill(mask.end() - static_cast<long>(k), mask.end(), 1);
        do {
          double s = 0;
          for (std::size_t i = 0; i < n; ++i)
            if (mask[i]) s += static_cast<double>(i + 1);
          if (s == obs) break;
        } while (std::next_permutation(mask.begin(), mask.end()));
        for (std::size_t i = 0; i < n; ++i) (mask[i] ? x : y).push_back(static_cast<double>(i + 1));
        const double ge = std::count_if(sums.begin(), sums.end(), [&](double s) { return s >= obs; }) / total;
        const double le = std::count_if(sums.begin(), sums.end(), [&](double s) { return s <= obs; }) / total;
        EXPECT_NEAR(wilcoxon_rank_sum(x, y, Alternative::greater).p_value, ge, 1e-12);
        EXPECT_NEAR(wilcoxon_rank_sum(x, y, Alternative::less).p_value, le, 1e-12);
        EXPECT_NEAR(wilcoxon_rank_sum(x, y, Alternative::two_sided).p_value, std::min(1.0, 2 * std::min(ge, le)),
                    1e-12);
      }
    }
  }
}

TEST(RankSum, Validation) {
  const std::vector<double> empty;
  const std::vector<double> one{1.0};
  EXPECT_THROW(wilcoxon_rank_sum(empty, one), InvalidArgument);
}

TEST(SignedRank, NormalApproxOracle) {
  const auto o = fixture::oracle("stats")["signed_rank_25"];
  const auto s = paired(vec(o["x"]), vec(o["y"]));
  const auto r = wilcoxon_signed_rank(s);
  EXPECT_EQ(r.method, Method::normal_approx);
  EXPECT_DOUBLE_EQ(r.statistic, o["w_plus"].get<double>());
  expect_three_ways(o, [&](Alternative a) { return wilcoxon_signed_rank(s, a); }, 1e-12);
}

TEST(SignedRank, ExactOracle) {
  const auto o = fixture::oracle("stats")["signed_rank_exact"];
  const auto s = paired(vec(o["x"]), vec(o["y"]));
  EXPECT_EQ(wilcoxon_signed_rank(s).method, Method::exact);
  expect_three_ways(o, [&](Alternative a) { return wilcoxon_signed_rank(s, a); }, 1e-14);
}

TEST(SignedRank, FiveAllPositive) {
  const auto s = paired({0, 0, 0, 0, 0}, {1, 2, 3, 4, 5});
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(s).p_value, 0.03125);
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(s, Alternative::two_sided).p_value, 0.0625);
}

TEST(SignedRank, ExactMatchesEnumeration) {
  for (std::size_t n = 1; n <= 10; ++n) {
    const std::size_t patterns = std::size_t{1} << n;
    std::vector<double> w(patterns);
    for (std::size_t m = 0; m < patterns; ++m)
      for (std::size_t i = 0; i < n; ++i)
        if (m >> i & 1) w[m] += static_cast<double>(i + 1);
    for (std::size_t m = 0; m < patterns; ++m) {
      PairedSample s;
      for (std::size_t i = 0; i < n; ++i) {
        const double mag = static_cast<double>(i + 1);
        s.pairs.emplace_back(0.0, (m >> i & 1) ? mag : -mag);
      }
      const double ge = std::count_if(w.begin(), w.end(), [&](double v) { return v >= w[m]; }) /
                        static_cast<double>(patterns);
      const double le = std::count_if(w.begin(), w.end(), [&](double v) { return v <= w[m]; }) /
                        static_cast<double>(patterns);
      EXPECT_NEAR(wilcoxon_signed_rank(s, Alternative::greater).p_value, ge, 1e-12);
      EXPECT_NEAR(wilcoxon_signed_rank(s, Alternative::less).p_value, le, 1e-12);
    }
  }
}

TEST(SignedRank, ZeroDifferences) {
  EXPECT_THROW(wilcoxon_signed_rank(paired({1, 2}, {1, 2})), DegenerateInput);
  // Zeros are dropped before ranking.
  const auto with_zero = wilcoxon_signed_rank(paired({0, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(with_zero.n1, 5u);
  EXPECT_DOUBLE_EQ(with_zero.p_value, 0.03125);
}

TEST(Correlation, Oracle) {
  for (const auto& c : fixture::oracle("stats")["correlations"]) {
    const auto x = vec(c["x"]);
    const auto y = vec(c["y"]);
    EXPECT_NEAR(pearson(x, y), c["pearson"].get<double>(), 1e-12);
    EXPECT_NEAR(spearman(x, y), c["spearman"].get<double>(), 1e-12);
    EXPECT_NEAR(kendall_tau(x, y), c["kendall"].get<double>(), 1e-12);
  }
}

TEST(Correlation, KendallMatchesPairCounting) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.index(10);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.index(n + 5));
      y[i] = static_cast<double>(rng.index(n + 5));
    }
    double nc = 0, nd = 0, tx = 0, ty = 0, n0 = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        ++n0;
        const double s = (x[i] - x[j]) * (y[i] - y[j]);
        if (s > 0) ++nc;
        if (s < 0) ++nd;
        if (x[i] == x[j]) ++tx;
        if (y[i] == y[j]) ++ty;
      }
    if (tx == n0 || ty == n0) continue;
    EXPECT_NEAR(kendall_tau(x, y), (nc - nd) / std::sqrt((n0 - tx) * (n0 - ty)), 1e-12);
  }
}

TEST(Correlation, Degenerate) {
  const std::vector<double> c{1, 1, 1};
  const std::vector<double> v{1, 2, 3};
  EXPECT_THROW(pearson(c, v), DegenerateInput);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_THROW(pearson(v, std::vector<double>{1, 2}), InvalidArgument);
  EXPECT_DOUBLE_EQ(pearson(v, v), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(v, std::vector<double>{3, 2, 1}), -1.0);
}

TEST(Williams, Oracle) {
  for (const auto& c : fixture::oracle("stats")["williams"]) {
    const auto r = williams_test(c["r12"], c["r13"], c["r23"], c["n"].get<std::size_t>());
    EXPECT_NEAR(r.statistic, c["t"].get<double>(), 1e-10);
    EXPECT_NEAR(r.p_value, c["p"].get<double>(), 1e-12 + 1e-9 * c["p"].get<double>());
  }
}

TEST(Williams, EqualCorrelations) {
  EXPECT_DOUBLE_EQ(williams_test(0.6, 0.7, 0.7, 20).p_value, 0.5);
  EXPECT_NEAR(williams_test(0.6, 0.7, 0.7, 20, Alternative::two_sided).p_value, 1.0, 1e-15);
}

TEST(Williams, Symmetry) {
  const auto a = williams_test(0.4, 0.8, 0.5, 30, Alternative::greater);
  const auto b = williams_test(0.4, 0.5, 0.8, 30, Alternative::less);
  EXPECT_NEAR(a.p_value, b.p_value, 1e-14);
  EXPECT_NEAR(a.statistic, -b.statistic, 1e-14);
}

TEST(Williams, Validation) {
  EXPECT_THROW(williams_test(1.0, 0.5, 0.5, 10), InvalidArgument);
  EXPECT_THROW(williams_test(0.5, 0.5, 0.5, 3), InvalidArgument);
  EXPECT_THROW(williams_test(-0.99, 0.99, 0.99, 10), InvalidArgument);
}

TEST(Alternatives, Parse) {
  EXPECT_EQ(parse_alternative("two-sided"), Alternative::two_sided);
  EXPECT_EQ(parse_alternative("less"), Alternative::less);
  EXPECT_THROW(parse_alternative("bigger"), InvalidArgument);
}
