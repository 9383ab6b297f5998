#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ascd/probability_tree.hpp"
#include "ascd/rng.hpp"
#include "ascd/sampling.hpp"

using namespace ascd;

namespace {

// Upper 0.001 quantile of chi-square with k dof (Wilson-Hilferty).
double chi2_crit(double k) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

double chi2_stat(const std::vector<double>& counts, const std::vector<double>& expected) {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (expected[i] > 0.0) s += (counts[i] - expected[i]) * (counts[i] - expected[i]) / expected[i];
  return s;
}

}  // namespace

TEST(ProbabilityTree, SamplesMatchWeightsChiSquare) {
  const std::vector<double> w{5.0, 1.0, 0.0, 3.0, 0.5, 2.5, 8.0};
  ProbabilityTree t(w);
  Rng rng(11);
  const int N = 200000;
  std::vector<double> counts(w.size(), 0.0), expected(w.size());
  for (int k = 0; k < N; ++k) counts[t.sample(rng)] += 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) expected[i] = N * w[i] / 20.0;
  EXPECT_EQ(counts[2], 0.0);
  EXPECT_LT(chi2_stat(counts, expected), chi2_crit(5.0));
}

TEST(ProbabilityTree, UpdatesKeepSumsConsistent) {
  Rng rng(12);
  std::vector<double> w(13);
  for (auto& x : w) x = rng.uniform() + 0.01;
  ProbabilityTree t(w);
  for (int k = 0; k < 200; ++k) {
    const auto i = rng.index(w.size());
    w[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    if (std::accumulate(w.begin(), w.end(), 0.0) == 0.0) w[i] = 1.0;
    t.update(i, w[i]);
    EXPECT_NEAR(t.total(), std::accumulate(w.begin(), w.end(), 0.0), 1e-12);
    EXPECT_EQ(t.weight(i), w[i]);
  }
  const int N = 100000;
  std::vector<double> counts(w.size(), 0.0), expected(w.size());
  for (int k = 0; k < N; ++k) counts[t.sample(rng)] += 1.0;
  const double tot = t.total();
  double dof = -1.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    expected[i] = N * w[i] / tot;
    if (w[i] > 0.0) dof += 1.0;
    else EXPECT_EQ(counts[i], 0.0);
  }
  EXPECT_LT(chi2_stat(counts, expected), chi2_crit(dof));
}

TEST(ProbabilityTree, UpdateCostIsLogarithmic) {
  ProbabilityTree t(std::vector<double>(1024, 1.0));
  const auto before = t.operations();
  t.update(17, 2.0);
  EXPECT_EQ(t.operations() - before, 10u);
  Rng rng(1);
  const auto b2 = t.operations();
  t.sample(rng);
  EXPECT_EQ(t.operations() - b2, 10u);
}

TEST(ProbabilityTree, RejectsBadWeights) {
  EXPECT_THROW(ProbabilityTree(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(ProbabilityTree(std::vector<double>{0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(ProbabilityTree(std::vector<double>{1.0, -1.0}), InvalidArgument);
  ProbabilityTree t(std::vector<double>{1.0, 0.0});
  EXPECT_THROW(t.update(0, 0.0), InvalidArgument);
}

TEST(ProbabilityTree, SingleLeaf) {
  ProbabilityTree t(std::vector<double>{2.0});
  Rng rng(3);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(t.sample(rng), 0u);
}

TEST(ImportanceProbs, SmallExample) {
  const std::vector<double> u{1.0, 3.0};
  const auto p = importance_probs(u, 2.0);
  EXPECT_DOUBLE_EQ(p[0], 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(p[1], 5.0 / 8.0);
  const auto q = importance_probs(std::vector<double>(5, 2.0), 1.0);
  for (double x : q) EXPECT_DOUBLE_EQ(x, 0.2);
  EXPECT_THROW(importance_probs(u, 0.0), InvalidArgument);
}

TEST(AdaptiveProbs, ProportionalToResidueTimesRoot) {
  const std::vector<double> k{1.0, -2.0, 0.0}, v{3.0, 0.0, 5.0};
  const auto p = adasdca_probs(k, v, 1.0);
  const double a = 2.0, b = 2.0;  // 1*sqrt(4), 2*sqrt(1)
  EXPECT_DOUBLE_EQ(p[0], a / (a + b));
  EXPECT_DOUBLE_EQ(p[1], b / (a + b));
  EXPECT_DOUBLE_EQ(p[2], 0.0);
  EXPECT_THROW(adasdca_probs(std::vector<double>{0.0, 0.0}, v, 1.0), InvalidArgument);
}

TEST(AdaptiveProbs, ThetaIsMaximizedByAdaptiveProbs) {
  Rng rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> k(6), v(6);
    for (auto& x : k) x = rng.normal();
    for (auto& x : v) x = 3.0 * rng.uniform();
    const double nlg = 0.5;
    const double best = theta_kappa_p(k, adasdca_probs(k, v, nlg), v, nlg);
    for (int t = 0; t < 50; ++t) {
      std::vector<double> p(6);
      double s = 0.0;
      for (auto& x : p) s += (x = rng.uniform() + 1e-3);
      for (auto& x : p) x /= s;
      EXPECT_LE(theta_kappa_p(k, p, v, nlg), best * (1.0 + 1e-12));
    }
  }
}

TEST(Partitions, RandomBucketsAreBalancedAndCovering) {
  Rng rng(5);
  for (std::size_t tau : {1u, 2u, 3u, 7u, 10u}) {
    const auto B = random_buckets(10, tau, rng);
    EXPECT_NO_THROW(B.validate());
    EXPECT_EQ(B.size(), tau);
    std::size_t lo = 100, hi = 0;
    for (const auto& g : B.groups) {
      lo = std::min(lo, g.size());
      hi = std::max(hi, g.size());
    }
    EXPECT_LE(hi - lo, 1u);
  }
  EXPECT_THROW(random_buckets(3, 4, rng), InvalidArgument);
}

TEST(Partitions, NaiveChunksRespectLoadCap) {
  const std::vector<std::size_t> nnz{3, 1, 1, 5, 2, 2, 1, 4, 1, 1};
  const auto G = naive_chunks(nnz);
  EXPECT_NO_THROW(G.validate());
  for (const auto& g : G.groups) {
    std::size_t load = 0;
    for (auto j : g) load += nnz[j];
    EXPECT_LE(load, 5u);
    for (std::size_t k = 1; k < g.size(); ++k) EXPECT_EQ(g[k], g[k - 1] + 1);
  }
  EXPECT_THROW(naive_chunks(std::vector<std::size_t>{1, 0}), InvalidArgument);
}

TEST(Sampling, ValidationCatchesBadSpecs) {
  EXPECT_THROW(Sampling::serial({0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(Sampling::tau_nice(5, 6), InvalidArgument);
  Partition B{4, {{0, 1}, {2, 3}}};
  EXPECT_THROW(Sampling::bucket(B, {0.5, 0.5, 0.3, 0.3}), InvalidArgument);
  Partition bad{4, {{0, 1}, {1, 3}}};
  EXPECT_THROW(bad.validate(), InvalidArgument);
  EXPECT_THROW(Sampling::chunked(B, 3), InvalidArgument);
}

TEST(Sampling, EmpiricalMarginalsMatch) {
  Rng rng(6);
  Partition B{7, {{0, 3, 5}, {1, 2}, {4, 6}}};
  std::vector<Sampling> ss{Sampling::serial({0.1, 0.2, 0.05, 0.15, 0.2, 0.2, 0.1}), Sampling::tau_nice(7, 3),
                           Sampling::bucket(B, {0.2, 0.5, 0.5, 0.3, 0.9, 0.5, 0.1}),
                           Sampling::chunked(Partition{7, {{0, 1}, {2}, {3, 4, 5}, {6}}}, 2)};
  for (const auto& s : ss) {
    BlockSampler bs(s);
    const auto q = s.marginals();
    std::vector<double> counts(7, 0.0);
    const int N = 40000;
    std::vector<std::size_t> S;
    for (int k = 0; k < N; ++k) {
      bs.draw(rng, S);
      EXPECT_TRUE(std::is_sorted(S.begin(), S.end()));
      EXPECT_EQ(std::set<std::size_t>(S.begin(), S.end()).size(), S.size());
      for (auto j : S) counts[j] += 1.0;
    }
    for (std::size_t j = 0; j < 7; ++j) {
      const double sd = std::sqrt(N * q[j] * (1.0 - q[j]));
      EXPECT_NEAR(counts[j], N * q[j], 4.5 * sd + 1.0) << to_string(s.rule) << " j=" << j;
    }
  }
}

TEST(Sampling, TauNiceSubsetsAreUniform) {
  Rng rng(7);
  BlockSampler bs(Sampling::tau_nice(5, 2));
  std::map<std::vector<std::size_t>, double> counts;
  const int N = 50000;
  std::vector<std::size_t> S;
  for (int k = 0; k < N; ++k) {
    bs.draw(rng, S);
    ASSERT_EQ(S.size(), 2u);
    counts[S] += 1.0;
  }
  ASSERT_EQ(counts.size(), 10u);
  std::vector<double> c, e;
  for (const auto& [k, v] : counts) {
    c.push_back(v);
    e.push_back(N / 10.0);
  }
  EXPECT_LT(chi2_stat(c, e), chi2_crit(9.0));
}

TEST(Sampling, BucketDrawsOnePerBucketAndChunkedReportsGroups) {
  Rng rng(8);
  Partition B{6, {{0, 4}, {1, 2, 5}, {3}}};
  BlockSampler bs(Sampling::bucket(B, {0.5, 0.2, 0.3, 1.0, 0.5, 0.5}));
  const auto owner = B.group_of();
  std::vector<std::size_t> S;
  for (int k = 0; k < 1000; ++k) {
    bs.draw(rng, S);
    ASSERT_EQ(S.size(), 3u);
    std::set<std::size_t> gs;
    for (auto j : S) gs.insert(owner[j]);
    EXPECT_EQ(gs.size(), 3u);
  }
  Partition G{6, {{0, 1}, {2, 3, 4}, {5}}};
  BlockSampler cs(Sampling::chunked(G, 2));
  std::vector<std::size_t> groups;
  for (int k = 0; k < 200; ++k) {
    cs.draw(rng, S, &groups);
    ASSERT_EQ(groups.size(), 2u);
    std::size_t expect = 0;
    for (auto g : groups) expect += G.groups[g].size();
    EXPECT_EQ(S.size(), expect);
  }
}

TEST(Sampling, ExpectedSizeMatchesRule) {
  EXPECT_DOUBLE_EQ(Sampling::tau_nice(10, 4).expected_size(), 4.0);
  EXPECT_NEAR(Sampling::uniform_serial(9).expected_size(), 1.0, 1e-15);
  Partition B{4, {{0, 1}, {2, 3}}};
  EXPECT_DOUBLE_EQ(Sampling::bucket(B, {0.5, 0.5, 0.5, 0.5}).expected_size(), 2.0);
}

TEST(Greedy, TiesGoToLowestIndex) {
  const std::vector<double> g{1.0, -2.0, 2.0, 0.5}, m{1.0, 1.0, 1.0, 0.01};
  EXPECT_EQ(greedy_serial(g, m), 3u);
  EXPECT_EQ(greedy_serial(g, std::vector<double>(4, 1.0)), 1u);
  EXPECT_EQ(top_tau(std::vector<double>{3.0, 5.0, 5.0, 1.0}, 2), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(top_tau(std::vector<double>{1.0, 1.0, 1.0}, 2), (std::vector<std::size_t>{0, 1}));
}
