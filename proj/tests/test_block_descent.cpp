#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ascd/block_descent.hpp"

using namespace ascd;

namespace {

Mat random_pd(std::size_t n, Rng& rng, double shift = 0.1) {
  Mat B(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    for (Eigen::Index i = 0; i < B.rows(); ++i) B(i, j) = rng.normal();
  return B.transpose() * B / static_cast<double>(n) + shift * Mat::Identity(B.rows(), B.cols());
}

Vec random_vec(std::size_t n, Rng& rng, double scale = 1.0) {
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = scale * rng.normal();
  return v;
}

// f = 0.5 x'Qx - q'x with smoothness matrix M.
Objective quadratic(const Mat& Q, const Vec& q, const Mat& M, Regularizer g = Regularizer::none()) {
  Objective o;
  o.name = "q";
  o.dim = static_cast<std::size_t>(Q.rows());
  o.f = [Q, q](const Vec& x) { return 0.5 * x.dot(Q * x) - q.dot(x); };
  o.grad = [Q, q](const Vec& x) -> Vec { return Q * x - q; };
  o.M = M;
  o.g = g;
  return o;
}

template <class F>
double grid_min(F&& h, double lo, double hi) {
  double best_x = lo, best = h(lo);
  for (int round = 0; round < 6; ++round) {
    const int N = 2000;
    const double step = (hi - lo) / N;
    for (int k = 0; k <= N; ++k) {
      const double x = lo + k * step;
      const double v = h(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    lo = best_x - 2 * step;
    hi = best_x + 2 * step;
  }
  return best;
}

std::vector<BlockRule> all_rules(std::size_t tau) {
  return {BlockRule::full_batch(),    BlockRule::serial_uniform(), BlockRule::serial_importance(),
          BlockRule::serial_greedy(), BlockRule::tau_nice(tau),     BlockRule::greedy_minibatch(tau)};
}

}  // namespace

TEST(Forcing, SmoothCaseIsHalfSquaredGradient) {
  Objective o = quadratic(Mat::Identity(2, 2), Vec::Zero(2), Mat::Identity(2, 2));
  Vec g(2);
  g << 3.0, 4.0;
  for (double L : {0.1, 1.0, 7.0}) {
    const auto lam = forcing_lambda_coords(o, Vec::Zero(2), g, L);
    EXPECT_DOUBLE_EQ(lam[0] + lam[1], 12.5);
  }
  Rng rng(1);
  const Mat Q = random_pd(6, rng);
  const Objective q = quadratic(Q, random_vec(6, rng), Q);
  const Vec x = random_vec(6, rng);
  EXPECT_DOUBLE_EQ(forcing_lambda(q, x, 3.0), 0.5 * q.grad(x).squaredNorm());
}

TEST(Forcing, L1DeadZone) {
  Objective o = quadratic(Mat::Identity(1, 1), Vec::Zero(1), Mat::Identity(1, 1), Regularizer::l1(1.0));
  Vec g(1);
  g << 0.5;
  EXPECT_EQ(forcing_lambda_coords(o, Vec::Zero(1), g, 1.0)[0], 0.0);
}

TEST(Forcing, NonsmoothMatchesGridOracle) {
  Rng rng(2);
  for (const auto& reg : {Regularizer::l1(0.3), Regularizer::l2(0.7), Regularizer::box(1.5)}) {
    const Mat Q = random_pd(5, rng);
    const Objective o = quadratic(Q, random_vec(5, rng), Q, reg);
    for (int rep = 0; rep < 20; ++rep) {
      Vec x = random_vec(5, rng);
      if (reg.kind == RegKind::box) x = x.cwiseMax(-1.5).cwiseMin(1.5);
      const double L = 0.5 + 3.0 * rng.uniform();
      const Vec gr = o.grad(x);
      const auto lam = forcing_lambda_coords(o, x, gr, L);
      for (std::size_t i = 0; i < 5; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        auto h = [&](double v) {
          return gr(ii) * v + 0.5 * L * v * v + reg.value_1d(x(ii) + v) - reg.value_1d(x(ii));
        };
        EXPECT_NEAR(lam[i], -L * grid_min(h, -20.0, 20.0), 1e-6);
        EXPECT_GE(lam[i], 0.0);
      }
    }
  }
}

TEST(Forcing, MuExamples) {
  Objective o = quadratic(Mat::Identity(1, 1), Vec::Zero(1), Mat::Identity(1, 1));
  o.f_star = 0.0;
  Vec x(1);
  x << 2.0;
  ASSERT_TRUE(forcing_mu(o, x, 1.0).has_value());
  EXPECT_DOUBLE_EQ(*forcing_mu(o, x, 1.0), 1.0);
  EXPECT_FALSE(forcing_mu(o, Vec::Zero(1), 1.0).has_value());
  o.f_star.reset();
  EXPECT_FALSE(forcing_mu(o, x, 1.0).has_value());
}

TEST(Forcing, MuIsAtMostLInTheSmoothCase) {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat Q = random_pd(6, rng);
    const Vec q = random_vec(6, rng);
    Objective o = quadratic(Q, q, Q);
    o.f_star = -0.5 * q.dot(Q.llt().solve(q));
    const double L = detail::lambda_max(Q);
    for (int k = 0; k < 20; ++k) {
      const auto mu = forcing_mu(o, random_vec(6, rng, 3.0), L);
      ASSERT_TRUE(mu.has_value());
      EXPECT_LE(*mu, L * (1.0 + 1e-12));
    }
  }
}

TEST(Forcing, StronglyConvexLowerBound) {
  Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat Q = random_pd(5, rng, 0.2);
    const Vec q = random_vec(5, rng);
    const double lf = detail::lambda_min(Q);
    const double L = detail::lambda_max(Q);
    for (const double w : {0.0, 0.5}) {
      // g = (w/2)||x||^2 keeps the optimum in closed form
      const Mat H = Q + w * Mat::Identity(5, 5);
      Objective o = quadratic(Q, q, L * Mat::Identity(5, 5), w > 0 ? Regularizer::l2(w) : Regularizer::none());
      const Vec xs = H.llt().solve(q);
      o.f_star = o.F(xs);
      const double lF = lf + w;
      const double bound = std::min(L / 2.0, L * lF / (lF - lf + L));
      for (int k = 0; k < 50; ++k) {
        const auto mu = forcing_mu(o, random_vec(5, rng, 2.0), L);
        ASSERT_TRUE(mu.has_value());
        EXPECT_GE(*mu, bound * (1.0 - 1e-10)) << "w=" << w;
      }
    }
  }
}

TEST(Proportion, Examples) {
  Rng rng(5);
  const Mat I = Mat::Identity(4, 4);
  const Vec g = random_vec(4, rng);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  EXPECT_NEAR(proportion_theta_smooth(I, g, all), 1.0, 1e-15);
  Mat D = Mat::Zero(4, 4);
  D.diagonal() << 1.0, 2.0, 0.5, 4.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const std::vector<std::size_t> S{i};
    EXPECT_NEAR(proportion_theta_smooth(D, g, S), g(ii) * g(ii) / (D(ii, ii) * g.squaredNorm()), 1e-15);
  }
  EXPECT_EQ(proportion_theta_smooth(I, Vec::Zero(4), all), 0.0);
  EXPECT_EQ(proportion_theta_prox(std::vector<double>(4, 0.0), all, 1.0), 0.0);
}

TEST(Proportion, UniformSerialMonteCarloBound) {
  Rng rng(6);
  const Mat M = random_pd(8, rng);
  const Vec g = random_vec(8, rng);
  double mean = 0.0;
  const int N = 10000;
  for (int k = 0; k < N; ++k) {
    const std::vector<std::size_t> S{rng.index(8)};
    mean += proportion_theta_smooth(M, g, S) / N;
  }
  EXPECT_GE(mean, 1.0 / (8.0 * M.diagonal().maxCoeff()));
}

// Rule-specific bounds, as exact expectations over the rule's distribution.
TEST(Proportion, RuleBoundsHoldAtRandomPoints) {
  Rng rng(7);
  const std::size_t n = 7, tau = 3;
  for (int rep = 0; rep < 5; ++rep) {
    const Mat M = random_pd(n, rng);
    Objective o = quadratic(M, random_vec(n, rng), M);
    const double c_full = proportion_constant(o, BlockRule::full_batch());
    const double c_unif = proportion_constant(o, BlockRule::serial_uniform());
    const double c_imp = proportion_constant(o, BlockRule::serial_importance());
    const double c_nice = proportion_constant(o, BlockRule::tau_nice(tau));
    EXPECT_DOUBLE_EQ(c_imp, proportion_constant(o, BlockRule::serial_greedy()));
    EXPECT_DOUBLE_EQ(c_nice, proportion_constant(o, BlockRule::greedy_minibatch(tau)));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int k = 0; k < 100; ++k) {
      const Vec g = random_vec(n, rng);
      EXPECT_GE(proportion_theta_smooth(M, g, all), c_full * (1 - 1e-12));
      double unif = 0.0, imp = 0.0, greedy = 0.0;
      const double tr = M.diagonal().sum();
      for (std::size_t i = 0; i < n; ++i) {
        const std::vector<std::size_t> S{i};
        const double t = proportion_theta_smooth(M, g, S);
        unif += t / static_cast<double>(n);
        imp += M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) / tr * t;
        greedy = std::max(greedy, t);
      }
      EXPECT_GE(unif, c_unif * (1 - 1e-12));
      EXPECT_GE(imp, c_imp * (1 - 1e-12));
      EXPECT_GE(greedy, imp * (1 - 1e-12));
      double nice = 0.0, best = 0.0;
      const double cnt = static_cast<double>(binomial(n, tau));
      for_each_subset(n, tau, [&](const std::vector<std::size_t>& S) {
        const double t = proportion_theta_smooth(M, g, S);
        nice += t / cnt;
        best = std::max(best, t);
      });
      EXPECT_GE(nice, c_nice * (1 - 1e-12));
      EXPECT_GE(best, nice * (1 - 1e-12));
      EXPECT_NEAR(proportion_theta_smooth(M, g, greedy_block_exact(M, g, tau)), best, 1e-14);
    }
  }
}

TEST(Proportion, NonsmoothRuleBounds) {
  Rng rng(8);
  const std::size_t n = 6, tau = 2;
  const Mat M = random_pd(n, rng);
  Objective o = quadratic(M, random_vec(n, rng), M, Regularizer::l1(0.05));
  for (int k = 0; k < 50; ++k) {
    const Vec x = random_vec(n, rng);
    for (const auto& rule : all_rules(tau)) {
      const double L = rule_L(o, rule);
      const auto lam = forcing_lambda_coords(o, x, L);
      if (std::accumulate(lam.begin(), lam.end(), 0.0) == 0.0) continue;
      const double c = proportion_constant(o, rule);
      double expected = 0.0;
      switch (rule.kind) {
        case BlockRuleKind::full_batch: {
          std::vector<std::size_t> all(n);
          std::iota(all.begin(), all.end(), 0);
          expected = proportion_theta_prox(lam, all, L);
          break;
        }
        case BlockRuleKind::serial_greedy:
          expected = proportion_theta_prox(lam, detail::top_indices(lam, 1), L);
          break;
        case BlockRuleKind::greedy_minibatch:
          expected = proportion_theta_prox(lam, detail::top_indices(lam, tau), L);
          break;
        case BlockRuleKind::tau_nice: {
          const double cnt = static_cast<double>(binomial(n, tau));
          for_each_subset(n, tau, [&](const std::vector<std::size_t>& S) {
            expected += proportion_theta_prox(lam, S, L) / cnt;
          });
          break;
        }
        default:
          for (std::size_t i = 0; i < n; ++i)
            expected += proportion_theta_prox(lam, std::vector<std::size_t>{i}, L) / static_cast<double>(n);
      }
      EXPECT_GE(expected, c * (1 - 1e-12)) << to_string(rule.kind);
    }
  }
}

TEST(Proportion, ExpectedBlockInverseEdgeCases) {
  Rng rng(9);
  const Mat M = random_pd(5, rng);
  const Mat E1 = expected_block_inverse(M, 1);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(E1(i, i), 1.0 / (5.0 * M(i, i)), 1e-15);
  EXPECT_NEAR((expected_block_inverse(M, 5) - M.inverse()).norm(), 0.0, 1e-10);
  EXPECT_THROW(expected_block_inverse(M, 0), InvalidArgument);
}

TEST(BlockDescent, FullBatchWithScaledIdentityIsGradientDescent) {
  Rng rng(10);
  const Mat Q = random_pd(5, rng);
  const double L = detail::lambda_max(Q);
  const Objective o = quadratic(Q, random_vec(5, rng), L * Mat::Identity(5, 5));
  BlockOptions opt;
  opt.x0 = random_vec(5, rng);
  opt.budget.max_iterations = 1;
  Rng r(1);
  const auto res = block_descent_run(o, BlockRule::full_batch(), opt, r);
  const Vec expect = opt.x0 - o.grad(opt.x0) / L;
  EXPECT_LE((res.x - expect).norm(), 1e-14 * (1.0 + expect.norm()));
}

TEST(BlockDescent, OneStepLemmaAndMonotonicityForEveryRuleAndObjective) {
  std::vector<Objective> objs;
  {
    TestObjectiveSpec s;
    s.n = 8;
    objs.push_back(make_test_objective(s));
    s.g = Regularizer::l1(0.05);
    Objective o = make_test_objective(s);
    objs.push_back(o);
    TestObjectiveSpec c;
    c.kind = TestObjectiveKind::nonconvex_cosine;
    c.n = 8;
    c.m = 30;
    objs.push_back(make_test_objective(c));
    c.lambda = 1.0 / 60.0;
    objs.push_back(make_test_objective(c));
  }
  objs.push_back(make_test_objective("wpl_product", 1));
  objs.push_back(make_test_objective("wpl_huber", 1));
  objs.push_back(make_test_objective("plateau", 1));
  Rng rng(11);
  for (const auto& o : objs) {
    const std::size_t tau = o.dim >= 4 ? 3 : 1;
    for (const auto& rule : all_rules(tau)) {
      BlockOptions opt;
      opt.x0 = random_vec(o.dim, rng, o.dim <= 2 ? 1.5 : 1.0);
      opt.budget.max_iterations = 200;
      Rng r(3);
      const auto res = block_descent_run(o, rule, opt, r);
      const auto& rows = res.trace.rows;
      EXPECT_LE(res.max_lemma_violation, 1e-9) << o.name << " " << to_string(rule.kind);
      EXPECT_LE(lemma_violation(res.trace), 1e-9) << o.name << " " << to_string(rule.kind);
      for (std::size_t k = 1; k < rows.size(); ++k)
        EXPECT_LE(rows[k].primal, rows[k - 1].primal + 1e-12) << o.name << " " << to_string(rule.kind);
      for (const auto& row : rows) {
        EXPECT_GE(row.lambda, 0.0);
        if (!std::isnan(row.theta)) {
          EXPECT_GE(row.theta, 0.0);
        }
      }
    }
  }
}

TEST(BlockDescent, ConvergesOnStronglyConvexQuadratic) {
  TestObjectiveSpec s;
  s.n = 6;
  const auto o = make_test_objective(s);
  for (const auto& rule : all_rules(2)) {
    BlockOptions opt;
    opt.budget.max_iterations = 100000;
    opt.budget.target_xi = 1e-10;
    Rng r(4);
    const auto res = block_descent_run(o, rule, opt, r);
    EXPECT_EQ(res.trace.status, "target") << to_string(rule.kind);
    EXPECT_LE((res.x - *o.x_star).norm(), 1e-4) << to_string(rule.kind);
  }
}

TEST(BlockDescent, StationaryStartStopsImmediately) {
  TestObjectiveSpec s;
  s.n = 4;
  s.g = Regularizer::l1(1000.0);
  const auto o = make_test_objective(s);
  Rng r(5);
  const auto res = block_descent_run(o, BlockRule::serial_uniform(), BlockOptions{}, r);
  EXPECT_EQ(res.trace.status, "stationary");
  ASSERT_EQ(res.trace.rows.size(), 1u);
  EXPECT_EQ(res.trace.rows[0].theta, 0.0);
}

TEST(BlockDescent, RuleValidationAndDeterminism) {
  const auto o = make_test_objective("quadratic", 2);
  Rng r(1);
  EXPECT_THROW(block_descent_run(o, BlockRule::tau_nice(0), BlockOptions{}, r), InvalidArgument);
  EXPECT_THROW(block_descent_run(o, BlockRule::tau_nice(11), BlockOptions{}, r), InvalidArgument);
  BlockOptions bad;
  bad.x0 = Vec::Zero(3);
  EXPECT_THROW(block_descent_run(o, BlockRule::full_batch(), bad, r), InvalidArgument);
  BlockOptions opt;
  opt.budget.max_iterations = 50;
  Rng a(9), b(9);
  const auto ra = block_descent_run(o, BlockRule::tau_nice(3), opt, a);
  const auto rb = block_descent_run(o, BlockRule::tau_nice(3), opt, b);
  EXPECT_EQ(ra.x, rb.x);
}

TEST(BlockDescent, GreedyMinibatchFallsBackAboveEnumerationLimit) {
  TestObjectiveSpec s;
  s.n = 12;
  const auto o = make_test_objective(s);
  BlockOptions opt;
  opt.budget.max_iterations = 30;
  opt.budget.greedy_enumeration_limit = 10;
  Rng r(2);
  const auto res = block_descent_run(o, BlockRule::greedy_minibatch(4), opt, r);
  EXPECT_TRUE(res.trace.info.count("greedy"));
  EXPECT_LE(res.max_lemma_violation, 1e-9);
}

TEST(Theorems, PredictedIterationFormulas) {
  Rng rng(12);
  const Mat M = random_pd(6, rng);
  Objective o = quadratic(M, random_vec(6, rng), M);
  const double mu = 0.3, rho = 0.7, xi0 = 5.0, eps = 1e-4;
  const double lmax = detail::lambda_max(M);
  TheoremBound gd{PLClass::strongly_pl, proportion_constant(o, BlockRule::full_batch()), mu, 0.0, xi0};
  EXPECT_EQ(predicted_iterations(gd, eps), static_cast<std::size_t>(std::ceil(lmax / mu * std::log(xi0 / eps))));
  TheoremBound uni{PLClass::weakly_pl, proportion_constant(o, BlockRule::serial_uniform()), 0.0, rho, xi0};
  EXPECT_EQ(predicted_iterations(uni, eps),
            static_cast<std::size_t>(std::ceil(6.0 * M.diagonal().maxCoeff() / (rho * eps))));
  Objective ns = o;
  ns.g = Regularizer::l1(0.1);
  const double Lt = L_tau(M, 3).value;
  TheoremBound gm{PLClass::strongly_pl, proportion_constant(ns, BlockRule::greedy_minibatch(3)), mu, 0.0, xi0};
  EXPECT_EQ(predicted_iterations(gm, eps),
            static_cast<std::size_t>(std::ceil(6.0 * Lt / (3.0 * mu) * std::log(xi0 / eps))));
  TheoremBound nc{PLClass::nonconvex, 0.01, 0.0, 0.0, xi0};
  EXPECT_EQ(predicted_iterations(nc, eps), static_cast<std::size_t>(std::ceil(xi0 / (0.01 * eps) * std::log(xi0 / eps))));
  EXPECT_THROW(predicted_iterations(TheoremBound{PLClass::strongly_pl, 0.1, 0.0, 0.0, 1.0}, eps), InvalidArgument);
  EXPECT_THROW(predicted_iterations(TheoremBound{PLClass::weakly_pl, 0.1, 0.0, 0.0, 1.0}, eps), InvalidArgument);
  EXPECT_THROW(predicted_iterations(TheoremBound{PLClass::nonconvex, 0.0, 0.0, 0.0, 1.0}, eps), InvalidArgument);
}

TEST(TestObjectives, QuadraticIsPL) {
  TestObjectiveSpec s;
  s.n = 7;
  s.lambda = 0.2;
  const auto o = make_test_objective(s);
  const double mu = detail::lambda_min(o.M);
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const Vec x = random_vec(7, rng, 3.0);
    EXPECT_GE(0.5 * o.grad(x).squaredNorm(), mu * (o.F(x) - *o.f_star) * (1 - 1e-10));
  }
  EXPECT_NEAR(o.grad(*o.x_star).norm(), 0.0, 1e-10);
}

TEST(TestObjectives, WeakPLHoldsPointwise) {
  for (const char* kind : {"wpl_product", "wpl_huber"}) {
    const auto o = make_test_objective(kind, 1);
    Rng rng(14);
    for (int k = 0; k < 10000; ++k) {
      Vec x(2);
      x << 10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0;
      // nearest minimizer lies on an axis
      Vec xs = x;
      if (std::abs(x(0)) < std::abs(x(1))) xs(0) = 0.0; else xs(1) = 0.0;
      const double xi = o.F(x);
      EXPECT_GE(o.grad(x).norm() * (x - xs).norm(), xi * (1 - 1e-12)) << kind;
      EXPECT_GE(o.grad(x).norm() * x.norm(), xi * (1 - 1e-12)) << kind;
    }
  }
}

TEST(TestObjectives, SmoothnessCertificatesHold) {
  Rng rng(15);
  TestObjectiveSpec c;
  c.kind = TestObjectiveKind::nonconvex_cosine;
  c.n = 10;
  c.m = 40;
  EXPECT_LE(check_smoothness(make_test_objective(c), rng, 200, 3.0), 1e-9);
  EXPECT_LE(check_smoothness(make_test_objective("quadratic", 3), rng, 200, 3.0), 1e-9);
  EXPECT_LE(check_smoothness(make_test_objective("plateau", 1), rng, 200, 5.0), 1e-9);
  EXPECT_LE(check_smoothness(make_test_objective("wpl_product", 1), rng, 200, 5.0), 1e-9);
  EXPECT_LE(check_smoothness(make_test_objective("wpl_huber", 1), rng, 200, 5.0), 1e-9);
}

TEST(TestObjectives, HuberAsPrintedIsContinuouslyDifferentiable) {
  for (double z : {1.0, -1.0}) {
    const double h = 1e-7;
    EXPECT_NEAR(huber(z + h), huber(z - h), 5e-7);
    EXPECT_NEAR((huber(z + h) - huber(z)) / h, (huber(z) - huber(z - h)) / h, 1e-5);
  }
}

TEST(TestObjectives, PlateauHasZeroOptimumAtPiOverC) {
  const double c = plateau_c();
  EXPECT_NEAR(c, 2.15, 0.01);
  const auto o = make_test_objective("plateau", 1);
  Vec x(1);
  x << std::numbers::pi / c;
  EXPECT_NEAR(o.F(x), 0.0, 1e-14);
  EXPECT_NEAR(o.grad(x)(0), 0.0, 1e-14);
  Rng rng(16);
  const auto ref = multistart_reference(o, 16, 3000, 3.0, rng);
  EXPECT_GE(ref.F, -1e-12);
  EXPECT_THROW(make_test_objective("no_such_kind", 1), InvalidArgument);
}

TEST(TestObjectives, CosineSpectrumAndMultistartReference) {
  TestObjectiveSpec c;
  c.kind = TestObjectiveKind::nonconvex_cosine;
  c.n = 6;
  c.m = 20;
  c.lambda = 0.05;
  const auto o = make_test_objective(c);
  const auto again = make_test_objective(c);
  EXPECT_EQ(o.M, again.M);
  const double lmin = detail::lambda_min(o.M), lmax = detail::lambda_max(o.M);
  // M = A'A/m + I/m with singular values of A in [1/m, 1]
  EXPECT_NEAR(lmax, 1.0 / 20.0 + 1.0 / 20.0, 1e-12);
  EXPECT_NEAR(lmin, 1.0 / (400.0 * 20.0) + 1.0 / 20.0, 1e-12);
  Rng rng(17);
  const auto ref = multistart_reference(o, 8, 2000, 1.0, rng);
  const Vec gr = o.grad(ref.x);
  const auto lam = forcing_lambda_coords(o, ref.x, gr, lmax);
  EXPECT_LE(std::accumulate(lam.begin(), lam.end(), 0.0), 1e-10);
}
