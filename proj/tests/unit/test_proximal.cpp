#include <cmath>
#include <initializer_list>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "matdisc/proximal.hpp"
#include "oracles.hpp"

using namespace matdisc;

namespace {

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

// f(w) = 0.5 * sum_i k_i (w_i - t_i)^2
SmoothObjective separable_quadratic(const Vec& k, const Vec& t) {
  SmoothObjective obj;
  obj.dim = static_cast<std::size_t>(k.size());
  obj.value = [k, t](const Vec& w) { return 0.5 * (k.array() * (w - t).array().square()).sum(); };
  obj.gradient = [k, t](const Vec& w) -> Vec { return k.cwiseProduct(w - t); };
  return obj;
}

QuadraticProblem identity_problem(const Vec& y) { return QuadraticProblem(Mat::Identity(2, 2), y, Vec::Ones(2)); }

}  // namespace

TEST(ProxL1, Componentwise) {
  EXPECT_EQ(prox_l1(vec({3.0, -0.5, -2.0}), 1.0), vec({2.0, 0.0, -1.0}));
  const Vec v = vec({0.3, -7.0, 0.0});
  EXPECT_EQ(prox_l1(v, 0.0), v);
  EXPECT_THROW(prox_l1(v, -1.0), InvalidArgument);
}

TEST(ProxL1, MatchesScanOracle) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> th(0.0, 1.5);
  for (int t = 0; t < 20; ++t) {
    const double v = u(gen);
    const double theta = th(gen);
    EXPECT_NEAR(prox_l1(vec({v}), theta)(0), oracle::prox_scan(v, theta), 1e-4);
  }
}

TEST(AlphaMaxGeneral, LargestGradientMagnitude) {
  SmoothObjective obj;
  obj.dim = 2;
  obj.value = [](const Vec& w) { return w.squaredNorm(); };
  obj.gradient = [](const Vec& w) -> Vec { return vec({-4.0, 2.0}) + 2.0 * w; };
  EXPECT_DOUBLE_EQ(alpha_max_general(obj), 4.0);
}

TEST(AlphaMaxGeneral, MatchesQuadraticBound) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const QuadraticProblem p = oracle::random_problem(30, 5, seed);
    EXPECT_NEAR(alpha_max_general(quadratic_objective(p)), alpha_max_quadratic(p), 1e-12);
  }
}

TEST(AlphaMaxGeneral, StationaryOrigin) {
  EXPECT_EQ(alpha_max_general(separable_quadratic(Vec::Ones(3), Vec::Zero(3))), 0.0);
}

TEST(AlphaMaxGeneral, ZeroIsFixedPointAtBound) {
  const QuadraticProblem p = oracle::random_problem(30, 5, 3);
  const SmoothObjective obj = quadratic_objective(p);
  const double a = alpha_max_general(obj);
  for (double step : {1.0, 0.5, 1e-3}) {
    EXPECT_EQ(prox_l1(Vec::Zero(5) - step * obj.gradient(Vec::Zero(5)), step * a), Vec::Zero(5));
  }
}

TEST(Ista, OrthonormalQuadratic) {
  const SmoothObjective obj = quadratic_objective(identity_problem(vec({3.0, 1.0})));
  IstaConfig cfg;
  cfg.step = 1.0;
  const Vec w = ista_solve(obj, 0.5, Vec::Zero(2), cfg);
  EXPECT_NEAR(w(0), 2.0, 1e-6);
  EXPECT_NEAR(w(1), 0.0, 1e-6);
}

TEST(Ista, ZeroAboveBound) {
  const QuadraticProblem p = oracle::random_problem(30, 5, 6);
  const SmoothObjective obj = quadratic_objective(p);
  const IstaResult r = ista_run(obj, alpha_max_general(obj), Vec::Zero(5), IstaConfig{});
  EXPECT_EQ(r.w, Vec::Zero(5));
  EXPECT_LE(r.iterations, 1u);
}

TEST(Ista, FixedPointAtTermination) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const QuadraticProblem p = oracle::random_problem(40, 3 + seed % 8, seed);
    const SmoothObjective obj = quadratic_objective(p);
    const double alpha = 0.2 * alpha_max_general(obj);
    IstaConfig cfg;
    cfg.step = 1.0;
    const IstaResult r = ista_run(obj, alpha, Vec::Ones(static_cast<Eigen::Index>(obj.dim)), cfg);
    EXPECT_LE(ista_fixed_point_residual(obj, alpha, r.w, r.step), 10.0 * cfg.tol);
  }
}

TEST(Ista, AgreesWithCoordinateDescent) {
  std::mt19937_64 gen(1);
  for (unsigned seed = 0; seed < 20; ++seed) {
    const QuadraticProblem p = oracle::random_problem(40, 3 + seed % 8, seed);
    const SmoothObjective obj = quadratic_objective(p);
    const double alpha = std::uniform_real_distribution<double>(0.01, 0.9)(gen) * alpha_max_quadratic(p);
    IstaConfig cfg;
    cfg.step = 1.0;
    const Vec w_ista = ista_solve(obj, alpha, Vec::Zero(static_cast<Eigen::Index>(obj.dim)), cfg);
    EXPECT_LT((w_ista - cd_solve(p, alpha)).cwiseAbs().maxCoeff(), 1e-5) << "seed " << seed;
  }
}

TEST(Ista, BacktrackingGivesMonotoneDescent) {
  const QuadraticProblem p = oracle::random_problem(40, 6, 12);
  const SmoothObjective base = quadratic_objective(p);
  const double alpha = 0.1 * alpha_max_general(base);
  // Gradients are only requested at accepted iterates.
  auto visited = std::make_shared<std::vector<Vec>>();
  SmoothObjective obj = base;
  obj.gradient = [g = base.gradient, visited](const Vec& w) {
    visited->push_back(w);
    return g(w);
  };
  IstaConfig cfg;
  cfg.step = 50.0;  // far above 1/L, forces backtracking
  ista_solve(obj, alpha, Vec::Ones(6), cfg);
  ASSERT_GT(visited->size(), 2u);
  double prev = std::numeric_limits<double>::infinity();
  for (const Vec& w : *visited) {
    const double F = base.value(w) + alpha * w.lpNorm<1>();
    EXPECT_LE(F, prev + 1e-14 * std::abs(prev));
    prev = F;
  }
}

TEST(Ista, FixedStepDiverges) {
  const SmoothObjective obj = separable_quadratic(Vec::Constant(2, 10.0), Vec::Ones(2));
  IstaConfig cfg;
  cfg.step = 1.0;  // step * curvature = 10 > 2
  cfg.backtracking = false;
  EXPECT_THROW(ista_solve(obj, 0.0, Vec::Zero(2), cfg), Diverged);
}

TEST(Ista, NonFiniteObjectiveReported) {
  SmoothObjective obj = separable_quadratic(Vec::Ones(1), vec({5.0}));
  obj.value = [v = obj.value](const Vec& w) {
    return w(0) > 1.0 ? std::numeric_limits<double>::quiet_NaN() : v(w);
  };
  IstaConfig cfg;
  cfg.step = 0.9;
  cfg.backtracking = false;
  try {
    ista_solve(obj, 0.0, Vec::Zero(1), cfg);
    FAIL() << "expected NonFiniteObjective";
  } catch (const NonFiniteObjective& e) {
    EXPECT_GT(e.point()(0), 1.0);
  }
}

TEST(Ista, StepLimit) {
  const QuadraticProblem p = oracle::random_problem(40, 6, 4);
  IstaConfig cfg;
  cfg.max_steps = 3;
  EXPECT_THROW(ista_solve(quadratic_objective(p), 0.0, Vec::Zero(6), cfg), NotConverged);
}

TEST(Pathwise, ScheduleAndWarmStarts) {
  // n = 2, X = I, y = (2, 1): alpha0 = 1
  const QuadraticProblem p = identity_problem(vec({2.0, 1.0}));
  IstaConfig cfg;
  cfg.step = 1.0;
  const Path path = pathwise_ista(quadratic_objective(p), 4, cfg);
  ASSERT_EQ(path.knots.size(), 4u);
  EXPECT_EQ(path.knots[0].alpha, 1.0);
  EXPECT_EQ(path.knots[1].alpha, 0.75);
  EXPECT_EQ(path.knots[2].alpha, 0.5);
  EXPECT_EQ(path.knots[3].alpha, 0.25);
  EXPECT_EQ(path.knots[0].w, Vec::Zero(2));
}

TEST(Pathwise, MatchesCoordinateDescentAndCertifies) {
  const QuadraticProblem p = oracle::random_problem(40, 7, 21);
  const SmoothObjective obj = quadratic_objective(p);
  IstaConfig cfg;
  cfg.step = 1.0;
  const PathwiseResult run = pathwise_ista_run(obj, 25, cfg);
  const double a0 = alpha_max_general(obj);
  for (std::size_t l = 0; l < run.path.knots.size(); ++l) {
    const PathKnot& k = run.path.knots[l];
    EXPECT_EQ(k.alpha, (1.0 - double(l) / 25.0) * a0);
    EXPECT_LT((k.w - cd_solve(p, k.alpha)).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_NEAR(k.mismatch, obj.value(k.w), 1e-15);
    if (l > 0) EXPECT_LE(ista_fixed_point_residual(obj, k.alpha, k.w, run.info[l].step), 10.0 * cfg.tol);
  }
}

TEST(Pathwise, FailureNamesStep) {
  const QuadraticProblem p = oracle::random_problem(40, 7, 2);
  IstaConfig cfg;
  cfg.max_steps = 2;
  try {
    pathwise_ista(quadratic_objective(p), 10, cfg);
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_NE(std::string(e.what()).find("l = "), std::string::npos);
  }
  EXPECT_THROW(pathwise_ista(quadratic_objective(p), 1, cfg), InvalidArgument);
}

TEST(FiniteDiff, Square) {
  SmoothObjective obj;
  obj.dim = 1;
  obj.value = [](const Vec& w) { return w(0) * w(0); };
  obj.gradient = [](const Vec& w) -> Vec { return 2.0 * w; };
  EXPECT_NEAR(finite_diff_gradient(obj, vec({3.0}), 1e-5)(0), 6.0, 1e-8);
}

TEST(FiniteDiff, LinearIsExact) {
  SmoothObjective obj;
  obj.dim = 3;
  const Vec a = vec({1.5, -2.0, 0.25});
  obj.value = [a](const Vec& w) { return a.dot(w); };
  obj.gradient = [a](const Vec&) { return a; };
  EXPECT_LT((finite_diff_gradient(obj, vec({0.3, 1.0, -4.0}), 1e-3) - a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FiniteDiff, NonFiniteNeighborhood) {
  SmoothObjective obj;
  obj.dim = 1;
  obj.value = [](const Vec& w) { return std::log(w(0)); };
  obj.gradient = [](const Vec& w) -> Vec { return vec({1.0 / w(0)}); };
  EXPECT_THROW(finite_diff_gradient(obj, vec({1e-6}), 1e-5), NonFiniteObjective);
}

TEST(CheckGradient, QuadraticPasses) {
  // Unit-norm target as in the stress-normalized problems, so f stays O(1).
  const QuadraticProblem raw = oracle::random_problem(30, 5, 1);
  const QuadraticProblem p(raw.X(), raw.y() / raw.y().norm(), raw.column_scales());
  const GradientReport rep = check_gradient(quadratic_objective(p), 20, 0);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.trials, 20u);
  EXPECT_LT(rep.max_relative_error, 1e-9);
}

TEST(CheckGradient, WrongGradientFails) {
  SmoothObjective obj = quadratic_objective(oracle::random_problem(30, 5, 1));
  obj.gradient = [g = obj.gradient](const Vec& w) -> Vec { return 2.0 * g(w); };
  const GradientReport rep = check_gradient(obj, 5, 0);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_relative_error, 1e-3);
}

TEST(CheckGradient, PositiveCoordinateSampledInRange) {
  SmoothObjective obj;
  obj.dim = 2;
  obj.value = [](const Vec& w) { return w(0) * w(0) + std::log(w(1)); };
  obj.gradient = [](const Vec& w) -> Vec { return vec({2.0 * w(0), 1.0 / w(1)}); };
  obj.positive_coordinate = 1;
  const GradientReport rep = check_gradient(obj, 30, 4);
  EXPECT_TRUE(rep.pass);
  EXPECT_GE(rep.worst_point(1), 0.5);
  EXPECT_LE(rep.worst_point(1), 9.0);
}
