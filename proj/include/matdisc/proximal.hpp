#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "matdisc/core_sparse.hpp"

namespace matdisc {

// Differentiable mismatch f(w). value may return NaN or inf to signal an invalid point.
struct SmoothObjective {
  std::size_t dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  // Coordinate that must stay in a positive range when sampling test points.
  std::optional<std::size_t> positive_coordinate;
};

struct IstaConfig {
  double step = 1e-3;
  std::size_t max_steps = 200000;
  double tol = 1e-10;
  bool backtracking = true;
  double backtrack_factor = 0.5;
  double divergence_cap = 1e12;
};

SmoothObjective quadratic_objective(const QuadraticProblem& problem);

Vec prox_l1(const Vec& v, double theta);

double alpha_max_general(const SmoothObjective& objective);

// ||w - prox(w - step * grad f(w), step * alpha)||_inf
double ista_fixed_point_residual(const SmoothObjective& objective, double alpha, const Vec& w, double step);

struct IstaResult {
  Vec w;
  double step = 0.0;  // step size in use at termination, after any backtracking
  std::size_t iterations = 0;
};

IstaResult ista_run(const SmoothObjective& objective, double alpha, const Vec& w0, const IstaConfig& config);

Vec ista_solve(const SmoothObjective& objective, double alpha, const Vec& w0, const IstaConfig& config = {});

struct PathwiseKnotInfo {
  double step = 0.0;
  std::size_t iterations = 0;
};

struct PathwiseResult {
  Path path;
  std::vector<PathwiseKnotInfo> info;
};

PathwiseResult pathwise_ista_run(const SmoothObjective& objective, std::size_t n_alpha, const IstaConfig& config);

Path pathwise_ista(const SmoothObjective& objective, std::size_t n_alpha, const IstaConfig& config = {});

Vec finite_diff_gradient(const SmoothObjective& objective, const Vec& w, double h);

struct GradientReport {
  std::size_t trials = 0;
  double max_relative_error = 0.0;
  Vec worst_point;
  bool pass = false;
};

GradientReport check_gradient(const SmoothObjective& objective, std::size_t trials, std::uint64_t seed);

}  // namespace matdisc
