#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "matdisc/errors.hpp"

namespace matdisc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IndexSet = std::vector<std::size_t>;

double soft_threshold(double x, double theta);

struct NormalizedColumns {
  Mat X;
  Vec scales;
};

// Scales each column to unit Euclidean norm. Throws ZeroColumn for columns with norm < 1e-14.
NormalizedColumns normalize_columns(const Mat& X_tilde);

// Maps normalized-space coefficients back to the original feature scaling: w[i] / scales[i].
Vec rescale_solution(const Vec& w, const Vec& scales);

// Least-squares data with unit-norm, linearly independent columns and the scales
// that were divided out of the raw features.
class QuadraticProblem {
 public:
  QuadraticProblem(Mat X, Vec y, Vec column_scales);

  static QuadraticProblem from_features(const Mat& X_tilde, Vec y);

  const Mat& X() const { return X_; }
  const Vec& y() const { return y_; }
  const Vec& column_scales() const { return scales_; }
  std::size_t n_samples() const { return static_cast<std::size_t>(X_.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(X_.cols()); }

  // f(w) = ||y - Xw||^2 / (2n)
  double mismatch(const Vec& w) const;
  // (1/n) X^T (y - Xw), the negative gradient of f
  Vec correlations(const Vec& w) const;

 private:
  Mat X_;
  Vec y_;
  Vec scales_;
};

struct SolverConfig {
  std::size_t max_steps = 100000;
  double tol = 1e-10;
  double equality_tol = 1e-12;
  double alpha_floor = static_cast<double>(std::numeric_limits<float>::epsilon());
};

struct PathKnot {
  double alpha = 0.0;
  Vec w;
  IndexSet active;
  double mismatch = 0.0;
  bool is_drop_step = false;
};

// Diagnostics of one LARS move from knot k to knot k + 1. Correlations are unscaled,
// c = X^T (y - Xw), so alpha = c_max / n.
struct LarsStep {
  double gamma = 0.0;
  double equiangular_norm = 0.0;  // A = (1^T G_A^{-1} 1)^{-1/2}
  double c_max = 0.0;             // before the move
  std::optional<std::size_t> entered;
  int entered_sign = 0;
  std::optional<std::size_t> dropped;
  bool terminal = false;          // full least-squares step on the current active set
};

struct Path {
  std::vector<PathKnot> knots;
  std::vector<LarsStep> steps;
  bool early_stopped = false;
};

IndexSet support_of(const Vec& w, double equality_tol = 1e-12);
std::size_t count_nonzero(const Vec& w, double equality_tol = 1e-12);

Vec ols_solve(const QuadraticProblem& problem, const std::optional<IndexSet>& support = std::nullopt);

double alpha_max_quadratic(const QuadraticProblem& problem);

// Largest violation of the LASSO subgradient conditions at alpha.
double kkt_residual(const QuadraticProblem& problem, double alpha, const Vec& w,
                    double equality_tol = 1e-12);

Vec cd_solve(const QuadraticProblem& problem, double alpha, const std::optional<Vec>& w0 = std::nullopt,
             const SolverConfig& config = {});

Path lars_path(const QuadraticProblem& problem, const SolverConfig& config = {});
Path lars_lasso_path(const QuadraticProblem& problem, const SolverConfig& config = {});

Vec interpolate_path(const Path& path, double alpha);

}  // namespace matdisc
