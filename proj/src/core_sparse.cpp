#include "matdisc/core_sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace matdisc {

namespace {

constexpr double kZeroColumnNorm = 1e-14;
constexpr double kUnitNormTol = 1e-12;
// Relative size of the smallest R diagonal below which a triangular factor is treated as singular.
constexpr double kPivotTol = 1e-13;

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

bool contains(const IndexSet& set, std::size_t i) {
  return std::find(set.begin(), set.end(), i) != set.end();
}

Mat gather_columns(const Mat& X, const IndexSet& cols) {
  Mat out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(static_cast<Eigen::Index>(cols[k]));
  return out;
}

// Solves (G + jitter I) z = b with G = M^T M, used when the QR factor is numerically singular.
Vec jittered_gram_solve(const Mat& M, const Vec& b) {
  const Mat G = M.transpose() * M;
  const double jitter = 1e-12 * G.trace() / static_cast<double>(G.rows());
  Eigen::LLT<Mat> llt(G + jitter * Mat::Identity(G.rows(), G.cols()));
  if (llt.info() != Eigen::Success) throw SingularGram("Gram matrix is not positive definite after jitter retry");
  Vec z = llt.solve(b);
  if (!z.allFinite()) throw SingularGram("Gram solve produced non-finite values");
  return z;
}

bool triangular_is_singular(const Mat& R) {
  const Vec d = R.diagonal().cwiseAbs();
  if (d.size() == 0) return false;
  return d.minCoeff() <= kPivotTol * d.maxCoeff() || !(d.minCoeff() > 0.0);
}

double lasso_objective(const QuadraticProblem& p, double alpha, const Vec& w) {
  return p.mismatch(w) + alpha * w.lpNorm<1>();
}

}  // namespace

double soft_threshold(double x, double theta) {
  if (x > theta) return x - theta;
  if (x < -theta) return x + theta;
  return 0.0;
}

NormalizedColumns normalize_columns(const Mat& X_tilde) {
  NormalizedColumns out{X_tilde, Vec(X_tilde.cols())};
  for (Eigen::Index i = 0; i < X_tilde.cols(); ++i) {
    const double norm = X_tilde.col(i).norm();
    if (!(norm >= kZeroColumnNorm)) throw ZeroColumn(static_cast<std::size_t>(i));
    out.scales(i) = norm;
    out.X.col(i) /= norm;
  }
  return out;
}

Vec rescale_solution(const Vec& w, const Vec& scales) {
  if (w.size() != scales.size()) {
    throw LengthMismatch("rescale_solution: w has " + std::to_string(w.size()) + " entries, scales has " +
                         std::to_string(scales.size()));
  }
  return w.cwiseQuotient(scales);
}

QuadraticProblem::QuadraticProblem(Mat X, Vec y, Vec column_scales)
    : X_(std::move(X)), y_(std::move(y)), scales_(std::move(column_scales)) {
  if (X_.rows() != y_.size()) throw LengthMismatch("feature matrix rows do not match target length");
  if (X_.cols() != scales_.size()) throw LengthMismatch("feature matrix columns do not match scale count");
  if (X_.cols() == 0) throw InvalidArgument("problem has no features");
  if (X_.rows() < X_.cols()) {
    throw RankDeficient("underdetermined problem: " + std::to_string(X_.rows()) + " samples for " +
                        std::to_string(X_.cols()) + " features");
  }
  if (!X_.allFinite() || !y_.allFinite()) throw InvalidArgument("problem data must be finite");
  for (Eigen::Index i = 0; i < scales_.size(); ++i) {
    if (!(scales_(i) > 0.0) || !std::isfinite(scales_(i))) throw InvalidArgument("column scales must be positive");
    if (std::abs(X_.col(i).norm() - 1.0) > kUnitNormTol) {
      throw InvalidArgument("column " + std::to_string(i) + " is not unit-norm");
    }
  }
  Eigen::ColPivHouseholderQR<Mat> qr(X_);
  if (qr.rank() < X_.cols()) {
    throw RankDeficient("feature columns are linearly dependent (rank " + std::to_string(qr.rank()) + " of " +
                        std::to_string(X_.cols()) + ")");
  }
}

QuadraticProblem QuadraticProblem::from_features(const Mat& X_tilde, Vec y) {
  NormalizedColumns nc = normalize_columns(X_tilde);
  return QuadraticProblem(std::move(nc.X), std::move(y), std::move(nc.scales));
}

double QuadraticProblem::mismatch(const Vec& w) const {
  return (y_ - X_ * w).squaredNorm() / (2.0 * static_cast<double>(n_samples()));
}

Vec QuadraticProblem::correlations(const Vec& w) const {
  return X_.transpose() * (y_ - X_ * w) / static_cast<double>(n_samples());
}

IndexSet support_of(const Vec& w, double equality_tol) {
  IndexSet s;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > equality_tol) s.push_back(static_cast<std::size_t>(i));
  }
  return s;
}

std::size_t count_nonzero(const Vec& w, double equality_tol) { return support_of(w, equality_tol).size(); }

Vec ols_solve(const QuadraticProblem& problem, const std::optional<IndexSet>& support) {
  const std::size_t m = problem.n_features();
  IndexSet cols;
  if (support) {
    cols = *support;
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (std::size_t i : cols) {
      if (i >= m) throw OutOfRange("support index " + std::to_string(i) + " out of range");
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) cols.push_back(i);
  }
  Vec w = Vec::Zero(static_cast<Eigen::Index>(m));
  if (cols.empty()) return w;

  const Mat Xs = gather_columns(problem.X(), cols);
  Eigen::ColPivHouseholderQR<Mat> qr(Xs);
  Vec ws;
  if (qr.rank() == Xs.cols()) {
    ws = qr.solve(problem.y());
  } else {
    ws = jittered_gram_solve(Xs, Xs.transpose() * problem.y());
  }
  for (std::size_t k = 0; k < cols.size(); ++k) w(static_cast<Eigen::Index>(cols[k])) = ws(static_cast<Eigen::Index>(k));
  return w;
}

double alpha_max_quadratic(const QuadraticProblem& problem) {
  return (problem.X().transpose() * problem.y()).cwiseAbs().maxCoeff() / static_cast<double>(problem.n_samples());
}

double kkt_residual(const QuadraticProblem& problem, double alpha, const Vec& w, double equality_tol) {
  const Vec g = problem.correlations(w);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double v = std::abs(w(i)) > equality_tol ? std::abs(g(i) - alpha * sign_of(w(i)))
                                                   : std::max(0.0, std::abs(g(i)) - alpha);
    worst = std::max(worst, v);
  }
  return worst;
}

Vec cd_solve(const QuadraticProblem& problem, double alpha, const std::optional<Vec>& w0, const SolverConfig& config) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  const Mat& X = problem.X();
  const Vec& y = problem.y();
  const auto m = static_cast<Eigen::Index>(problem.n_features());
  const double n = static_cast<double>(problem.n_samples());

  if (w0 && w0->size() != m) throw LengthMismatch("initial guess length does not match feature count");
  // Zero is optimal for every alpha at or above the bound; skip the sweeps and their rounding.
  if (alpha >= alpha_max_quadratic(problem)) return Vec::Zero(m);
  Vec w = w0 ? *w0 : ols_solve(problem);

  Vec curvature(m);
  for (Eigen::Index l = 0; l < m; ++l) curvature(l) = X.col(l).squaredNorm() / n;

  Vec r = y - X * w;
  double F = lasso_objective(problem, alpha, w);
  for (std::size_t step = 0; step < config.max_steps; ++step) {
    const Vec w_prev = w;
    for (Eigen::Index l = 0; l < m; ++l) {
      // rho = -S_l, the partial correlation with feature l removed from the fit
      const double rho = X.col(l).dot(r) / n + curvature(l) * w(l);
      const double updated = soft_threshold(rho, alpha) / curvature(l);
      if (updated != w(l)) {
        r -= (updated - w(l)) * X.col(l);
        w(l) = updated;
      }
    }
    r = y - X * w;
    const double F_next = lasso_objective(problem, alpha, w);
    const bool small_move = (w - w_prev).norm() < config.tol;
    const bool small_change = std::abs(F_next - F) < config.tol;
    F = F_next;
    if ((small_move || small_change) && kkt_residual(problem, alpha, w, config.equality_tol) <= 10.0 * config.tol) {
      return w;
    }
  }
  throw NotConverged("coordinate descent did not converge in " + std::to_string(config.max_steps) + " sweeps", w);
}

namespace {

struct Direction {
  double A = 0.0;
  Vec u;    // equiangular unit vector in sample space
  Vec d_A;  // coefficient direction on the active set, in active-set order
};

// Equiangular direction for the sign-adjusted active columns. The Gram system
// G z = 1 is solved through a Householder QR of the active columns, whose R factor
// is the Cholesky factor of G; u and A come from a single triangular solve.
Direction equiangular_direction(const Mat& X, const IndexSet& active, const Vec& signs) {
  Mat Xbar = gather_columns(X, active);
  for (Eigen::Index k = 0; k < Xbar.cols(); ++k) Xbar.col(k) *= signs(k);
  const Vec ones = Vec::Ones(Xbar.cols());
  Direction dir;
  Eigen::HouseholderQR<Mat> qr(Xbar);
  const Mat R = qr.matrixQR().topRows(Xbar.cols()).triangularView<Eigen::Upper>();
  Vec z;
  if (!triangular_is_singular(R)) {
    const Vec t = R.transpose().triangularView<Eigen::Lower>().solve(ones);
    z = R.triangularView<Eigen::Upper>().solve(t);
    dir.A = 1.0 / t.norm();
    const Mat Q = qr.householderQ() * Mat::Identity(Xbar.rows(), Xbar.cols());
    dir.u = dir.A * (Q * t);
  } else {
    try {
      z = jittered_gram_solve(Xbar, ones);
    } catch (const SingularGram& e) {
      throw IllConditioned(std::string("equiangular direction: ") + e.what());
    }
    const double s = ones.dot(z);
    if (!(s > 0.0)) throw IllConditioned("equiangular direction: Gram system is indefinite");
    dir.A = 1.0 / std::sqrt(s);
    dir.u = dir.A * (Xbar * z);
  }
  if (!std::isfinite(dir.A) || !dir.u.allFinite() || !z.allFinite()) {
    throw IllConditioned("equiangular direction is not finite");
  }
  dir.d_A = dir.A * signs.cwiseProduct(z);
  return dir;
}

PathKnot make_knot(const QuadraticProblem& p, double alpha, const Vec& w, const IndexSet& active, bool drop) {
  PathKnot k;
  k.alpha = alpha;
  k.w = w;
  k.active = active;
  std::sort(k.active.begin(), k.active.end());
  k.mismatch = p.mismatch(w);
  k.is_drop_step = drop;
  return k;
}

Path lars_engine(const QuadraticProblem& problem, const SolverConfig& config, bool lasso) {
  const Mat& X = problem.X();
  const Vec& y = problem.y();
  const std::size_t m = problem.n_features();
  const double n = static_cast<double>(problem.n_samples());
  const double eq = config.equality_tol;

  Path path;
  Vec w = Vec::Zero(static_cast<Eigen::Index>(m));
  Vec c = X.transpose() * y;
  double c_max = c.cwiseAbs().maxCoeff();

  if (c_max == 0.0) {
    path.knots.push_back(make_knot(problem, 0.0, w, {}, false));
    return path;
  }

  IndexSet active;
  std::size_t first = 0;
  c.cwiseAbs().maxCoeff(&first);
  std::size_t tied = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (std::abs(c(static_cast<Eigen::Index>(j))) >= c_max * (1.0 - eq)) ++tied;
  }
  if (tied > 1 && c_max / n >= config.alpha_floor) {
    throw CorrelationTie("several features attain the maximal initial correlation");
  }
  active.push_back(first);
  path.knots.push_back(make_knot(problem, c_max / n, w, active, false));

  std::optional<std::size_t> entered = first;
  std::optional<std::size_t> just_dropped;

  for (std::size_t step = 0;; ++step) {
    if (step >= config.max_steps) {
      throw NotConverged("LARS exceeded " + std::to_string(config.max_steps) + " steps", w);
    }
    Vec signs(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double s = sign_of(c(static_cast<Eigen::Index>(active[k])));
      signs(static_cast<Eigen::Index>(k)) = s != 0.0 ? s : 1.0;
    }
    const Direction dir = equiangular_direction(X, active, signs);
    const Vec a = X.transpose() * dir.u;

    // Entry candidates: the first gamma at which an inactive correlation reaches the shrinking maximum.
    double gamma = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> next;
    std::vector<double> candidate_gammas;
    for (std::size_t j = 0; j < m; ++j) {
      if (contains(active, j)) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      double best_j = std::numeric_limits<double>::infinity();
      for (int branch = 0; branch < 2; ++branch) {
        const double sgn = branch == 0 ? 1.0 : -1.0;
        // A just-dropped feature sits at the maximal correlation with sign sgn = sign(c_j);
        // that branch has a zero numerator and would re-admit it immediately.
        if (just_dropped && *just_dropped == j && sgn * c(jj) > 0.0) continue;
        const double num = c_max - sgn * c(jj);
        const double den = dir.A - sgn * a(jj);
        if (den == 0.0) continue;
        const double g = num / den;
        if (g > 0.0 && std::isfinite(g)) best_j = std::min(best_j, g);
      }
      if (std::isfinite(best_j)) {
        candidate_gammas.push_back(best_j);
        if (best_j < gamma) {
          gamma = best_j;
          next = j;
        }
      }
    }
    const double gamma_full = c_max / dir.A;
    bool terminal = !next.has_value();
    if (terminal || gamma >= gamma_full) {
      terminal = true;
      gamma = gamma_full;
      next.reset();
    }

    // Sign rule: the first active coefficient to cross zero truncates the step.
    std::optional<std::size_t> drop;
    if (lasso) {
      double gamma_tilde = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < active.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(active[k]);
        const double d = dir.d_A(static_cast<Eigen::Index>(k));
        if (d == 0.0 || w(i) == 0.0) continue;
        const double g = -w(i) / d;
        if (g > 0.0 && g < gamma_tilde) {
          gamma_tilde = g;
          drop = active[k];
        }
      }
      if (drop && gamma_tilde < gamma) {
        gamma = gamma_tilde;
        terminal = false;
        next.reset();
      } else {
        drop.reset();
      }
    }

    LarsStep diag;
    diag.gamma = gamma;
    diag.equiangular_norm = dir.A;
    diag.c_max = c_max;
    diag.entered = entered;
    if (entered) diag.entered_sign = static_cast<int>(sign_of(c(static_cast<Eigen::Index>(*entered))));
    diag.dropped = drop;
    diag.terminal = terminal && !drop;

    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(active[k]);
      w(i) += gamma * dir.d_A(static_cast<Eigen::Index>(k));
    }
    if (drop) {
      w(static_cast<Eigen::Index>(*drop)) = 0.0;
      active.erase(std::find(active.begin(), active.end(), *drop));
    }
    c = X.transpose() * (y - X * w);
    c_max = diag.terminal ? 0.0 : c_max - gamma * dir.A;
    const double alpha = c_max / n;

    if (!diag.terminal && !drop && next) {
      std::size_t ties = 0;
      for (double g : candidate_gammas) {
        if (std::abs(g - gamma) <= eq * std::max(1.0, gamma)) ++ties;
      }
      if (ties > 1 && alpha >= config.alpha_floor) {
        throw CorrelationTie("several features enter the active set at the same step (alpha = " +
                             std::to_string(alpha) + ")");
      }
    }

    path.steps.push_back(diag);
    entered.reset();
    just_dropped = drop;
    if (next) {
      active.push_back(*next);
      entered = next;
    }
    path.knots.push_back(make_knot(problem, alpha, w, active, drop.has_value()));

    if (diag.terminal) return path;
    if (alpha < config.alpha_floor) {
      path.early_stopped = true;
      return path;
    }
  }
}

}  // namespace

Path lars_path(const QuadraticProblem& problem, const SolverConfig& config) {
  if (problem.n_features() < 2) throw InvalidArgument("lars_path requires at least two features");
  return lars_engine(problem, config, false);
}

Path lars_lasso_path(const QuadraticProblem& problem, const SolverConfig& config) {
  return lars_engine(problem, config, true);
}

Vec interpolate_path(const Path& path, double alpha) {
  if (path.knots.empty()) throw OutOfRange("empty path");
  const auto& knots = path.knots;
  if (!(alpha >= 0.0) || alpha > knots.front().alpha || alpha < knots.back().alpha) {
    throw OutOfRange("alpha " + std::to_string(alpha) + " outside the path range [" +
                     std::to_string(knots.back().alpha) + ", " + std::to_string(knots.front().alpha) + "]");
  }
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double hi = knots[k].alpha;
    const double lo = knots[k + 1].alpha;
    if (alpha == hi) return knots[k].w;
    if (alpha > lo) {
      const double t = (hi - alpha) / (hi - lo);
      return knots[k].w + t * (knots[k + 1].w - knots[k].w);
    }
  }
  return knots.back().w;
}

}  // namespace matdisc
