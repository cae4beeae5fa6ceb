#include "matdisc/proximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "matdisc/random.hpp"

namespace matdisc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Backtracking gives up once the step has shrunk this far below its starting value.
constexpr double kMinStepRatio = 1e-30;

double composite(double f, double alpha, const Vec& w) { return f + alpha * w.lpNorm<1>(); }

void validate(const IstaConfig& c) {
  if (!(c.step > 0.0) || !(c.tol > 0.0) || !(c.divergence_cap > 0.0) || c.max_steps == 0) {
    throw InvalidArgument("ISTA configuration values must be positive");
  }
  if (!(c.backtrack_factor > 0.0 && c.backtrack_factor < 1.0)) {
    throw InvalidArgument("backtrack factor must lie in (0, 1)");
  }
}

}  // namespace

SmoothObjective quadratic_objective(const QuadraticProblem& problem) {
  SmoothObjective obj;
  obj.dim = problem.n_features();
  obj.value = [problem](const Vec& w) { return problem.mismatch(w); };
  obj.gradient = [problem](const Vec& w) -> Vec { return -problem.correlations(w); };
  return obj;
}

Vec prox_l1(const Vec& v, double theta) {
  if (!(theta >= 0.0)) throw InvalidArgument("prox threshold must be nonnegative");
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = soft_threshold(v(i), theta);
  return out;
}

double alpha_max_general(const SmoothObjective& objective) {
  const Vec g = objective.gradient(Vec::Zero(static_cast<Eigen::Index>(objective.dim)));
  if (!g.allFinite()) throw NonFiniteObjective("gradient at the origin is not finite", Vec::Zero(g.size()));
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

double ista_fixed_point_residual(const SmoothObjective& objective, double alpha, const Vec& w, double step) {
  const Vec next = prox_l1(w - step * objective.gradient(w), step * alpha);
  return (next - w).lpNorm<Eigen::Infinity>();
}

IstaResult ista_run(const SmoothObjective& objective, double alpha, const Vec& w0, const IstaConfig& config) {
  validate(config);
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (w0.size() != static_cast<Eigen::Index>(objective.dim)) {
    throw LengthMismatch("initial guess length does not match objective dimension");
  }
  if (!w0.allFinite()) throw InvalidArgument("initial guess must be finite");

  IstaResult res;
  res.w = w0;
  double gamma = config.step;
  const double f0 = objective.value(res.w);
  if (!std::isfinite(f0)) throw NonFiniteObjective("objective is not finite at the initial guess", res.w);
  double F = composite(f0, alpha, res.w);
  bool objective_stalled = false;

  for (std::size_t it = 0; it < config.max_steps; ++it) {
    res.iterations = it;
    const Vec g = objective.gradient(res.w);
    if (!g.allFinite()) throw NonFiniteObjective("gradient is not finite", res.w);

    Vec trial;
    double F_trial = 0.0;
    for (;;) {
      trial = prox_l1(res.w - gamma * g, gamma * alpha);
      const double f_trial = objective.value(trial);
      F_trial = composite(f_trial, alpha, trial);
      if (!std::isfinite(F_trial)) {
        if (!config.backtracking) throw NonFiniteObjective("objective is not finite at an iterate", trial);
      } else if (!config.backtracking || F_trial - F <= 8.0 * kEps * std::abs(F)) {
        break;
      }
      gamma *= config.backtrack_factor;
      if (gamma < kMinStepRatio * config.step) {
        throw NonFiniteObjective("backtracking could not find a descent step", res.w);
      }
    }

    const double residual = (trial - res.w).lpNorm<Eigen::Infinity>();
    if (objective_stalled && residual <= 10.0 * config.tol) {
      res.step = gamma;
      return res;
    }
    if (std::abs(F_trial) > config.divergence_cap || trial.lpNorm<Eigen::Infinity>() > config.divergence_cap) {
      throw Diverged("ISTA iterates exceeded the divergence cap at step " + std::to_string(it) +
                     "; the step size is likely too large");
    }
    const double move = (trial - res.w).norm();
    objective_stalled = std::abs(F_trial - F) < config.tol;
    res.w = std::move(trial);
    F = F_trial;
    if (move < config.tol) {
      res.step = gamma;
      res.iterations = it + 1;
      return res;
    }
  }
  throw NotConverged("ISTA did not converge in " + std::to_string(config.max_steps) + " steps", res.w);
}

Vec ista_solve(const SmoothObjective& objective, double alpha, const Vec& w0, const IstaConfig& config) {
  return ista_run(objective, alpha, w0, config).w;
}

PathwiseResult pathwise_ista_run(const SmoothObjective& objective, std::size_t n_alpha, const IstaConfig& config) {
  if (n_alpha < 2) throw InvalidArgument("pathwise ISTA needs at least two alpha values");
  validate(config);
  const double alpha0 = alpha_max_general(objective);
  PathwiseResult out;
  Vec w = Vec::Zero(static_cast<Eigen::Index>(objective.dim));

  auto push = [&](double alpha, const Vec& wk, const PathwiseKnotInfo& info) {
    PathKnot k;
    k.alpha = alpha;
    k.w = wk;
    k.active = support_of(wk);
    k.mismatch = objective.value(wk);
    out.path.knots.push_back(std::move(k));
    out.info.push_back(info);
  };
  push(alpha0, w, {config.step, 0});

  for (std::size_t l = 1; l < n_alpha; ++l) {
    const double alpha = (1.0 - static_cast<double>(l) / static_cast<double>(n_alpha)) * alpha0;
    IstaResult r;
    try {
      r = ista_run(objective, alpha, w, config);
    } catch (const NotConverged& e) {
      throw NotConverged("pathwise step l = " + std::to_string(l) + ": " + e.what(), e.last_iterate());
    } catch (const NonFiniteObjective& e) {
      throw NonFiniteObjective("pathwise step l = " + std::to_string(l) + ": " + e.what(), e.point());
    } catch (const Diverged& e) {
      throw Diverged("pathwise step l = " + std::to_string(l) + ": " + e.what());
    }
    w = r.w;
    push(alpha, w, {r.step, r.iterations});
  }
  return out;
}

Path pathwise_ista(const SmoothObjective& objective, std::size_t n_alpha, const IstaConfig& config) {
  return pathwise_ista_run(objective, n_alpha, config).path;
}

Vec finite_diff_gradient(const SmoothObjective& objective, const Vec& w, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  Vec g(w.size());
  Vec probe = w;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    probe(i) = w(i) + h;
    const double up = objective.value(probe);
    probe(i) = w(i) - h;
    const double down = objective.value(probe);
    probe(i) = w(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteObjective("objective is not finite near the finite-difference point", w);
    }
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

GradientReport check_gradient(const SmoothObjective& objective, std::size_t trials, std::uint64_t seed) {
  SplitMix64 rng(seed);
  GradientReport report;
  report.trials = trials;
  const auto dim = static_cast<Eigen::Index>(objective.dim);
  for (std::size_t t = 0; t < trials; ++t) {
    Vec w(dim);
    for (Eigen::Index i = 0; i < dim; ++i) w(i) = rng.uniform(-2.0, 2.0);
    if (objective.positive_coordinate) w(static_cast<Eigen::Index>(*objective.positive_coordinate)) = rng.uniform(0.5, 9.0);

    double worst = 0.0;
    Vec analytic = objective.gradient(w);
    Vec probe = w;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(w(i)));
      double numeric = std::numeric_limits<double>::quiet_NaN();
      probe(i) = w(i) + h;
      const double up = objective.value(probe);
      probe(i) = w(i) - h;
      const double down = objective.value(probe);
      probe(i) = w(i);
      numeric = (up - down) / (2.0 * h);
      const double err = std::abs(analytic(i) - numeric) / std::max(1.0, std::abs(numeric));
      worst = std::isfinite(err) ? std::max(worst, err) : std::numeric_limits<double>::infinity();
    }
    if (t == 0 || worst > report.max_relative_error) {
      report.max_relative_error = worst;
      report.worst_point = w;
    }
  }
  report.pass = trials > 0 && report.max_relative_error < 1e-6;
  return report;
}

}  // namespace matdisc
