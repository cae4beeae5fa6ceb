#include "matdisc/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

namespace matdisc {

namespace {

using json = nlohmann::ordered_json;

template <typename F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), std::current_exception());
  }
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string number17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool in_support(const IndexSet& s, std::size_t i) { return std::find(s.begin(), s.end(), i) != s.end(); }

Vec start_vector(StartPoint start, std::size_t dim) {
  switch (start) {
    case StartPoint::Zeros: return Vec::Zero(static_cast<Eigen::Index>(dim));
    case StartPoint::Ones: return Vec::Ones(static_cast<Eigen::Index>(dim));
    case StartPoint::Ols: break;
  }
  throw InvalidArgument("an OLS start is only defined for the linear library");
}

PathKnot single_knot(double alpha, const Vec& w, double mismatch) {
  PathKnot k;
  k.alpha = alpha;
  k.w = w;
  k.active = support_of(w);
  k.mismatch = mismatch;
  return k;
}

void finish_report(DiscoveryReport& report, const Dataset& dataset, const KnotCriterion& selection,
                   const IstaConfig& refit_config, double zero_mismatch) {
  report.selected = stage("select", [&] { return select_knot(report.path, selection); });
  const Vec& w = report.path.knots[report.selected].w;
  const IndexSet support = effective_support(report.library, w);
  if (support.empty()) {
    report.refit = MaterialParams::from_flat(report.library, Vec::Zero(static_cast<Eigen::Index>(report.library.size())));
    report.refit_mismatch = zero_mismatch;
  } else {
    const RefitResult r = stage("refit", [&] { return debias_refit(dataset, report.library, support, w, refit_config); });
    report.refit = r.params;
    report.refit_mismatch = r.mismatch;
  }
  report.energy = format_energy(report.refit, report.library);
}

}  // namespace

IstaConfig hyperelastic_ista_config() {
  IstaConfig c;
  c.step = 1e6;
  c.max_steps = 2000000;
  return c;
}

std::size_t select_knot(const Path& path, const KnotCriterion& criterion, double equality_tol) {
  const auto& knots = path.knots;
  if (knots.empty()) throw NoQualifyingKnot("path has no knots");
  if (const auto* target = std::get_if<SparsityTarget>(&criterion)) {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < knots.size(); ++k) {
      if (count_nonzero(knots[k].w, equality_tol) <= target->k) pick = k;
    }
    if (!pick) throw NoQualifyingKnot("no knot has at most " + std::to_string(target->k) + " nonzero parameters");
    return *pick;
  }
  const double r = std::get<MismatchPlateau>(criterion).rel_drop;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double now = knots[k].mismatch;
    const double next = knots[k + 1].mismatch;
    const double improvement = now > 0.0 ? (now - next) / now : 0.0;
    if (improvement < r) return k;
  }
  throw NoQualifyingKnot("mismatch never plateaus below a relative improvement of " + number17(r));
}

IndexSet effective_support(const HyperelasticLibrary& library, const Vec& w, double equality_tol) {
  IndexSet s = support_of(w, equality_tol);
  if (library.include_ogden()) {
    const bool d = in_support(s, library.d_index());
    const bool delta = in_support(s, library.delta_index());
    if (!(d && delta)) {
      s.erase(std::remove_if(s.begin(), s.end(),
                             [&](std::size_t i) { return i == library.d_index() || i == library.delta_index(); }),
              s.end());
    }
  }
  return s;
}

namespace {

// For fixed delta the restricted mismatch is linear least squares in (C, D). Minimizing
// the projected mismatch over delta gives ISTA a start at the bottom of the flat valley
// along which plain gradient steps crawl.
Vec variable_projection_start(const Dataset& dataset, const HyperelasticLibrary& library, const IndexSet& support,
                              const Vec& w0) {
  const LinearSystem sys = assemble_linear_system(dataset, library.mooney_order());
  IndexSet mooney;
  for (std::size_t i : support) {
    if (i < library.mooney_count()) mooney.push_back(i);
  }
  const auto cols = static_cast<Eigen::Index>(mooney.size()) + 1;
  const double n = static_cast<double>(sys.target.size());

  auto solve = [&](double delta, Vec& coef) {
    Mat A(sys.features.rows(), cols);
    for (std::size_t k = 0; k < mooney.size(); ++k) {
      A.col(static_cast<Eigen::Index>(k)) = sys.features.col(static_cast<Eigen::Index>(mooney[k]));
    }
    A.col(cols - 1) = ogden_feature_column(dataset, delta);
    coef = A.colPivHouseholderQr().solve(sys.target);
    const double f = (A * coef - sys.target).squaredNorm() / (2.0 * n);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  };

  const double delta0 = w0(static_cast<Eigen::Index>(library.delta_index()));
  const double width = std::max(std::abs(delta0), 1.0);
  Vec coef;
  double best_delta = delta0;
  double best = solve(delta0, coef);
  constexpr int kGrid = 40;
  const double h = width / kGrid;
  for (int k = -kGrid; k <= kGrid; ++k) {
    const double delta = delta0 + k * h;
    if (delta == 0.0) continue;
    const double f = solve(delta, coef);
    if (f < best) {
      best = f;
      best_delta = delta;
    }
  }
  // Golden-section refinement on the grid cell pair around the best point.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best_delta - h;
  double b = best_delta + h;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = solve(x1, coef);
  double f2 = solve(x2, coef);
  while (b - a > 1e-12 * width) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = solve(x1, coef);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = solve(x2, coef);
    }
  }
  const double golden = 0.5 * (a + b);
  if (golden != 0.0 && solve(golden, coef) < best) best_delta = golden;
  solve(best_delta, coef);

  Vec w = Vec::Zero(w0.size());
  for (std::size_t k = 0; k < mooney.size(); ++k) w(static_cast<Eigen::Index>(mooney[k])) = coef(static_cast<Eigen::Index>(k));
  w(static_cast<Eigen::Index>(library.d_index())) = coef(cols - 1);
  w(static_cast<Eigen::Index>(library.delta_index())) = best_delta;
  return w;
}

}  // namespace

RefitResult debias_refit(const Dataset& dataset, const HyperelasticLibrary& library, const IndexSet& support,
                         const std::optional<Vec>& warm_start, const IstaConfig& config) {
  if (support.empty()) throw EmptySupport("refit needs at least one active parameter");
  for (std::size_t i : support) {
    if (i >= library.size()) throw OutOfRange("support index " + std::to_string(i) + " out of range");
  }
  const bool ogden_in = library.include_ogden() &&
                        (in_support(support, library.d_index()) || in_support(support, library.delta_index()));
  if (ogden_in && !(in_support(support, library.d_index()) && in_support(support, library.delta_index()))) {
    throw InvalidArgument("the Ogden pair (D, delta) must be refit jointly");
  }

  if (!ogden_in) {
    // The mismatch restricted to Mooney coefficients is quadratic: restricted least squares.
    const QuadraticProblem problem = assemble_linear_problem(dataset, library.mooney_order());
    const Vec w = ols_solve(problem, support);
    Vec flat = Vec::Zero(static_cast<Eigen::Index>(library.size()));
    flat.head(w.size()) = rescale_solution(w, problem.column_scales());
    return {MaterialParams::from_flat(library, flat), problem.mismatch(w)};
  }

  const SmoothObjective full = nonlinear_objective(dataset, library);
  Vec mask = Vec::Zero(static_cast<Eigen::Index>(library.size()));
  for (std::size_t i : support) mask(static_cast<Eigen::Index>(i)) = 1.0;
  SmoothObjective restricted = full;
  restricted.gradient = [grad = full.gradient, mask](const Vec& w) -> Vec { return grad(w).cwiseProduct(mask); };

  Vec w0 = warm_start ? *warm_start : Vec::Ones(static_cast<Eigen::Index>(library.size()));
  if (w0.size() != mask.size()) throw LengthMismatch("warm start length does not match the library");
  w0 = w0.cwiseProduct(mask);
  const Vec projected = variable_projection_start(dataset, library, support, w0);
  if (full.value(projected) < full.value(w0)) w0 = projected;
  const Vec w = ista_solve(restricted, 0.0, w0, config);
  return {MaterialParams::from_flat(library, w), full.value(w)};
}

std::size_t term_count(const HyperelasticLibrary& library, const MaterialParams& params) {
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < params.mooney.size(); ++i) n += params.mooney(i) != 0.0;
  if (library.include_ogden() && params.has_ogden && params.ogden_D != 0.0 && params.ogden_delta != 0.0) ++n;
  return n;
}

std::string format_energy(const MaterialParams& params, const HyperelasticLibrary& library) {
  std::vector<std::pair<double, std::string>> terms;
  const auto& slots = library.feature_index();
  for (std::size_t k = 0; k < library.mooney_count() && k < static_cast<std::size_t>(params.mooney.size()); ++k) {
    const double c = params.mooney(static_cast<Eigen::Index>(k));
    if (c == 0.0) continue;
    const int a = slots[k].degree - slots[k].i2_power;
    const int b = slots[k].i2_power;
    std::string body;
    auto factor = [&](const char* base, int power) {
      if (power == 0) return;
      if (!body.empty()) body += "*";
      body += base;
      if (power > 1) body += "^" + std::to_string(power);
    };
    factor("(I1-3)", a);
    factor("(I2-3)", b);
    terms.emplace_back(c, body);
  }
  if (library.include_ogden() && params.has_ogden && params.ogden_D != 0.0 && params.ogden_delta != 0.0) {
    const std::string d = fixed2(params.ogden_delta);
    terms.emplace_back(params.ogden_D, "(l1^" + d + " + l2^" + d + " + l3^" + d + " - 3)");
  }
  if (terms.empty()) return "0.00";
  std::string out;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const double c = terms[t].first;
    if (t == 0) {
      out += (c < 0.0 ? "-" : "") + fixed2(std::abs(c));
    } else {
      out += (c < 0.0 ? " - " : " + ") + fixed2(std::abs(c));
    }
    out += "*" + terms[t].second;
  }
  return out;
}

DiscoveryReport run_linear_discovery(const Dataset& dataset, int order, const LinearMethod& method,
                                     const KnotCriterion& selection) {
  DiscoveryReport report{HyperelasticLibrary(order, false), "", -1.0, {}, 0, {}, 0.0, ""};
  const QuadraticProblem problem = stage("assemble", [&] { return assemble_linear_problem(dataset, order); });

  Path normalized;
  if (const auto* cd = std::get_if<CdMethod>(&method)) {
    report.method = "cd";
    report.method_alpha = cd->alpha;
    const Vec w = stage("solve", [&] {
      std::optional<Vec> w0;
      if (cd->start != StartPoint::Ols) w0 = start_vector(cd->start, problem.n_features());
      return cd_solve(problem, cd->alpha, w0, cd->config);
    });
    normalized.knots.push_back(single_knot(cd->alpha, w, problem.mismatch(w)));
  } else {
    report.method = "lars-lasso";
    const auto& cfg = std::get<LarsLassoMethod>(method).config;
    normalized = stage("solve", [&] { return lars_lasso_path(problem, cfg); });
  }

  report.path = normalized;
  for (PathKnot& k : report.path.knots) k.w = rescale_solution(k.w, problem.column_scales());
  const double zero_mismatch = problem.mismatch(Vec::Zero(static_cast<Eigen::Index>(problem.n_features())));
  finish_report(report, dataset, selection, hyperelastic_ista_config(), zero_mismatch);
  return report;
}

DiscoveryReport run_nonlinear_discovery(const Dataset& dataset, const HyperelasticLibrary& library,
                                        const NonlinearMethod& method, const KnotCriterion& selection) {
  DiscoveryReport report{library, "", -1.0, {}, 0, {}, 0.0, ""};
  const SmoothObjective objective = stage("assemble", [&] { return nonlinear_objective(dataset, library); });

  IstaConfig refit_config;
  if (const auto* ista = std::get_if<IstaMethod>(&method)) {
    report.method = "ista";
    report.method_alpha = ista->alpha;
    refit_config = ista->config;
    const Vec w0 = stage("configure", [&] { return start_vector(ista->start, library.size()); });
    const Vec w = stage("solve", [&] { return ista_solve(objective, ista->alpha, w0, ista->config); });
    report.path.knots.push_back(single_knot(ista->alpha, w, objective.value(w)));
  } else {
    const auto& pw = std::get<PathwiseMethod>(method);
    report.method = "pathwise";
    refit_config = pw.config;
    report.path = stage("solve", [&] { return pathwise_ista(objective, pw.n_alpha, pw.config); });
  }
  const double zero_mismatch = objective.value(Vec::Zero(static_cast<Eigen::Index>(library.size())));
  finish_report(report, dataset, selection, refit_config, zero_mismatch);
  return report;
}

std::string report_to_json(const DiscoveryReport& report) {
  const auto names = report.library.parameter_names();
  json doc;
  doc["library"] = {{"mooney_order", report.library.mooney_order()},
                    {"ogden", report.library.include_ogden()},
                    {"parameters", names}};
  json method = {{"name", report.method}};
  if (report.method_alpha >= 0.0) method["alpha"] = report.method_alpha;
  doc["method"] = method;
  json path = json::array();
  for (const PathKnot& k : report.path.knots) {
    json w = json::array();
    for (Eigen::Index i = 0; i < k.w.size(); ++i) w.push_back(k.w(i));
    path.push_back({{"alpha", k.alpha}, {"w", w}, {"active", k.active}, {"mismatch", k.mismatch}});
  }
  doc["path"] = path;
  doc["selected"] = report.selected;
  json params = json::object();
  const Vec flat = report.refit.to_flat();
  for (std::size_t i = 0; i < names.size() && static_cast<Eigen::Index>(i) < flat.size(); ++i) {
    params[names[i]] = flat(static_cast<Eigen::Index>(i));
  }
  doc["refit"] = {{"params", params}, {"mismatch", report.refit_mismatch}};
  doc["energy"] = report.energy;
  return doc.dump(2) + "\n";
}

void write_path_csv(std::ostream& out, const Path& path, const HyperelasticLibrary& library) {
  out << "alpha";
  for (const std::string& n : library.parameter_names()) out << ',' << n;
  out << ",mismatch\n";
  for (const PathKnot& k : path.knots) {
    out << number17(k.alpha);
    for (Eigen::Index i = 0; i < k.w.size(); ++i) out << ',' << number17(k.w(i));
    out << ',' << number17(k.mismatch) << '\n';
  }
}

}  // namespace matdisc
