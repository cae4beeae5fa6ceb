#include "matdisc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "matdisc/datasets.hpp"
#include "matdisc/discovery.hpp"

namespace matdisc {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<std::string> model_names() {
  std::vector<std::string> names;
  for (TruthModelName m : all_models()) names.push_back(model_name(m));
  return names;
}

KnotCriterion parse_selection(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("--select expects sparsity:K or plateau:R, got '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::string value = spec.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "sparsity") {
      const long k = std::stol(value, &used);
      if (used != value.size() || k < 0) throw std::invalid_argument(value);
      return SparsityTarget{static_cast<std::size_t>(k)};
    }
    if (kind == "plateau") {
      const double r = std::stod(value, &used);
      if (used != value.size() || !(r > 0.0)) throw std::invalid_argument(value);
      return MismatchPlateau{r};
    }
  } catch (const std::logic_error&) {
    throw UsageError("invalid value in --select '" + spec + "'");
  }
  throw UsageError("--select kind must be sparsity or plateau, got '" + kind + "'");
}

StartPoint parse_start(const std::string& s) {
  if (s == "zeros") return StartPoint::Zeros;
  if (s == "ones") return StartPoint::Ones;
  return StartPoint::Ols;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string path_csv(const Path& path, const HyperelasticLibrary& library) {
  std::ostringstream os;
  write_path_csv(os, path, library);
  return os.str();
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

// ---- generate ----

struct GenerateOptions {
  std::string model;
  std::size_t n_utc = 50;
  std::size_t n_ss = 50;
  double sigma = 0.0;
};

int cmd_generate(const GlobalOptions& g, const GenerateOptions& o, std::ostream& out) {
  if (g.out.empty()) throw UsageError("generate requires --out <file>");
  if (o.n_utc + o.n_ss == 0) throw UsageError("--n-utc and --n-ss cannot both be zero");
  if (!(o.sigma >= 0.0)) throw UsageError("--sigma must be nonnegative");
  SamplingGrid grid;
  grid.n_utc = o.n_utc;
  grid.n_ss = o.n_ss;
  const Dataset data = add_noise(generate_truth(truth_model(*parse_model_name(o.model)), grid), o.sigma, g.seed);
  write_dataset(fs::path(g.out), data);
  out << "model " << o.model << ", sigma " << o.sigma << ", seed " << g.seed << "\n";
  out << "UTC samples: " << data.utc().size() << ", P11_max = " << sci(data.p11_max()) << "\n";
  out << "SS samples: " << data.ss().size() << ", P12_max = " << sci(data.p12_max()) << "\n";
  out << "wrote " << g.out << "\n";
  return 0;
}

// ---- discover / path-export ----

struct DiscoverOptions {
  std::string data;
  std::string method;
  std::optional<double> alpha;
  std::optional<double> alpha_ratio;
  std::optional<std::size_t> n_alpha;
  std::optional<std::string> w0;
  int order = 4;
  bool ogden = false;
  std::optional<std::string> select;
  std::optional<double> step;
  std::optional<std::size_t> max_steps;
  std::optional<double> tol;
};

bool is_linear(const std::string& method) { return method == "cd" || method == "lars-lasso"; }

void validate_discover(const DiscoverOptions& o) {
  const bool single_alpha = o.method == "cd" || o.method == "ista";
  if (single_alpha && !o.alpha && !o.alpha_ratio) throw UsageError("--method " + o.method + " requires --alpha");
  if (o.alpha && o.alpha_ratio) throw UsageError("--alpha and --alpha-ratio are mutually exclusive");
  if (!single_alpha && (o.alpha || o.alpha_ratio)) throw UsageError("--alpha applies to cd and ista only");
  if (o.alpha && !(*o.alpha >= 0.0)) throw UsageError("--alpha must be nonnegative");
  if (o.alpha_ratio && !(*o.alpha_ratio >= 0.0)) throw UsageError("--alpha-ratio must be nonnegative");
  if (o.n_alpha && o.method != "pathwise") throw UsageError("--n-alpha applies to pathwise only");
  if (o.n_alpha && *o.n_alpha < 2) throw UsageError("--n-alpha must be at least 2");
  if (o.w0) {
    if (o.method == "cd") {
      // zeros, ones and ols are all valid
    } else if (o.method == "ista") {
      if (*o.w0 == "ols") throw UsageError("--w0 ols is only available with --method cd");
    } else {
      throw UsageError("--w0 applies to cd and ista only");
    }
  }
  if (is_linear(o.method) && o.ogden) throw UsageError("--ogden requires --method ista or pathwise");
  if (o.method == "lars-lasso" && o.tol) throw UsageError("--tol does not apply to lars-lasso");
  if (is_linear(o.method) && o.step) throw UsageError("--step applies to ista and pathwise only");
  if (o.order < 1 || o.order > 8) throw UsageError("--order must be between 1 and 8");
  if (o.step && !(*o.step > 0.0)) throw UsageError("--step must be positive");
  if (o.tol && !(*o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.max_steps && *o.max_steps == 0) throw UsageError("--max-steps must be positive");
}

KnotCriterion default_selection(const DiscoverOptions& o, std::size_t n_params) {
  if (o.select) return parse_selection(*o.select);
  if (o.method == "cd" || o.method == "ista") return SparsityTarget{n_params};
  if (o.method == "pathwise") return SparsityTarget{4};
  return MismatchPlateau{0.05};
}

DiscoveryReport run_discovery(const DiscoverOptions& o, const Dataset& data) {
  const HyperelasticLibrary library(o.order, o.ogden);
  const KnotCriterion selection = default_selection(o, library.size());
  if (is_linear(o.method)) {
    SolverConfig cfg;
    if (o.max_steps) cfg.max_steps = *o.max_steps;
    if (o.tol) cfg.tol = *o.tol;
    if (o.method == "cd") {
      double alpha = o.alpha ? *o.alpha : 0.0;
      if (o.alpha_ratio) alpha = *o.alpha_ratio * alpha_max_quadratic(assemble_linear_problem(data, o.order));
      return run_linear_discovery(data, o.order, CdMethod{alpha, parse_start(o.w0.value_or("ols")), cfg}, selection);
    }
    return run_linear_discovery(data, o.order, LarsLassoMethod{cfg}, selection);
  }
  IstaConfig cfg = hyperelastic_ista_config();
  if (o.step) cfg.step = *o.step;
  if (o.max_steps) cfg.max_steps = *o.max_steps;
  if (o.tol) cfg.tol = *o.tol;
  if (o.method == "ista") {
    double alpha = o.alpha ? *o.alpha : 0.0;
    if (o.alpha_ratio) alpha = *o.alpha_ratio * alpha_max_general(nonlinear_objective(data, library));
    return run_nonlinear_discovery(data, library, IstaMethod{alpha, parse_start(o.w0.value_or("ones")), cfg},
                                   selection);
  }
  return run_nonlinear_discovery(data, library, PathwiseMethod{o.n_alpha.value_or(1000), cfg}, selection);
}

void print_summary(const DiscoveryReport& r, std::ostream& out) {
  const PathKnot& k = r.path.knots[r.selected];
  out << "method: " << r.method << " (" << r.library.describe() << ")\n";
  out << "path knots: " << r.path.knots.size() << (r.path.early_stopped ? " (stopped early at the alpha floor)" : "")
      << "\n";
  out << "selected knot: " << r.selected << " (alpha = " << sci(k.alpha) << ", mismatch = " << sci(k.mismatch)
      << ")\n";
  out << "energy: " << r.energy << "\n";
  out << "refit mismatch: " << sci(r.refit_mismatch) << "\n";
}

int cmd_discover(const GlobalOptions& g, const DiscoverOptions& o, std::ostream& out) {
  validate_discover(o);
  if (o.select) parse_selection(*o.select);  // reject a bad --select before reading data
  const Dataset data = read_dataset(fs::path(o.data));
  const DiscoveryReport report = run_discovery(o, data);
  print_summary(report, out);
  if (!g.out.empty()) {
    write_text(fs::path(g.out), g.format == "csv" ? path_csv(report.path, report.library) : report_to_json(report));
    out << "wrote " << g.out << "\n";
  }
  return 0;
}

int cmd_path_export(const GlobalOptions& g, const DiscoverOptions& o, std::ostream& out) {
  if (g.out.empty()) throw UsageError("path-export requires --out <file>");
  if (o.method != "lars-lasso" && o.method != "pathwise") {
    throw UsageError("path-export supports --method lars-lasso or pathwise");
  }
  validate_discover(o);
  const Dataset data = read_dataset(fs::path(o.data));
  const HyperelasticLibrary library(o.order, o.ogden);
  Path path;
  if (o.method == "lars-lasso") {
    const QuadraticProblem problem = assemble_linear_problem(data, o.order);
    path = lars_lasso_path(problem);
    for (PathKnot& k : path.knots) k.w = rescale_solution(k.w, problem.column_scales());
  } else {
    IstaConfig cfg = hyperelastic_ista_config();
    if (o.step) cfg.step = *o.step;
    if (o.max_steps) cfg.max_steps = *o.max_steps;
    if (o.tol) cfg.tol = *o.tol;
    path = pathwise_ista(nonlinear_objective(data, library), o.n_alpha.value_or(1000), cfg);
  }
  write_text(fs::path(g.out), path_csv(path, library));
  out << "path knots: " << path.knots.size() << (path.early_stopped ? " (stopped early at the alpha floor)" : "")
      << "\n";
  out << "wrote " << g.out << "\n";
  return 0;
}

// ---- grad-check ----

struct GradCheckOptions {
  std::string data;
  std::string model = "mixed";
  int order = 4;
  bool no_ogden = false;
  std::size_t trials = 20;
};

int cmd_grad_check(const GlobalOptions& g, const GradCheckOptions& o, std::ostream& out) {
  if (o.trials == 0) throw UsageError("--trials must be positive");
  const Dataset data = o.data.empty() ? generate_truth(truth_model(*parse_model_name(o.model)))
                                      : read_dataset(fs::path(o.data));
  const HyperelasticLibrary library(o.order, !o.no_ogden);
  const GradientReport rep = check_gradient(nonlinear_objective(data, library), o.trials, g.seed);
  out << "library: " << library.describe() << "\n";
  out << "trials: " << rep.trials << "\n";
  out << "max relative error: " << sci(rep.max_relative_error) << "\n";
  out << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 1;
}

// ---- bench ----

struct IstaRatio {
  double ratio = 0.01;
};

using BenchMethod = std::variant<CdMethod, LarsLassoMethod, IstaRatio, PathwiseMethod>;
using BenchCheck = std::function<std::optional<std::string>(const DiscoveryReport&)>;

struct BenchCase {
  std::string id;
  TruthModelName model;
  double sigma;
  bool ogden;
  BenchMethod method;
  KnotCriterion selection;
  std::optional<double> published_mismatch;
  BenchCheck check;
};

std::optional<std::string> expect_mooney(const DiscoveryReport& r, const std::vector<std::pair<std::size_t, double>>& truth,
                                         double tol, double max_mismatch) {
  const Vec& c = r.refit.mooney;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    double want = 0.0;
    for (const auto& [k, v] : truth) {
      if (static_cast<Eigen::Index>(k) == i) want = v;
    }
    if (want == 0.0 && c(i) != 0.0) return "unexpected term " + r.library.parameter_names()[static_cast<std::size_t>(i)];
    if (std::abs(c(i) - want) > tol) {
      return r.library.parameter_names()[static_cast<std::size_t>(i)] + " off by " + sci(c(i) - want);
    }
  }
  if (!(r.refit_mismatch < max_mismatch)) return "mismatch " + sci(r.refit_mismatch);
  return std::nullopt;
}

std::optional<std::string> noisy_check(const DiscoveryReport& r) {
  const std::size_t terms = term_count(r.library, r.refit);
  if (terms > 4) return std::to_string(terms) + " terms";
  if (!(r.refit_mismatch <= 0.01)) return "mismatch " + sci(r.refit_mismatch);
  return std::nullopt;
}

std::vector<BenchCase> bench_cases(const std::vector<double>& sigmas) {
  using M = TruthModelName;
  std::vector<BenchCase> cases;
  for (double sigma : sigmas) {
    const bool clean = sigma == 0.0;
    auto pick = [&](BenchCheck clean_check) -> BenchCheck { return clean ? clean_check : BenchCheck(noisy_check); };
    auto lars_sel = [&](std::size_t k) -> KnotCriterion {
      if (clean) return SparsityTarget{k};
      return MismatchPlateau{0.05};
    };
    auto published = [&](double v) -> std::optional<double> {
      if (clean) return v;
      return std::nullopt;
    };
    cases.push_back({"linear-neo-hookean-cd", M::NeoHookean, sigma, false, CdMethod{0.01, StartPoint::Ols, {}},
                     SparsityTarget{14}, published(7.34e-33), pick([](const DiscoveryReport& r) {
                       return expect_mooney(r, {{0, 40.0}}, 1e-6, 1e-12);
                     })});
    if (!clean) {
      // From the OLS start of noisy data cyclic CD needs millions of sweeps; start from zero instead.
      cases.back().method = CdMethod{0.01, StartPoint::Zeros, {}};
      for (M m : {M::MooneyRivlin, M::Yeoh, M::Biderman}) {
        cases.push_back({"linear-" + model_name(m) + "-cd", m, sigma, false, CdMethod{0.01, StartPoint::Zeros, {}},
                         SparsityTarget{14}, std::nullopt, BenchCheck(noisy_check)});
      }
    }
    cases.push_back({"linear-neo-hookean", M::NeoHookean, sigma, false, LarsLassoMethod{}, lars_sel(1),
                     published(7.34e-33), pick([](const DiscoveryReport& r) {
                       return expect_mooney(r, {{0, 40.0}}, 1e-6, 1e-12);
                     })});
    cases.push_back({"linear-mooney-rivlin", M::MooneyRivlin, sigma, false, LarsLassoMethod{}, lars_sel(2),
                     published(3.76e-32), pick([](const DiscoveryReport& r) {
                       return expect_mooney(r, {{0, 40.0}, {1, 20.0}}, 1e-6, 1e-12);
                     })});
    cases.push_back({"linear-yeoh", M::Yeoh, sigma, false, LarsLassoMethod{}, lars_sel(3), published(3.84e-32),
                     pick([](const DiscoveryReport& r) {
                       return expect_mooney(r, {{0, 40.0}, {2, 10.0}, {5, 30.0}}, 1e-4, 1e-12);
                     })});
    cases.push_back({"linear-biderman", M::Biderman, sigma, false, LarsLassoMethod{}, lars_sel(3), published(1.98e-4),
                     pick([](const DiscoveryReport& r) -> std::optional<std::string> {
                       const std::size_t terms = term_count(r.library, r.refit);
                       if (terms > 3) return std::to_string(terms) + " terms";
                       if (!(r.refit_mismatch <= 2e-4)) return "mismatch " + sci(r.refit_mismatch);
                       return std::nullopt;
                     })});
    cases.push_back({"nonlinear-ogden", M::Ogden, sigma, true, IstaRatio{}, SparsityTarget{16}, published(6.21e-7),
                     pick([](const DiscoveryReport& r) -> std::optional<std::string> {
                       if (term_count(r.library, r.refit) != 1) return "expected the Ogden term alone";
                       if (!(r.refit.ogden_D >= 4.8 && r.refit.ogden_D <= 5.2)) return "D = " + sci(r.refit.ogden_D);
                       if (!(r.refit.ogden_delta >= 7.9 && r.refit.ogden_delta <= 8.1)) {
                         return "delta = " + sci(r.refit.ogden_delta);
                       }
                       if (!(r.refit_mismatch < 1e-5)) return "mismatch " + sci(r.refit_mismatch);
                       return std::nullopt;
                     })});
    cases.push_back({"nonlinear-mooney-rivlin", M::MooneyRivlin, sigma, true, IstaRatio{}, SparsityTarget{16},
                     published(4.28e-5), clean ? BenchCheck() : BenchCheck(noisy_check)});
    cases.push_back({"nonlinear-mixed", M::Mixed, sigma, true, IstaRatio{}, SparsityTarget{16}, published(5.57e-5),
                     clean ? BenchCheck() : BenchCheck(noisy_check)});
    if (!clean) {
      for (M m : {M::MooneyRivlin, M::Ogden, M::Mixed}) {
        cases.push_back({"pathwise-" + model_name(m), m, sigma, true, PathwiseMethod{}, SparsityTarget{4}, std::nullopt,
                         BenchCheck(noisy_check)});
      }
    }
  }
  return cases;
}

std::string sigma_tag(double sigma) {
  std::ostringstream os;
  os << sigma;
  return os.str();
}

// Index at which feature `index` joins a path and the later knot where it is removed.
std::optional<std::pair<std::size_t, std::size_t>> transient(const Path& path, std::size_t index) {
  std::optional<std::size_t> entered;
  for (std::size_t k = 0; k < path.knots.size(); ++k) {
    const bool on = path.knots[k].w(static_cast<Eigen::Index>(index)) != 0.0;
    if (on && !entered) entered = k;
    if (!on && entered) return std::make_pair(*entered, k);
  }
  return std::nullopt;
}

int cmd_bench(const GlobalOptions& g, const std::optional<double>& sigma, std::ostream& out, std::ostream& err) {
  const fs::path dir = g.out.empty() ? fs::path("bench") : fs::path(g.out);
  fs::create_directories(dir);
  std::vector<double> sigmas = sigma ? std::vector<double>{*sigma} : std::vector<double>{0.0, 5.0};
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw UsageError("--sigma must be nonnegative");
  }

  std::ostringstream summary;
  summary << "benchmark,sigma,method,energy,terms,mismatch,published_mismatch,status\n";
  bool clean_failure = false;
  for (const BenchCase& c : bench_cases(sigmas)) {
    const Dataset data = add_noise(generate_truth(truth_model(c.model)), c.sigma, g.seed);
    DiscoveryReport report;
    std::string status = "info";
    try {
      if (const auto* cd = std::get_if<CdMethod>(&c.method)) {
        report = run_linear_discovery(data, 4, *cd, c.selection);
      } else if (const auto* lars = std::get_if<LarsLassoMethod>(&c.method)) {
        report = run_linear_discovery(data, 4, *lars, c.selection);
      } else {
        const HyperelasticLibrary library(4, c.ogden);
        if (const auto* ratio = std::get_if<IstaRatio>(&c.method)) {
          const double alpha = ratio->ratio * alpha_max_general(nonlinear_objective(data, library));
          report = run_nonlinear_discovery(data, library, IstaMethod{alpha}, c.selection);
        } else {
          report = run_nonlinear_discovery(data, library, std::get<PathwiseMethod>(c.method), c.selection);
        }
      }
    } catch (const std::exception& e) {
      err << c.id << " (sigma " << c.sigma << "): " << e.what() << "\n";
      summary << c.id << ',' << sigma_tag(c.sigma) << ",,,,,," << "error\n";
      if (c.sigma == 0.0 && c.check) clean_failure = true;
      continue;
    }
    if (c.check) {
      const auto problem = c.check(report);
      status = problem ? "fail" : "pass";
      if (problem) {
        err << c.id << " (sigma " << c.sigma << "): " << *problem << "\n";
        if (c.sigma == 0.0) clean_failure = true;
      }
    }
    const std::string stem = c.id + "_sigma" + sigma_tag(c.sigma);
    write_text(dir / (stem + ".json"), report_to_json(report));
    if (report.path.knots.size() > 1) write_text(dir / (stem + "_path.csv"), path_csv(report.path, report.library));

    char mismatch[64];
    std::snprintf(mismatch, sizeof mismatch, "%.6e", report.refit_mismatch);
    summary << c.id << ',' << sigma_tag(c.sigma) << ',' << report.method << ',' << report.energy << ','
            << term_count(report.library, report.refit) << ',' << mismatch << ','
            << (c.published_mismatch ? sci(*c.published_mismatch) : std::string()) << ',' << status << "\n";
    out << stem << ": " << report.energy << "  (mismatch " << sci(report.refit_mismatch) << ", " << status << ")\n";
    if (c.id == "linear-yeoh") {
      // (I1-3)(I2-3) is flat index 3.
      if (const auto t = transient(report.path, 3)) {
        out << "  (I1-3)*(I2-3) enters at knot " << t->first << " and drops at knot " << t->second << "\n";
      } else {
        out << "  (I1-3)*(I2-3) does not appear transiently on this path\n";
      }
    }
  }
  write_text(dir / "summary.csv", summary.str());
  out << "wrote " << (dir / "summary.csv").string() << "\n";
  return clean_failure ? 1 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse regression and hyperelastic model discovery"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random draw (default 0)");
  app.add_option("--out", g.out, "Output file, or directory for bench");
  app.add_option("--format", g.format, "Report format for discover")->check(CLI::IsMember({"json", "csv"}));

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark dataset as CSV");
  generate->add_option("--model", gen.model, "Truth model")->required()->check(CLI::IsMember(model_names()));
  generate->add_option("--n-utc", gen.n_utc, "Uniaxial samples on F11 in [0.75, 1.5]");
  generate->add_option("--n-ss", gen.n_ss, "Simple shear samples on F12 in [0, 0.5]");
  generate->add_option("--sigma", gen.sigma, "Standard deviation of additive Gaussian stress noise");

  DiscoverOptions disc;
  auto add_discover_flags = [&](CLI::App* sub, bool export_only) {
    sub->add_option("--data", disc.data, "Dataset CSV")->required();
    auto* m = sub->add_option("--method", disc.method, "Solver");
    if (export_only) {
      m->check(CLI::IsMember({"lars-lasso", "pathwise"}))->default_val("lars-lasso");
    } else {
      m->required()->check(CLI::IsMember({"cd", "lars-lasso", "ista", "pathwise"}));
      sub->add_option("--alpha", disc.alpha, "Regularization weight (cd, ista)");
      sub->add_option("--alpha-ratio", disc.alpha_ratio, "Regularization weight as a fraction of alpha_max");
      sub->add_option("--w0", disc.w0, "Initial guess")->check(CLI::IsMember({"zeros", "ones", "ols"}));
      sub->add_option("--select", disc.select, "Knot selection: sparsity:K or plateau:R");
    }
    sub->add_option("--n-alpha", disc.n_alpha, "Number of alpha values for pathwise ISTA (default 1000)");
    sub->add_option("--order", disc.order, "Mooney-Rivlin polynomial order (default 4)");
    sub->add_flag("--ogden", disc.ogden, "Append the Ogden feature (nonlinear methods)");
    sub->add_option("--step", disc.step, "Initial ISTA step size (default 1e6, backtracking)");
    sub->add_option("--max-steps", disc.max_steps, "Iteration cap per solve");
    sub->add_option("--tol", disc.tol, "Convergence tolerance");
  };
  auto* discover = app.add_subcommand("discover", "Run a discovery pipeline on a dataset");
  add_discover_flags(discover, false);
  auto* path_export = app.add_subcommand("path-export", "Export a regularization path as CSV");
  add_discover_flags(path_export, true);

  GradCheckOptions gc;
  auto* grad = app.add_subcommand("grad-check", "Compare the analytic mismatch gradient with finite differences");
  grad->add_option("--data", gc.data, "Dataset CSV (default: noise-free truth data of --model)");
  grad->add_option("--model", gc.model, "Truth model for generated data")->check(CLI::IsMember(model_names()));
  grad->add_option("--order", gc.order, "Mooney-Rivlin polynomial order (default 4)");
  grad->add_flag("--no-ogden", gc.no_ogden, "Drop the Ogden feature from the library");
  grad->add_option("--trials", gc.trials, "Number of random points (default 20)");

  std::optional<double> bench_sigma;
  auto* bench = app.add_subcommand("bench", "Rerun all benchmark discoveries and write reports");
  bench->add_option("--sigma", bench_sigma, "Only run this noise level (default: 0 and 5)");

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(g, gen, out);
    if (discover->parsed()) return cmd_discover(g, disc, out);
    if (path_export->parsed()) return cmd_path_export(g, disc, out);
    if (grad->parsed()) return cmd_grad_check(g, gc, out);
    if (bench->parsed()) return cmd_bench(g, bench_sigma, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 2;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"matdisc"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace matdisc
