#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "matdisc/hyperelastic.hpp"
#include "matdisc/proximal.hpp"

namespace matdisc {

// Failure inside a discovery pipeline; stage names the step that raised and cause
// holds the original exception.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, std::exception_ptr cause)
      : Error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}
  const std::string& stage() const { return stage_; }
  std::exception_ptr cause() const { return cause_; }

 private:
  std::string stage_;
  std::exception_ptr cause_;
};

struct SparsityTarget {
  std::size_t k = 0;
};

struct MismatchPlateau {
  double rel_drop = 0.05;
};

using KnotCriterion = std::variant<SparsityTarget, MismatchPlateau>;

std::size_t select_knot(const Path& path, const KnotCriterion& criterion, double equality_tol = 1e-12);

enum class StartPoint { Zeros, Ones, Ols };

struct CdMethod {
  double alpha = 0.0;
  StartPoint start = StartPoint::Ols;  // in normalized-feature space
  SolverConfig config;
};

struct LarsLassoMethod {
  SolverConfig config;
};

using LinearMethod = std::variant<CdMethod, LarsLassoMethod>;

// Curvature along the Mooney coordinates of the hyperelastic mismatch is of order 1e-5,
// so the pipelines start ISTA from a large step and let backtracking settle it.
IstaConfig hyperelastic_ista_config();

struct IstaMethod {
  double alpha = 0.0;
  StartPoint start = StartPoint::Ones;
  IstaConfig config = hyperelastic_ista_config();
};

struct PathwiseMethod {
  std::size_t n_alpha = 1000;
  IstaConfig config = hyperelastic_ista_config();
};

using NonlinearMethod = std::variant<IstaMethod, PathwiseMethod>;

struct RefitResult {
  MaterialParams params;
  double mismatch = 0.0;
};

// Unregularized fit restricted to `support`. Without the Ogden pair this is a restricted
// least-squares solve; with it, ISTA at alpha = 0 runs from `warm_start` with the
// off-support coordinates held at zero.
RefitResult debias_refit(const Dataset& dataset, const HyperelasticLibrary& library, const IndexSet& support,
                         const std::optional<Vec>& warm_start = std::nullopt,
                         const IstaConfig& config = hyperelastic_ista_config());

// Support of a physical parameter vector, with a degenerate Ogden pair (D or delta zero) removed.
IndexSet effective_support(const HyperelasticLibrary& library, const Vec& w, double equality_tol = 1e-12);

// Number of model terms; the Ogden pair counts once.
std::size_t term_count(const HyperelasticLibrary& library, const MaterialParams& params);

std::string format_energy(const MaterialParams& params, const HyperelasticLibrary& library);

struct DiscoveryReport {
  HyperelasticLibrary library;
  std::string method;
  double method_alpha = -1.0;  // regularization weight for single-alpha methods, negative otherwise
  Path path;                   // physical parameters
  std::size_t selected = 0;
  MaterialParams refit;
  double refit_mismatch = 0.0;
  std::string energy;
};

DiscoveryReport run_linear_discovery(const Dataset& dataset, int order, const LinearMethod& method,
                                     const KnotCriterion& selection);

DiscoveryReport run_nonlinear_discovery(const Dataset& dataset, const HyperelasticLibrary& library,
                                        const NonlinearMethod& method, const KnotCriterion& selection);

std::string report_to_json(const DiscoveryReport& report);
void write_path_csv(std::ostream& out, const Path& path, const HyperelasticLibrary& library);

}  // namespace matdisc
