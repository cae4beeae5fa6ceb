#include "matdisc/hyperelastic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace matdisc {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// dI1/dF = 2F and dI2/dF = 2 I1 F - 2 F C, reduced to the measured stress component:
// UTC eliminates the pressure through the traction-free lateral faces,
// SS reads the shear entry directly.
std::array<double, 2> invariant_stress_factors(const KinematicState& s) {
  const Eigen::Matrix3d& F = s.F;
  const Eigen::Matrix3d C = F.transpose() * F;
  const Eigen::Matrix3d dI1 = 2.0 * F;
  const Eigen::Matrix3d dI2 = 2.0 * s.I1 * F - 2.0 * F * C;
  if (s.load_case == LoadCase::UTC) {
    const double ratio = F(2, 2) / F(0, 0);
    return {dI1(0, 0) - ratio * dI1(2, 2), dI2(0, 0) - ratio * dI2(2, 2)};
  }
  return {dI1(0, 1), dI2(0, 1)};
}

// Principal stretch that carries the load and its derivative along the control variable.
// UTC: lambda = F11 and the lateral stretches follow from incompressibility.
// SS: lambda1 = (g + sqrt(g^2 + 4)) / 2.
struct OgdenTerms {
  double base = 0.0;   // lambda^(d-1) - lateral power term
  double dbase = 0.0;  // derivative of base with respect to delta
  double chain = 1.0;  // dlambda1/dgamma for SS, 1 for UTC
};

OgdenTerms ogden_terms(const KinematicState& s, double delta) {
  const double lam = s.stretches[0];
  OgdenTerms t;
  if (s.load_case == LoadCase::UTC) {
    if (!(lam > 0.0)) throw NonPositiveStretch("uniaxial stretch must be positive");
    const double up = std::pow(lam, delta - 1.0);
    const double lateral = std::pow(lam, -delta / 2.0 - 1.0);
    const double log_lam = std::log(lam);
    t.base = up - lateral;
    t.dbase = log_lam * (up + 0.5 * lateral);
  } else {
    const double g = s.control;
    const double up = std::pow(lam, delta - 1.0);
    const double down = std::pow(lam, -delta - 1.0);
    const double log_lam = std::log(lam);
    t.base = up - down;
    t.dbase = log_lam * (up + down);
    t.chain = 0.5 * (1.0 + g / std::sqrt(g * g + 4.0));
  }
  return t;
}

}  // namespace

KinematicState kinematics(LoadCase load_case, double control) {
  KinematicState s;
  s.load_case = load_case;
  s.control = control;
  if (load_case == LoadCase::UTC) {
    if (!(control > 0.0)) throw NonPositiveStretch("F11 must be positive, got " + std::to_string(control));
    const double lateral = 1.0 / std::sqrt(control);
    s.stretches = {control, lateral, lateral};
    s.I1 = control * control + 2.0 / control;
    s.I2 = 2.0 * control + 1.0 / (control * control);
    s.F = Eigen::Vector3d(control, lateral, lateral).asDiagonal();
  } else {
    const double g = control;
    const double l1 = 0.5 * (g + std::sqrt(g * g + 4.0));
    s.stretches = {l1, 1.0 / l1, 1.0};
    s.I1 = 3.0 + g * g;
    s.I2 = 3.0 + g * g;
    s.F = Eigen::Matrix3d::Identity();
    s.F(0, 1) = g;
  }
  return s;
}

std::size_t mooney_feature_count(int order) {
  if (order < 1) throw InvalidArgument("Mooney-Rivlin order must be at least 1");
  return static_cast<std::size_t>(order * (order + 3) / 2);
}

HyperelasticLibrary::HyperelasticLibrary(int mooney_order, bool include_ogden)
    : order_(mooney_order), ogden_(include_ogden), mooney_count_(mooney_feature_count(mooney_order)) {
  for (int i = 1; i <= order_; ++i) {
    for (int j = 0; j <= i; ++j) slots_.push_back({FeatureSlot::Kind::Mooney, i, j});
  }
  if (ogden_) {
    slots_.push_back({FeatureSlot::Kind::OgdenD, 0, 0});
    slots_.push_back({FeatureSlot::Kind::OgdenDelta, 0, 0});
  }
}

std::size_t HyperelasticLibrary::d_index() const {
  if (!ogden_) throw InvalidArgument("library has no Ogden feature");
  return mooney_count_;
}

std::size_t HyperelasticLibrary::delta_index() const {
  if (!ogden_) throw InvalidArgument("library has no Ogden feature");
  return mooney_count_ + 1;
}

std::vector<std::string> HyperelasticLibrary::parameter_names() const {
  std::vector<std::string> names;
  for (const FeatureSlot& s : slots_) {
    switch (s.kind) {
      case FeatureSlot::Kind::Mooney:
        names.push_back("C" + std::to_string(s.degree - s.i2_power) + std::to_string(s.i2_power));
        break;
      case FeatureSlot::Kind::OgdenD:
        names.push_back("D");
        break;
      case FeatureSlot::Kind::OgdenDelta:
        names.push_back("delta");
        break;
    }
  }
  return names;
}

std::string HyperelasticLibrary::describe() const {
  std::ostringstream os;
  os << "mooney-rivlin order " << order_;
  if (ogden_) os << " + ogden";
  return os.str();
}

MaterialParams MaterialParams::from_flat(const HyperelasticLibrary& library, const Vec& w) {
  if (w.size() != static_cast<Eigen::Index>(library.size())) {
    throw LengthMismatch("parameter vector length does not match the library");
  }
  MaterialParams p;
  p.mooney_order = library.mooney_order();
  p.mooney = w.head(static_cast<Eigen::Index>(library.mooney_count()));
  p.has_ogden = library.include_ogden();
  if (p.has_ogden) {
    p.ogden_D = w(static_cast<Eigen::Index>(library.d_index()));
    p.ogden_delta = w(static_cast<Eigen::Index>(library.delta_index()));
  }
  return p;
}

Vec MaterialParams::to_flat() const {
  Vec w(mooney.size() + (has_ogden ? 2 : 0));
  w.head(mooney.size()) = mooney;
  if (has_ogden) {
    w(mooney.size()) = ogden_D;
    w(mooney.size() + 1) = ogden_delta;
  }
  return w;
}

Vec mooney_stress_features(const KinematicState& state, int order) {
  const auto factors = invariant_stress_factors(state);
  const double a = state.I1 - 3.0;
  const double b = state.I2 - 3.0;
  Vec out(static_cast<Eigen::Index>(mooney_feature_count(order)));
  Eigen::Index k = 0;
  for (int i = 1; i <= order; ++i) {
    for (int j = 0; j <= i; ++j) {
      const int p = i - j;
      const double dQ_dI1 = p > 0 ? p * ipow(a, p - 1) * ipow(b, j) : 0.0;
      const double dQ_dI2 = j > 0 ? j * ipow(a, p) * ipow(b, j - 1) : 0.0;
      out(k++) = dQ_dI1 * factors[0] + dQ_dI2 * factors[1];
    }
  }
  return out;
}

double ogden_stress(const KinematicState& state, double D, double delta) {
  const OgdenTerms t = ogden_terms(state, delta);
  return D * delta * t.base * t.chain;
}

OgdenPartials ogden_stress_partials(const KinematicState& state, double D, double delta) {
  const OgdenTerms t = ogden_terms(state, delta);
  return {delta * t.base * t.chain, D * t.chain * (t.base + delta * t.dbase)};
}

double model_stress(const MaterialParams& params, const KinematicState& state) {
  double p = 0.0;
  if (params.mooney.size() > 0) p += mooney_stress_features(state, params.mooney_order).dot(params.mooney);
  if (params.has_ogden) p += ogden_stress(state, params.ogden_D, params.ogden_delta);
  return p;
}

double energy_value(const MaterialParams& params, const KinematicState& state) {
  const double a = state.I1 - 3.0;
  const double b = state.I2 - 3.0;
  double W = 0.0;
  Eigen::Index k = 0;
  for (int i = 1; i <= params.mooney_order && k < params.mooney.size(); ++i) {
    for (int j = 0; j <= i; ++j) W += params.mooney(k++) * ipow(a, i - j) * ipow(b, j);
  }
  if (params.has_ogden) {
    const auto& l = state.stretches;
    const double d = params.ogden_delta;
    W += params.ogden_D * (std::pow(l[0], d) + std::pow(l[1], d) + std::pow(l[2], d) - 3.0);
  }
  return W;
}

Dataset::Dataset(std::vector<Sample> utc, std::vector<Sample> ss) : utc_(std::move(utc)), ss_(std::move(ss)) {
  if (utc_.empty() && ss_.empty()) throw InvalidArgument("dataset has no samples");
  for (const Sample& s : utc_) {
    if (!(s.control > 0.0)) throw NonPositiveStretch("UTC sample with F11 <= 0");
    if (!std::isfinite(s.stress) || !std::isfinite(s.control)) throw InvalidArgument("non-finite UTC sample");
    p11_max_ = std::max(p11_max_, std::abs(s.stress));
  }
  for (const Sample& s : ss_) {
    if (!std::isfinite(s.stress) || !std::isfinite(s.control)) throw InvalidArgument("non-finite SS sample");
    p12_max_ = std::max(p12_max_, std::abs(s.stress));
  }
}

bool Dataset::operator==(const Dataset& other) const {
  auto same = [](const std::vector<Sample>& x, const std::vector<Sample>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](const Sample& a, const Sample& b) {
      return a.control == b.control && a.stress == b.stress;
    });
  };
  return same(utc_, other.utc_) && same(ss_, other.ss_) && p11_max_ == other.p11_max_ && p12_max_ == other.p12_max_;
}

namespace {

// A load case whose stresses are all zero keeps its rows unscaled; they carry no signal either way.
double normalizer(double p_max) { return p_max > 0.0 ? p_max : 1.0; }

struct SampleRow {
  KinematicState state;
  double target = 0.0;  // stress / P^max
  double scale = 1.0;   // 1 / P^max
};

std::vector<SampleRow> sample_rows(const Dataset& d) {
  std::vector<SampleRow> rows;
  rows.reserve(d.size());
  const double s11 = 1.0 / normalizer(d.p11_max());
  const double s12 = 1.0 / normalizer(d.p12_max());
  for (const Sample& s : d.utc()) rows.push_back({kinematics(LoadCase::UTC, s.control), s.stress * s11, s11});
  for (const Sample& s : d.ss()) rows.push_back({kinematics(LoadCase::SS, s.control), s.stress * s12, s12});
  return rows;
}

}  // namespace

LinearSystem assemble_linear_system(const Dataset& dataset, int order) {
  const auto rows = sample_rows(dataset);
  LinearSystem sys{Mat(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(mooney_feature_count(order))),
                   Vec(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto rr = static_cast<Eigen::Index>(r);
    sys.features.row(rr) = rows[r].scale * mooney_stress_features(rows[r].state, order).transpose();
    sys.target(rr) = rows[r].target;
  }
  return sys;
}

QuadraticProblem assemble_linear_problem(const Dataset& dataset, int order) {
  LinearSystem sys = assemble_linear_system(dataset, order);
  return QuadraticProblem::from_features(sys.features, std::move(sys.target));
}

Vec ogden_feature_column(const Dataset& dataset, double delta) {
  const auto rows = sample_rows(dataset);
  Vec col(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    col(static_cast<Eigen::Index>(r)) = rows[r].scale * ogden_stress(rows[r].state, 1.0, delta);
  }
  return col;
}

namespace {

struct NonlinearData {
  std::vector<SampleRow> rows;
  Mat features;  // Mooney stress contributions, already divided by P^max
  Vec target;
  HyperelasticLibrary library;
};

Vec nonlinear_residual(const NonlinearData& d, const Vec& w) {
  const auto mc = static_cast<Eigen::Index>(d.library.mooney_count());
  Vec r = d.features * w.head(mc) - d.target;
  if (d.library.include_ogden()) {
    const double D = w(mc);
    const double delta = w(mc + 1);
    if (D == 0.0) return r;
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) += d.rows[i].scale * ogden_stress(d.rows[i].state, D, delta);
    }
  }
  return r;
}

}  // namespace

SmoothObjective nonlinear_objective(const Dataset& dataset, const HyperelasticLibrary& library) {
  auto data = std::make_shared<NonlinearData>(NonlinearData{sample_rows(dataset), Mat(), Vec(), library});
  const auto n = static_cast<Eigen::Index>(data->rows.size());
  data->features.resize(n, static_cast<Eigen::Index>(library.mooney_count()));
  data->target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const SampleRow& row = data->rows[static_cast<std::size_t>(i)];
    data->features.row(i) = row.scale * mooney_stress_features(row.state, library.mooney_order()).transpose();
    data->target(i) = row.target;
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  SmoothObjective obj;
  obj.dim = library.size();
  if (library.include_ogden()) obj.positive_coordinate = library.delta_index();
  obj.value = [data, inv_n](const Vec& w) {
    if (w.size() != static_cast<Eigen::Index>(data->library.size())) throw LengthMismatch("parameter length");
    return 0.5 * inv_n * nonlinear_residual(*data, w).squaredNorm();
  };
  obj.gradient = [data, inv_n](const Vec& w) -> Vec {
    if (w.size() != static_cast<Eigen::Index>(data->library.size())) throw LengthMismatch("parameter length");
    const Vec r = nonlinear_residual(*data, w);
    const auto mc = static_cast<Eigen::Index>(data->library.mooney_count());
    Vec g(w.size());
    g.head(mc) = inv_n * (data->features.transpose() * r);
    if (data->library.include_ogden()) {
      g(mc) = 0.0;
      g(mc + 1) = 0.0;
      // Both partials carry a factor D or delta, so the origin of the Ogden pair is flat.
      if (w(mc) == 0.0 && w(mc + 1) == 0.0) return g;
      double gD = 0.0;
      double gdelta = 0.0;
      for (std::size_t i = 0; i < data->rows.size(); ++i) {
        const OgdenPartials p = ogden_stress_partials(data->rows[i].state, w(mc), w(mc + 1));
        const double ri = r(static_cast<Eigen::Index>(i)) * data->rows[i].scale;
        gD += ri * p.dP_dD;
        gdelta += ri * p.dP_ddelta;
      }
      g(mc) = inv_n * gD;
      g(mc + 1) = inv_n * gdelta;
    }
    return g;
  };
  return obj;
}

}  // namespace matdisc
