#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "matdisc/core_sparse.hpp"
#include "matdisc/proximal.hpp"

namespace matdisc {

enum class LoadCase { UTC, SS };

// Incompressible homogeneous deformation for one load case. control is F11 for
// uniaxial tension/compression and the shear amount F12 for simple shear.
struct KinematicState {
  LoadCase load_case = LoadCase::UTC;
  double control = 1.0;
  double I1 = 3.0;
  double I2 = 3.0;
  std::array<double, 3> stretches{1.0, 1.0, 1.0};
  Eigen::Matrix3d F = Eigen::Matrix3d::Identity();
};

KinematicState kinematics(LoadCase load_case, double control);

struct FeatureSlot {
  enum class Kind { Mooney, OgdenD, OgdenDelta };
  Kind kind = Kind::Mooney;
  int degree = 0;   // total polynomial degree i
  int i2_power = 0; // j, the power of (I2 - 3); (I1 - 3) carries degree - j
};

// Generalized Mooney-Rivlin polynomial in (I1-3), (I2-3) up to mooney_order, sorted by
// total degree then by the (I2-3) power, optionally followed by the Ogden pair (D, delta).
class HyperelasticLibrary {
 public:
  explicit HyperelasticLibrary(int mooney_order = 4, bool include_ogden = false);

  int mooney_order() const { return order_; }
  bool include_ogden() const { return ogden_; }
  const std::vector<FeatureSlot>& feature_index() const { return slots_; }
  std::size_t size() const { return slots_.size(); }
  std::size_t mooney_count() const { return mooney_count_; }
  std::size_t d_index() const;
  std::size_t delta_index() const;
  // C10, C01, C20, ... with digits the powers of (I1-3) and (I2-3); then D, delta.
  std::vector<std::string> parameter_names() const;
  std::string describe() const;

 private:
  int order_;
  bool ogden_;
  std::size_t mooney_count_;
  std::vector<FeatureSlot> slots_;
};

std::size_t mooney_feature_count(int order);

struct MaterialParams {
  int mooney_order = 0;
  Vec mooney;
  bool has_ogden = false;
  double ogden_D = 0.0;
  double ogden_delta = 0.0;

  static MaterialParams from_flat(const HyperelasticLibrary& library, const Vec& w);
  Vec to_flat() const;
};

Vec mooney_stress_features(const KinematicState& state, int order);

double ogden_stress(const KinematicState& state, double D, double delta);

struct OgdenPartials {
  double dP_dD = 0.0;
  double dP_ddelta = 0.0;
};

OgdenPartials ogden_stress_partials(const KinematicState& state, double D, double delta);

// Measured stress component (P11 or P12) predicted by params in this state.
double model_stress(const MaterialParams& params, const KinematicState& state);

double energy_value(const MaterialParams& params, const KinematicState& state);

struct Sample {
  double control = 0.0;
  double stress = 0.0;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Sample> utc, std::vector<Sample> ss);

  const std::vector<Sample>& utc() const { return utc_; }
  const std::vector<Sample>& ss() const { return ss_; }
  double p11_max() const { return p11_max_; }
  double p12_max() const { return p12_max_; }
  std::size_t size() const { return utc_.size() + ss_.size(); }

  bool operator==(const Dataset& other) const;

 private:
  std::vector<Sample> utc_;
  std::vector<Sample> ss_;
  double p11_max_ = 0.0;
  double p12_max_ = 0.0;
};

// Unnormalized linear system: rows UTC then SS, each divided by its load-case stress maximum.
struct LinearSystem {
  Mat features;
  Vec target;
};

LinearSystem assemble_linear_system(const Dataset& dataset, int order);

QuadraticProblem assemble_linear_problem(const Dataset& dataset, int order);

// Normalized Ogden stresses with D = 1, in the row order of assemble_linear_system.
Vec ogden_feature_column(const Dataset& dataset, double delta);

SmoothObjective nonlinear_objective(const Dataset& dataset, const HyperelasticLibrary& library);

}  // namespace matdisc
