#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "matdisc/hyperelastic.hpp"

namespace matdisc {

enum class TruthModelName { NeoHookean, MooneyRivlin, Yeoh, Biderman, Ogden, Mixed };

struct TruthModel {
  TruthModelName name = TruthModelName::NeoHookean;
  MaterialParams params;
};

TruthModel truth_model(TruthModelName name);
std::string model_name(TruthModelName name);
// Accepts the canonical names (neo-hookean, mooney-rivlin, yeoh, biderman, ogden, mixed).
std::optional<TruthModelName> parse_model_name(const std::string& name);
const std::vector<TruthModelName>& all_models();

struct SamplingGrid {
  std::size_t n_utc = 50;
  double utc_lo = 0.75;
  double utc_hi = 1.5;
  std::size_t n_ss = 50;
  double ss_lo = 0.0;
  double ss_hi = 0.5;
};

// Equidistant points with both endpoints; a single point sits at lo.
std::vector<double> grid_points(double lo, double hi, std::size_t count);

Dataset generate_truth(const TruthModel& model, const SamplingGrid& grid = {});

// Adds independent N(0, sigma^2) noise to every stress, UTC samples first. The normal
// stream is Box-Muller over SplitMix64 seeded with `seed`.
Dataset add_noise(const Dataset& dataset, double sigma, std::uint64_t seed);

void write_dataset(std::ostream& out, const Dataset& dataset);
void write_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset read_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace matdisc
