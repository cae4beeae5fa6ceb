#include "matdisc/datasets.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "matdisc/random.hpp"

namespace matdisc {

namespace {

constexpr int kTruthOrder = 4;

MaterialParams mooney_params(std::initializer_list<std::pair<std::size_t, double>> entries) {
  MaterialParams p;
  p.mooney_order = kTruthOrder;
  p.mooney = Vec::Zero(static_cast<Eigen::Index>(mooney_feature_count(kTruthOrder)));
  for (const auto& [k, v] : entries) p.mooney(static_cast<Eigen::Index>(k)) = v;
  return p;
}

// Flat Mooney indices: 0 = C10, 1 = C01, 2 = C20, 5 = C30.
constexpr std::size_t kC10 = 0;
constexpr std::size_t kC01 = 1;
constexpr std::size_t kC20 = 2;
constexpr std::size_t kC30 = 5;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& field, std::size_t line, const char* what) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + field + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  return v;
}

}  // namespace

TruthModel truth_model(TruthModelName name) {
  TruthModel m;
  m.name = name;
  switch (name) {
    case TruthModelName::NeoHookean:
      m.params = mooney_params({{kC10, 40.0}});
      break;
    case TruthModelName::MooneyRivlin:
      m.params = mooney_params({{kC10, 40.0}, {kC01, 20.0}});
      break;
    case TruthModelName::Yeoh:
      m.params = mooney_params({{kC10, 40.0}, {kC20, 10.0}, {kC30, 30.0}});
      break;
    case TruthModelName::Biderman:
      m.params = mooney_params({{kC10, 40.0}, {kC01, 20.0}, {kC20, 10.0}, {kC30, 30.0}});
      break;
    case TruthModelName::Ogden:
      m.params = mooney_params({});
      m.params.has_ogden = true;
      m.params.ogden_D = 5.0;
      m.params.ogden_delta = 8.0;
      break;
    case TruthModelName::Mixed:
      m.params = mooney_params({{kC10, 40.0}, {kC01, 20.0}});
      m.params.has_ogden = true;
      m.params.ogden_D = 5.0;
      m.params.ogden_delta = 8.0;
      break;
  }
  return m;
}

std::string model_name(TruthModelName name) {
  switch (name) {
    case TruthModelName::NeoHookean: return "neo-hookean";
    case TruthModelName::MooneyRivlin: return "mooney-rivlin";
    case TruthModelName::Yeoh: return "yeoh";
    case TruthModelName::Biderman: return "biderman";
    case TruthModelName::Ogden: return "ogden";
    case TruthModelName::Mixed: return "mixed";
  }
  return "unknown";
}

const std::vector<TruthModelName>& all_models() {
  static const std::vector<TruthModelName> models{TruthModelName::NeoHookean, TruthModelName::MooneyRivlin,
                                                  TruthModelName::Yeoh,       TruthModelName::Biderman,
                                                  TruthModelName::Ogden,      TruthModelName::Mixed};
  return models;
}

std::optional<TruthModelName> parse_model_name(const std::string& name) {
  for (TruthModelName m : all_models()) {
    if (model_name(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<double> grid_points(double lo, double hi, std::size_t count) {
  std::vector<double> pts;
  pts.reserve(count);
  if (count == 1) {
    pts.push_back(lo);
    return pts;
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (i + 1 == count) {
      pts.push_back(hi);
    } else {
      pts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  }
  return pts;
}

Dataset generate_truth(const TruthModel& model, const SamplingGrid& grid) {
  if (grid.n_utc + grid.n_ss == 0) throw InvalidArgument("sampling grid is empty");
  std::vector<Sample> utc;
  std::vector<Sample> ss;
  for (double f : grid_points(grid.utc_lo, grid.utc_hi, grid.n_utc)) {
    utc.push_back({f, model_stress(model.params, kinematics(LoadCase::UTC, f))});
  }
  for (double g : grid_points(grid.ss_lo, grid.ss_hi, grid.n_ss)) {
    ss.push_back({g, model_stress(model.params, kinematics(LoadCase::SS, g))});
  }
  return Dataset(std::move(utc), std::move(ss));
}

Dataset add_noise(const Dataset& dataset, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw InvalidArgument("noise level must be nonnegative");
  if (sigma == 0.0) return dataset;
  NormalStream normal(seed);
  std::vector<Sample> utc = dataset.utc();
  std::vector<Sample> ss = dataset.ss();
  for (Sample& s : utc) s.stress += sigma * normal.next();
  for (Sample& s : ss) s.stress += sigma * normal.next();
  return Dataset(std::move(utc), std::move(ss));
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << "load_case,control,stress\n";
  for (const Sample& s : dataset.utc()) out << "UTC," << format_number(s.control) << ',' << format_number(s.stress) << '\n';
  for (const Sample& s : dataset.ss()) out << "SS," << format_number(s.control) << ',' << format_number(s.stress) << '\n';
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_dataset(out, dataset);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "load_case,control,stress") throw ParseError(1, "expected header 'load_case,control,stress'");

  std::vector<Sample> utc;
  std::vector<Sample> ss;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    const double control = parse_number(fields[1], line_no, "control value");
    const double stress = parse_number(fields[2], line_no, "stress value");
    if (fields[0] == "UTC") {
      if (!ss.empty()) throw ParseError(line_no, "UTC rows must precede SS rows");
      if (!(control > 0.0)) throw ParseError(line_no, "F11 must be positive");
      utc.push_back({control, stress});
    } else if (fields[0] == "SS") {
      ss.push_back({control, stress});
    } else {
      throw ParseError(line_no, "unknown load case '" + fields[0] + "'");
    }
  }
  if (utc.empty() && ss.empty()) throw ParseError(line_no, "no samples");
  return Dataset(std::move(utc), std::move(ss));
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_dataset(in);
}

}  // namespace matdisc
