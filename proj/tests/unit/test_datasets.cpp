#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "matdisc/datasets.hpp"
#include "matdisc/hyperelastic.hpp"

using namespace matdisc;

namespace {

const Sample& last(const std::vector<Sample>& s) { return s.back(); }

std::vector<double> stresses(const Dataset& d) {
  std::vector<double> out;
  for (const Sample& s : d.utc()) out.push_back(s.stress);
  for (const Sample& s : d.ss()) out.push_back(s.stress);
  return out;
}

}  // namespace

TEST(TruthModels, Parameters) {
  const TruthModel neo = truth_model(TruthModelName::NeoHookean);
  EXPECT_EQ(neo.params.mooney(0), 40.0);
  EXPECT_EQ(neo.params.mooney.cwiseAbs().sum(), 40.0);
  EXPECT_FALSE(neo.params.has_ogden);

  const TruthModel yeoh = truth_model(TruthModelName::Yeoh);
  const HyperelasticLibrary lib(yeoh.params.mooney_order);
  const auto names = lib.parameter_names();
  double c20 = 0.0, c30 = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == "C20") c20 = yeoh.params.mooney(static_cast<Eigen::Index>(i));
    if (names[i] == "C30") c30 = yeoh.params.mooney(static_cast<Eigen::Index>(i));
  }
  EXPECT_EQ(c20, 10.0);
  EXPECT_EQ(c30, 30.0);

  const TruthModel ogden = truth_model(TruthModelName::Ogden);
  EXPECT_TRUE(ogden.params.has_ogden);
  EXPECT_EQ(ogden.params.ogden_D, 5.0);
  EXPECT_EQ(ogden.params.ogden_delta, 8.0);
  EXPECT_EQ(ogden.params.mooney.cwiseAbs().sum(), 0.0);

  const TruthModel mixed = truth_model(TruthModelName::Mixed);
  EXPECT_EQ(mixed.params.mooney(0), 40.0);
  EXPECT_EQ(mixed.params.mooney(1), 20.0);
  EXPECT_EQ(mixed.params.ogden_D, 5.0);
  EXPECT_EQ(mixed.params.ogden_delta, 8.0);
}

TEST(TruthModels, NamesRoundTrip) {
  for (TruthModelName m : all_models()) {
    const auto parsed = parse_model_name(model_name(m));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, m);
  }
  EXPECT_FALSE(parse_model_name("nope").has_value());
  EXPECT_EQ(all_models().size(), 6u);
}

TEST(GridPoints, EndpointsInclusive) {
  const auto g = grid_points(0.75, 1.5, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_EQ(g.front(), 0.75);
  EXPECT_EQ(g.back(), 1.5);
  EXPECT_DOUBLE_EQ(g[1], 1.0);
  EXPECT_EQ(grid_points(0.0, 0.5, 1), std::vector<double>{0.0});
  EXPECT_TRUE(grid_points(0.0, 0.5, 0).empty());
}

TEST(GenerateTruth, NeoHookeanClosedForms) {
  const Dataset d = generate_truth(truth_model(TruthModelName::NeoHookean));
  ASSERT_EQ(d.utc().size(), 50u);
  ASSERT_EQ(d.ss().size(), 50u);
  EXPECT_EQ(last(d.utc()).control, 1.5);
  EXPECT_NEAR(last(d.utc()).stress, 80.0 * (1.5 - 1.0 / (1.5 * 1.5)), 1e-12);
  EXPECT_NEAR(last(d.utc()).stress, 84.44444444444444, 1e-12);
  EXPECT_EQ(last(d.ss()).control, 0.5);
  EXPECT_NEAR(last(d.ss()).stress, 40.0, 1e-12);
  EXPECT_NEAR(d.p11_max(), 84.44444444444444, 1e-12);
  EXPECT_NEAR(d.p12_max(), 40.0, 1e-12);
}

TEST(GenerateTruth, UndeformedIsStressFree) {
  SamplingGrid grid;
  grid.n_utc = 4;  // 0.75, 1.0, 1.25, 1.5
  for (TruthModelName m : all_models()) {
    const Dataset d = generate_truth(truth_model(m), grid);
    EXPECT_EQ(d.utc()[1].control, 1.0);
    EXPECT_NEAR(d.utc()[1].stress, 0.0, 1e-12) << model_name(m);
    EXPECT_NEAR(d.ss()[0].stress, 0.0, 1e-12) << model_name(m);
  }
}

TEST(GenerateTruth, Deterministic) {
  for (TruthModelName m : all_models()) {
    EXPECT_TRUE(generate_truth(truth_model(m)) == generate_truth(truth_model(m)));
  }
}

TEST(GenerateTruth, ExactAtTruthParameters) {
  for (TruthModelName m : all_models()) {
    const TruthModel model = truth_model(m);
    const Dataset d = generate_truth(model);
    const HyperelasticLibrary lib(model.params.mooney_order, true);
    MaterialParams p = model.params;
    p.has_ogden = true;
    const SmoothObjective f = nonlinear_objective(d, lib);
    EXPECT_LT(f.value(p.to_flat()), 5e-28) << model_name(m);
  }
}

TEST(AddNoise, ZeroSigmaIsIdentity) {
  const Dataset d = generate_truth(truth_model(TruthModelName::Yeoh));
  const Dataset n = add_noise(d, 0.0, 123);
  EXPECT_TRUE(n == d);
  EXPECT_EQ(stresses(n), stresses(d));
}

TEST(AddNoise, SeededAndReproducible) {
  const Dataset d = generate_truth(truth_model(TruthModelName::Ogden));
  EXPECT_EQ(stresses(add_noise(d, 5.0, 7)), stresses(add_noise(d, 5.0, 7)));
  EXPECT_NE(stresses(add_noise(d, 5.0, 7)), stresses(add_noise(d, 5.0, 8)));
}

TEST(AddNoise, EmpiricalStandardDeviation) {
  SamplingGrid grid;
  grid.n_utc = 5000;
  grid.n_ss = 5000;
  const Dataset d = generate_truth(truth_model(TruthModelName::MooneyRivlin), grid);
  const Dataset n = add_noise(d, 5.0, 0);
  const auto a = stresses(d);
  const auto b = stresses(n);
  ASSERT_EQ(a.size(), 10000u);
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += b[i] - a[i];
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) var += (b[i] - a[i] - mean) * (b[i] - a[i] - mean);
  const double sd = std::sqrt(var / static_cast<double>(a.size() - 1));
  EXPECT_GE(sd, 4.8);
  EXPECT_LE(sd, 5.2);
  EXPECT_LT(std::abs(mean), 0.2);
}

TEST(AddNoise, ChangesAlmostEveryEntry) {
  const Dataset d = generate_truth(truth_model(TruthModelName::Biderman));
  const auto a = stresses(d);
  const auto b = stresses(add_noise(d, 5.0, 3));
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
  EXPECT_GE(static_cast<double>(changed), 0.99 * static_cast<double>(a.size()));
}

TEST(AddNoise, MaximaFromNoisyValues) {
  const Dataset n = add_noise(generate_truth(truth_model(TruthModelName::NeoHookean)), 5.0, 11);
  double p11 = 0.0, p12 = 0.0;
  for (const Sample& s : n.utc()) p11 = std::max(p11, std::abs(s.stress));
  for (const Sample& s : n.ss()) p12 = std::max(p12, std::abs(s.stress));
  EXPECT_EQ(n.p11_max(), p11);
  EXPECT_EQ(n.p12_max(), p12);
}

TEST(DatasetIo, RoundTripBitExact) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Sample> utc, ss;
    for (int i = 0; i < 7 + trial; ++i) utc.push_back({0.75 + 0.75 * std::abs(u(gen)) / 100.0, u(gen)});
    for (int i = 0; i < trial; ++i) ss.push_back({std::abs(u(gen)) / 200.0, u(gen) * 1e-7});
    const Dataset d(utc, ss);
    std::stringstream buf;
    write_dataset(buf, d);
    const Dataset r = read_dataset(buf);
    EXPECT_TRUE(r == d);
    EXPECT_EQ(stresses(r), stresses(d));
  }
}

TEST(DatasetIo, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "matdisc_test_datasets_roundtrip.csv";
  const Dataset d = add_noise(generate_truth(truth_model(TruthModelName::Mixed)), 5.0, 9);
  write_dataset(path, d);
  EXPECT_TRUE(read_dataset(path) == d);
  std::filesystem::remove(path);
}

TEST(DatasetIo, FormatHeaderAndOrder) {
  std::stringstream buf;
  write_dataset(buf, Dataset({{1.5, 2.0}}, {{0.5, 1.0}}));
  std::string line;
  std::getline(buf, line);
  EXPECT_EQ(line, "load_case,control,stress");
  std::getline(buf, line);
  EXPECT_EQ(line.rfind("UTC,", 0), 0u);
  std::getline(buf, line);
  EXPECT_EQ(line.rfind("SS,", 0), 0u);
}

TEST(DatasetIo, MalformedRowReportsLine) {
  std::stringstream buf("load_case,control,stress\nUTC,1.0,0.0\nUTC,1.5\n");
  try {
    read_dataset(buf);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream extra("load_case,control,stress\nUTC,1.0,0.0,4\n");
  EXPECT_THROW(read_dataset(extra), ParseError);
  std::stringstream bad_number("load_case,control,stress\nSS,0.1,abc\n");
  EXPECT_THROW(read_dataset(bad_number), ParseError);
}

TEST(DatasetIo, EmptyShearSection) {
  std::stringstream buf("load_case,control,stress\nUTC,1.0,0.0\nUTC,1.5,3.0\n");
  const Dataset d = read_dataset(buf);
  EXPECT_EQ(d.utc().size(), 2u);
  EXPECT_EQ(d.ss().size(), 0u);
}

TEST(DatasetIo, MissingFile) {
  EXPECT_THROW(read_dataset(std::filesystem::path("/nonexistent/matdisc/none.csv")), IoError);
  EXPECT_THROW(write_dataset(std::filesystem::path("/nonexistent/matdisc/none.csv"), Dataset({{1.0, 0.0}}, {})),
               IoError);
}
