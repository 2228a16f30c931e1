#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vmlab/config.hpp"
#include "vmlab/csv.hpp"
#include "vmlab/error.hpp"

using namespace vmlab;
namespace fs = std::filesystem;

namespace {

Errc code_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "config parsed: " << text;
  return Errc::numeric;
}

}  // namespace

TEST(Config, MinimalAppliesDefaults) {
  const ExperimentConfig c = parse_config_text(R"({"objective": "quadratic"})");
  EXPECT_EQ(c.objective.family, "quadratic");
  EXPECT_EQ(c.n, 100);
  EXPECT_DOUBLE_EQ(c.gamma, 0.1);
  EXPECT_DOUBLE_EQ(c.beta, 1.0);
  EXPECT_TRUE(c.beta_defaulted());
  EXPECT_TRUE(c.runs.empty());
  EXPECT_EQ(c.x0_mode, X0Mode::signs);
  EXPECT_EQ(c.scheme, Scheme::vm);
}

TEST(Config, SweepIsCartesianProduct) {
  const ExperimentConfig c = parse_config_text(R"({
    "objective": {"family": "gauss_quad"},
    "eps": [{"family": "power", "a": 1}, {"family": "power", "a": 2}, {"family": "constant", "c0": 0.5}],
    "alpha": [{"family": "zero"}, {"family": "power", "a": 1}]
  })");
  ASSERT_EQ(c.runs.size(), 6u);
  EXPECT_EQ(c.runs[0].id, "vm00");
  EXPECT_EQ(c.runs[5].id, "vm05");
  EXPECT_EQ(c.runs[0].alpha.family(), ScheduleFamily::zero);
  EXPECT_EQ(c.runs[2].eps.family(), ScheduleFamily::constant);
  EXPECT_EQ(c.runs[3].alpha.family(), ScheduleFamily::power);
}

TEST(Config, ExplicitRunsAndComments) {
  const ExperimentConfig c = parse_config_text(R"({
    // two hand-picked pairs
    "objective": "poly50_quad",
    "runs": [{"eps": {"family": "power", "c0": 1, "a": 1}, "alpha": {"family": "zero"}},
             {"eps": {"family": "power", "c0": 1, "a": 3}, "alpha": {"family": "power", "c0": 1, "a": 1}}],
    "beta": 2, "T": 30, "seed": 9, "comparisons": ["vs_cn", "to_opt"], "rate_window": [2, 8]
  })");
  EXPECT_EQ(c.runs.size(), 2u);
  EXPECT_FALSE(c.beta_defaulted());
  EXPECT_DOUBLE_EQ(*c.horizon, 30.0);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.comparisons.size(), 2u);
  EXPECT_DOUBLE_EQ(c.rate_window->second, 8.0);
}

TEST(Config, ExplicitX0SetsDimension) {
  const ExperimentConfig c = parse_config_text(R"({"objective": "quadratic", "x0": [1, 2, 3]})");
  EXPECT_EQ(c.n, 3);
  EXPECT_EQ(c.x0_mode, X0Mode::explicit_values);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "gamma": -0.1})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "beta": 0})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "cubic"})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "colour": 1})"), Errc::config);
  EXPECT_EQ(code_of(R"({"gamma": 0.1})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", )"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "eps": {"family": "power", "a": -1}})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "n": 2, "x0": [1, 2, 3]})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "comparisons": ["vs_xyz"]})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": "quadratic", "rate_window": [5, 1]})"), Errc::config);
  EXPECT_EQ(code_of(R"({"objective": {"family": "quadratic", "spectrum": [1], "matrix": [[1]]}})"), Errc::config);
}

TEST(Config, ErrorCarriesLine) {
  try {
    parse_config_text("{\n  \"objective\": \"quadratic\",\n  \"gamma\": -1\n}", "cfg.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.index(), 3);
    EXPECT_EQ(std::string(e.what()).rfind("cfg.json:3:", 0), 0u) << e.what();
  }
}

TEST(Config, ScheduleJsonRoundTrip) {
  for (const Schedule& s : {Schedule::power(0.3, 2.0), Schedule::constant(0.7), Schedule::zero(),
                            Schedule::table({0, 1, 2}, {1, 0.5, 0.2})}) {
    const Schedule back = schedule_from_json(schedule_to_json(s));
    EXPECT_EQ(back.family(), s.family());
    for (double t : {0.0, 0.5, 1.7, 9.0}) EXPECT_DOUBLE_EQ(back(t), s(t));
  }
  EXPECT_THROW(schedule_from_json(nlohmann::json{{"family", "power"}, {"b", 1}}), Error);
}

TEST(MakeX0, SignsAreDeterministic) {
  const Vector a = make_x0(X0Mode::signs, 4, 123);
  const Vector b = make_x0(X0Mode::signs, 4, 123);
  EXPECT_EQ(a, b);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(std::abs(a(i)), 1.0);
  const Vector big = make_x0(X0Mode::signs, 100, 5);
  EXPECT_EQ(big.squaredNorm(), 100.0);
  EXPECT_NE(make_x0(X0Mode::signs, 64, 1), make_x0(X0Mode::signs, 64, 2));
}

TEST(MakeX0, ExplicitRoundTrips) {
  const Vector x = make_x0(X0Mode::explicit_values, 3, 0, {0.5, -2.0, 7.0});
  EXPECT_EQ(x(0), 0.5);
  EXPECT_EQ(x(1), -2.0);
  EXPECT_EQ(x(2), 7.0);
  EXPECT_THROW(make_x0(X0Mode::explicit_values, 2, 0, {1.0}), Error);
}

TEST(BuildSpec, DefaultSpectra) {
  ExperimentConfig c = parse_config_text(R"({"objective": "quadratic", "n": 5})");
  const QuadraticSpec q = build_spec(c);
  EXPECT_NEAR(q.spectrum()->front(), 0.1, 1e-14);
  EXPECT_NEAR(q.spectrum()->back(), 10.0, 1e-12);
  c = parse_config_text(R"({"objective": "gauss_quad", "n": 5})");
  const QuadraticSpec g = build_spec(c);
  EXPECT_NEAR(g.spectrum()->front(), 2.5, 1e-13);
  EXPECT_NEAR(g.spectrum()->back(), 25.0, 1e-12);
  c = parse_config_text(R"({"objective": {"family": "quadratic", "matrix": [[2, 1], [1, 2]]}})");
  EXPECT_EQ(c.n, 2);
  EXPECT_TRUE(build_spec(c).has_matrix());
}

TEST(Hash, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Csv, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Csv, WriteReadRoundTrip) {
  CsvTable t({"t", "distance"});
  t.add_row({0.0, 1.0 / 7.0});
  t.add_row({0.1, 1e-200});
  EXPECT_EQ(t.str().substr(0, 11), "t,distance\n");
  EXPECT_THROW(t.add_row({1.0}), Error);
  const fs::path p = fs::temp_directory_path() / "vmlab_csv_roundtrip.csv";
  t.write(p);
  const CsvTable back = read_csv(p);
  EXPECT_EQ(back.header(), t.header());
  EXPECT_EQ(back.data(), t.data());
  fs::remove(p);
  try {
    read_csv(fs::temp_directory_path() / "vmlab_does_not_exist.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io);
  }
}
