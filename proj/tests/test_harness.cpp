#include "doctest.h"
#include "harness/harness.hpp"
#include "numerics/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace wml;

namespace {

SpectralDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_spectral_data(in, "mem");
}

// Runs the parser and returns the error message, or "" when it succeeds.
std::string schema_message(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::schema);
    return e.what();
  }
  return "";
}

MomentRow row(long k, double m4) {
  MomentRow r;
  r.k = k;
  r.dim = 1;
  r.m4 = Real(m4);
  return r;
}

// Weights 24..48 with made-up fourth moments; k = 26, 30, ... are kept and carry zero.
MomentTable synthetic_table() {
  MomentTable t;
  for (long k = 24; k <= 48; k += 2) t.rows.push_back(row(k, k % 4 == 2 ? 0.0 : 0.1 * double(k - 20)));
  return t;
}

}  // namespace

TEST_CASE("spectral CSV: accepted layouts") {
  SpectralDataset empty = parse("#maass-spectral v1\n");
  CHECK(empty.rows.empty());
  CHECK(empty.t_max == 0);

  SpectralDataset d = parse("#maass-spectral v1\n# source: table A\n# note\nt_f,weighted_L4,err\n9.5,0.25,1e-3\n13,2,0\n");
  REQUIRE(d.rows.size() == 2);
  CHECK(d.source_label == "table A");
  CHECK(d.t_max == 13);
  CHECK(d.rows[0].err == 1e-3);

  SpectralDataset bare = parse("#maass-spectral v1\n1.5,0,0");
  CHECK(bare.rows.size() == 1);
}

TEST_CASE("spectral CSV: schema errors carry the line number") {
  CHECK(schema_message("").find("empty file") != std::string::npos);
  CHECK(schema_message("t_f,weighted_L4,err\n").find("mem:1:") == 0);
  CHECK(schema_message("#maass-spectral v1\r\n").find("CR") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,1,1\n\n").find("mem:3: blank") == 0);
  CHECK(schema_message("#maass-spectral v1\n1,-0.5,1\n").find("mem:2: weighted_L4 must be nonnegative") == 0);
  CHECK(schema_message("#maass-spectral v1\n1,1,-1\n").find("mem:2: err") == 0);
  CHECK(schema_message("#maass-spectral v1\n0,1,1\n").find("t_f must be positive") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,1,1\n1,2,1\n").find("mem:3: duplicate") == 0);
  CHECK(schema_message("#maass-spectral v1\n2,1,1\n1,2,1\n").find("mem:3: t_f not increasing") == 0);
  CHECK(schema_message("#maass-spectral v1\n1,1\n").find("expected 3 fields, found 2") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,1,1,\n").find("found 4") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,1,\n").find("malformed err") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1, 1,1\n").find("malformed weighted_L4") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,nan,1\n").find("malformed") != std::string::npos);
  CHECK(schema_message("#maass-spectral v1\n1,1,1\nt_f,weighted_L4,err\n").find("column line") != std::string::npos);
}

TEST_CASE("spectral CSV: missing file is an i/o error") {
  try {
    load_spectral_data("/nonexistent/spectral.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
}

TEST_CASE("spectral CSV: bundled sample and round trip") {
  SpectralDataset d = load_spectral_data(WML_DATA_DIR "/maass_sample_v1.csv");
  REQUIRE(d.rows.size() == 8);
  CHECK(d.t_max == d.rows.back().t);
  CHECK(d.t_max == doctest::Approx(18.18091783453));
  CHECK(d.rows.front().t == doctest::Approx(9.53369526135));
  CHECK_FALSE(d.source_label.empty());

  std::string text = format_spectral_data(d);
  SpectralDataset again = parse(text);
  CHECK(format_spectral_data(again) == text);
  REQUIRE(again.rows.size() == d.rows.size());
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    CHECK(again.rows[i].t == d.rows[i].t);
    CHECK(again.rows[i].weighted_L4 == d.rows[i].weighted_L4);
    CHECK(again.rows[i].err == d.rows[i].err);
  }
}

TEST_CASE("Maass term is linear in the dataset") {
  WorkingPrecision wp(PrecisionConfig::with_digits(30));
  SpectralDataset ds = parse("#maass-spectral v1\n9.5,0.3,0.01\n12.2,1.7,0.02\n14.1,0.9,0\n");
  TransformGrid plus, minus;
  const double hp[] = {0.7, -0.2, 0.05}, hm[] = {1e-3, 2e-4, -1e-5};
  for (std::size_t i = 0; i < 3; ++i) {
    plus.rows.push_back({ds.rows[i].t, Complex(Real(hp[i])), Real(1e-18)});
    minus.rows.push_back({ds.rows[i].t, Complex(Real(hm[i])), Real(1e-18)});
  }
  TermValue a = maass_term(ds, plus, minus);
  CHECK(a.value.to_double() == doctest::Approx(0.3 * 0.7 - 1.7 * 0.2 + 0.9 * 0.05).epsilon(1e-14));
  CHECK(a.budget >= 0.0);
  // the minus channel and the data errors enter the budget
  CHECK(a.budget.to_double() >= 0.01 * 0.7 + 0.02 * 0.2 + 1e-3 * 0.3);

  SpectralDataset half;
  TransformGrid plus2, minus2;
  for (std::size_t i = 0; i < 3; ++i) {
    SpectralDatum d = ds.rows[i];
    d.weighted_L4 /= 2;
    d.err /= 2;
    for (int c = 0; c < 2; ++c) {
      half.rows.push_back(d);
      plus2.rows.push_back(plus.rows[i]);
      minus2.rows.push_back(minus.rows[i]);
    }
  }
  TermValue b = maass_term(half, plus2, minus2);
  CHECK(std::fabs((a.value - b.value).to_double()) <= 1e-12 * std::fabs(a.value.to_double()));
  CHECK(std::fabs((a.budget - b.budget).to_double()) <= 1e-12 * a.budget.to_double());

  plus2.rows.pop_back();
  CHECK_THROWS_AS(maass_term(half, plus2, minus2), Error);
  CHECK(maass_term(TestFunctionParams{}, SpectralDataset{}, TransformConfig{}).value.is_zero());
}

TEST_CASE("report residual and JSON layout") {
  ReciprocityReport r;
  r.lhs_holomorphic = 0.1 + 0.2;
  r.rhs_maass_plus = 1.0 / 3;
  r.rhs_eisenstein_plus = 0.7776961318722638;
  r.rhs_holomorphic_dual = -2.5e-9;
  r.rhs_main_term = 1.0401250844198436;
  r.budgets.rhs_main_term = 1e-12;
  r.residual = report_residual(r.lhs_holomorphic, r.rhs_maass_plus, r.rhs_eisenstein_plus, r.rhs_holomorphic_dual,
                               r.rhs_main_term);
  CHECK(r.residual == 0.1 + 0.2 - (1.0 / 3 + 0.7776961318722638 + -2.5e-9 + 1.0401250844198436));
  r.assumptions = {"a", "b"};
  r.K = 12;
  r.L = 2;

  std::string text = r.to_json();
  nlohmann::json j = nlohmann::json::parse(text);
  double again = report_residual(j["lhs_holomorphic"], j["rhs_maass_plus"], j["rhs_eisenstein_plus"],
                                 j["rhs_holomorphic_dual"], j["rhs_main_term"]);
  CHECK(again == j["residual"].get<double>());
  CHECK(again == r.residual);

  const char* order[] = {"\"lhs_holomorphic\"", "\"rhs_maass_plus\"", "\"rhs_eisenstein_plus\"",
                         "\"rhs_holomorphic_dual\"", "\"rhs_main_term\"", "\"budgets\"", "\"residual\"",
                         "\"assumptions\""};
  std::size_t last = 0;
  for (const char* key : order) {
    std::size_t at = text.find(key);
    REQUIRE(at != std::string::npos);
    CHECK(at >= last);
    last = at;
  }
  CHECK(j["budgets"].contains("maass_tail_budget"));
  CHECK(text.back() == '\n');
}

TEST_CASE("report preconditions") {
  TestFunctionParams p;
  p.K = 64;
  p.L = 2;
  CHECK_THROWS_AS(reciprocity_report(p, SpectralDataset{}, TransformConfig{}), Error);
  p.K = 20;
  p.L = 4;
  CHECK_THROWS_AS(reciprocity_report(p, SpectralDataset{}, TransformConfig{}), Error);
}

TEST_CASE("Eisenstein term preconditions") {
  TestFunctionParams p;
  TransformConfig tc;
  tc.cfg = PrecisionConfig::with_digits(30);
  double floor_cap = 12 * std::log(12.0) / 2;
  CHECK_THROWS_AS(eisenstein_term(KernelVariant::hol, p, tc, 2 * floor_cap), Error);
  CHECK_THROWS_AS(eisenstein_term(KernelVariant::plus, p, tc, 0.9 * floor_cap), Error);
  CHECK_THROWS_AS(eisenstein_term(KernelVariant::plus, p, tc, 2 * floor_cap, 7), Error);
  CHECK_THROWS_AS(eisenstein_term(KernelVariant::plus, p, tc, 2 * floor_cap, 16, 0), Error);
}

TEST_CASE("dyadic statistics") {
  WorkingPrecision wp(PrecisionConfig::with_digits(30));
  MomentTable t = synthetic_table();

  DyadicStats big = dyadic_stats(t, 24, 1e6);
  CHECK(big.S.is_zero());
  CHECK(big.S_star.is_zero());

  Real full;
  for (auto& r : t.rows) full += r.m4 * r.m4;
  DyadicStats all = dyadic_stats(t, 24, 0);
  CHECK(all.S == full);

  Real prev_S = all.S;
  for (double V = 0.05; V < 4; V *= 1.3) {
    DyadicStats s = dyadic_stats(t, 24, V);
    CHECK(s.S_star <= s.S);
    CHECK(s.S <= prev_S);
    prev_S = s.S;
  }
  // the window condition V <= M <= 2V picks out exactly the rows with M in [0.4, 0.8]
  DyadicStats w = dyadic_stats(t, 24, 0.4);
  CHECK(w.S_star.to_double() == doctest::Approx(0.4 * 0.4 + 0.8 * 0.8));

  MomentTable gap = t;
  gap.rows.erase(gap.rows.begin() + 3);
  try {
    dyadic_stats(gap, 24, 1);
    FAIL("expected a coverage error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
    CHECK(std::string(e.what()).find("30") != std::string::npos);
  }
  CHECK_THROWS_AS(dyadic_stats(t, 24, -1), Error);
}

TEST_CASE("density ranges") {
  const long T = 10000;
  double t = double(T);
  CHECK(density_range(T, 0) == 1);
  CHECK(density_range(T, std::pow(t, 2 * selberg_theta)) == 1);
  CHECK(density_range(T, std::pow(t, 2 * selberg_theta) * 1.01) == 2);
  CHECK(density_range(T, std::pow(t, 2 * (1 - selberg_theta) / 7) * 1.01) == 3);
  CHECK(density_range(T, 1e9) == 4);
  int prev = 1;
  for (double V = 0.5; V < 1e4; V *= 1.5) {
    int r = density_range(T, V);
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(selberg_theta == 7.0 / 64);
}
