#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "ddpopt/experiments.hpp"
#include "json.hpp"

using namespace ddpopt;

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(1e-12), "1e-12");
  EXPECT_EQ(format_double(0.1), "0.1");
  for (const double v : {1.0 / 3.0, 2.6227738828307167e-05, -7.125, 1e300}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(Grid, LinearAndLogValues) {
  const Grid g = parse_grid("0:10:5");
  const auto v = g.values();
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v[0], 0.0);
  EXPECT_DOUBLE_EQ(v[2], 5.0);
  EXPECT_DOUBLE_EQ(v[4], 10.0);
  const auto l = parse_grid("0.1:10:3", true).values();
  EXPECT_NEAR(l[1], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(l[2], 10.0);
}

TEST(Grid, RejectsMalformed) {
  EXPECT_THROW(parse_grid("0:10"), ConfigError);
  EXPECT_THROW(parse_grid("a:10:5"), ConfigError);
  EXPECT_THROW(parse_grid("0:10:1"), ConfigError);
  EXPECT_THROW(parse_grid("0:10:5", true), ConfigError);
}

TEST(Config, RoundTrip) {
  SweepConfig c;
  c.family = "erf-mu";
  c.omega0T = 4.25;
  c.muT = 0.1;
  c.sweep = "muT";
  c.grid = parse_grid("0.01:2:33", true);
  c.methods = {Method::ode, Method::series};
  c.rel_tol = 3e-9;
  c.threads = 3;
  c.ddp_basis = "superadiabatic";
  c.d_source = "uniform";
  const SweepConfig back = parse_config(serialize_config(c));
  EXPECT_EQ(back, c);
}

TEST(Config, CommentsAndOrder) {
  const SweepConfig c = parse_config(
      "# sweep over the splitting\n"
      "grid = 0.5:8:4   # four points\n"
      "grid_scale = log\n"
      "sweep = deltaT\n");
  EXPECT_TRUE(c.grid.log_scale);
  EXPECT_EQ(c.grid.count, 4);
  EXPECT_EQ(c.sweep, "deltaT");
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("colour = blue\n"), ConfigError);
  EXPECT_THROW(parse_config("family = square\n"), ConfigError);
  EXPECT_THROW(parse_config("omega0T = fast\n"), ConfigError);
  EXPECT_THROW(parse_config("rel_tol = 0.5\n"), ConfigError);
  EXPECT_THROW(parse_config("methods = ode,magic\n"), ConfigError);
  EXPECT_THROW(parse_config("just some text\n"), ConfigError);
  EXPECT_THROW(parse_config("threads = 1.5\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/path.cfg"), ConfigError);
}

TEST(Config, MethodNames) {
  for (const Method m : {Method::ode, Method::ddp_generic, Method::ddp_two_point, Method::ddp_sech, Method::series})
    EXPECT_EQ(parse_method(to_string(m)), m);
}

TEST(Sweep, RowsInGridOrderAndDeterministic) {
  SweepConfig c;
  c.grid = parse_grid("0.5:4:8");
  c.threads = 4;
  const auto a = run_sweep(c);
  c.threads = 1;
  const auto b = run_sweep(c);
  ASSERT_EQ(a.size(), 8u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i].sweep_value, c.grid.values()[i]);
  c.threads = 4;
  EXPECT_EQ(to_csv(c, a), to_csv(c, b));
}

TEST(Sweep, ErfImageMatchesIndependentIntegration) {
  SweepConfig c;
  c.family = "erf";
  const auto r = evaluate_point(c, 5.0);
  EXPECT_TRUE(r.error.empty()) << r.error;
  ASSERT_TRUE(r.p_adiabatic_ode.has_value());
  EXPECT_NEAR(*r.p_adiabatic_ode, 2.6227738828307167e-05, 1e-11);
  EXPECT_NEAR(*r.ln_one_minus_p, std::log1p(-*r.p_adiabatic_ode), 1e-18);
  ASSERT_TRUE(r.p_ddp_sech.has_value());
  ASSERT_TRUE(r.p_ddp_generic.has_value());
  // constant splitting: no points in the diabatic basis, a pair in the image
  EXPECT_EQ(*r.n_points, 0);
  c.ddp_basis = "superadiabatic";
  const auto s = evaluate_point(c, 5.0);
  EXPECT_EQ(*s.n_points, 2);
  EXPECT_NEAR(*s.p_ddp_generic_raw, *s.p_ddp_two_point, 1e-12);
}

TEST(Sweep, ZeroCouplingIsTrivial) {
  SweepConfig c;
  const auto r = evaluate_point(c, 0.0);
  EXPECT_TRUE(r.error.empty()) << r.error;
  EXPECT_EQ(*r.p_adiabatic_ode, 0.0);
  EXPECT_EQ(*r.p_ddp_generic, 0.0);
  EXPECT_EQ(*r.n_points, 0);
}

TEST(Sweep, StageErrorsAreRecorded) {
  SweepConfig c;
  c.family = "landau-zener";
  c.ddp_basis = "superadiabatic";
  const auto r = evaluate_point(c, 1.0);
  EXPECT_NE(r.error.find("ddp-generic"), std::string::npos);
  EXPECT_TRUE(r.p_adiabatic_ode.has_value());
  EXPECT_FALSE(r.p_ddp_sech.has_value());
}

TEST(Output, CsvSchema) {
  SweepConfig c;
  c.grid = parse_grid("1:2:2");
  const std::string csv = to_csv(c, run_sweep(c));
  EXPECT_EQ(csv.rfind("# family = gaussian\n", 0), 0u);
  EXPECT_NE(csv.find("\nsweep_value,p_adiabatic_ode,p_diabatic_ode,p_ddp_sech,p_ddp_two_point,p_ddp_generic,"
                     "ln_one_minus_p,norm_drift,n_points,error,p_ddp_generic_raw,p_ddp_series\n"),
            std::string::npos);
  int data_lines = 0;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sweep_value", 0) == 0) continue;
    ++data_lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 11) << line;
  }
  EXPECT_EQ(data_lines, 2);
}

TEST(Output, JsonMirrorsCsv) {
  SweepConfig c;
  c.grid = parse_grid("1:2:2");
  const auto rows = run_sweep(c);
  const auto j = nlohmann::json::parse(to_json(c, rows).dump());
  EXPECT_EQ(j["config"]["family"], "gaussian");
  ASSERT_EQ(j["rows"].size(), 2u);
  EXPECT_DOUBLE_EQ(j["rows"][1]["p_adiabatic_ode"].get<double>(), *rows[1].p_adiabatic_ode);
  EXPECT_TRUE(j["rows"][0]["p_ddp_series"].is_null());
  EXPECT_EQ(j["columns"].size(), csv_columns().size());
}

TEST(Output, CsvQuotesErrors) {
  SweepConfig c;
  SweepRecord r;
  r.sweep_value = 1.0;
  r.error = "a, \"b\"";
  const std::string csv = to_csv(c, {r});
  EXPECT_NE(csv.find("\"a, \"\"b\"\"\""), std::string::npos);
}
