#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "wentzell/commands.hpp"
#include "wentzell/config.hpp"
#include "wentzell/errors.hpp"
#include "wentzell/report.hpp"

using namespace wentzell;
using nlohmann::json;

TEST_CASE("config defaults and presets") {
  const RunConfig d = RunConfig::from_json(json::object());
  CHECK(d.n == 100);
  CHECK_FALSE(d.tau);
  CHECK(d.effective_coupling().label == CouplingDescriptor::zero().label);

  const RunConfig a = RunConfig::from_json({{"n", 40}, {"tau", 0.5}});
  REQUIRE(a.tau);
  CHECK(a.effective_coupling().example_tau == 0.5);

  const RunConfig b = RunConfig::from_json({{"coupling", "example-8.1(tau=1.2)"}});
  REQUIRE(b.tau);
  CHECK(*b.tau == 1.2);
  const RunConfig c = RunConfig::from_json({{"coupling", {{"preset", "example-8.1"}, {"tau", -0.7}}}, {"tau", -0.7}});
  CHECK(*c.tau == -0.7);
  const RunConfig e = RunConfig::from_json({{"coupling", "example-6.10"}});
  CHECK_FALSE(e.tau);

  std::istringstream in(R"({"n": 12, "coupling": "skew", "u0": "e0"})");
  const RunConfig s = RunConfig::from_stream(in);
  CHECK(s.n == 12);
  CHECK(s.u0.materialize(s.grid()) == Vec::Unit(13, 0));
}

TEST_CASE("config rejects malformed documents") {
  const auto bad = [](const json& j) { CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError); };
  bad(json::array());
  bad({{"nn", 5}});
  bad({{"n", 1}});
  bad({{"n", 5000}});
  bad({{"n", 10.5}});
  bad({{"n", "ten"}});
  bad({{"samples", 1}});
  bad({{"t_final", 0.0}});
  bad({{"tol", -1.0}});
  bad({{"horizon", -1.0}});
  bad({{"rescale", 1}});
  bad({{"schema_version", 2}});
  bad({{"coupling", "example-8.1(tau=abc)"}});
  bad({{"coupling", "unknown"}});
  bad({{"coupling", "example-8.1(tau=1)"}, {"tau", 2.0}});
  bad({{"coupling", "example-6.10"}, {"tau", 2.0}});
  bad({{"coupling", {{"preset", "skew"}, {"tau", 1.0}}}});
  bad({{"coupling", {{"blocks", {{"B12", {{"multiplication", 1.0}}}}}}}});
  bad({{"coupling", {{"blocks", {{"B33", "zero"}}}}}});
  bad({{"coupling", {{"blocks", {{"B22", {{"dense", {{1, 2}, {3}}}}}}}}}});
  bad({{"coefficients", {{"c", 1.0}}}});
  bad({{"coefficients", {{"eta", -1.0}}}});
  bad({{"coefficients", {{"a", {{"spline", 1}}}}}});
  bad({{"u0", "twos"}});
  bad({{"n", 4}, {"u0", {1, 2, 3}}});
  bad({{"n", 4}, {"u0", {{"basis", 5}}}});
  std::istringstream broken("{\"n\": ");
  CHECK_THROWS_AS(RunConfig::from_stream(broken), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("initial data forms") {
  const RunConfig cfg = RunConfig::from_json({{"n", 4}});
  const Grid1D g = cfg.grid();
  CHECK(cfg.u0.materialize(g) == Vec::Ones(5));
  InitialDatum u;
  u.spec = "e_last";
  CHECK(u.materialize(g) == Vec::Unit(5, 4));
  u.spec = {{"basis", 2}};
  CHECK(u.materialize(g) == Vec::Unit(5, 2));
  u.spec = {0.0, 1.0, 2.0, 3.0, 4.0};
  CHECK(u.materialize(g)[3] == 3.0);
  u.spec = {{"poly", {0.0, 1.0}}};
  CHECK(u.materialize(g)[2] == doctest::Approx(0.5));
}

TEST_CASE("block descriptors round-trip through JSON") {
  const std::vector<json> blocks = {
      "zero",
      {{"dense", {{1.0, -2.0}, {0.5, 4.0}}}},
      {{"separable", {{"left", {{"poly", {1.0, 2.0}}}}, {"right", {{"trig", {{"amp", 2.0}, {"freq", 3.0}, {"phase", 0.1}}}}}}}},
      {{"multiplication", {{"constant", -0.3}}}},
  };
  for (const auto& b : blocks) CHECK(block_to_json(block_from_json(b)) == b);
  CHECK(block_to_json(block_from_json({{"zero", json::object()}})) == "zero");
  CHECK(std::holds_alternative<MultiplicationKernel>(block_from_json({{"diagonal", 1.0}})));
  CHECK_THROWS_AS(block_from_json({{"dense", {1, 2}}}), ConfigError);
  CHECK_THROWS_AS(block_from_json({{"separable", {{"left", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(block_from_json({{"dense", {{1.0}}}, {"zero", {}}}), ConfigError);

  const RunConfig cfg = RunConfig::from_json(
      {{"n", 8},
       {"coupling",
        {{"label", "mine"},
         {"blocks", {{"B11", {{"multiplication", -0.2}}}, {"B22", {{"dense", {{-1.0, 0.5}, {0.5, -1.0}}}}}}}}}});
  const RunConfig again = RunConfig::from_json(cfg.to_json());
  CHECK(again.to_json() == cfg.to_json());
  CHECK((again.generator().G - cfg.generator().G).norm() == 0.0);
}

TEST_CASE("regime sweep") {
  CHECK_THROWS_AS(cmd_sweep(0.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(cmd_sweep(1.0, 1.0, 5), ConfigError);
  const SweepResult s = cmd_sweep(0.0, 5.5, 111);
  REQUIRE(s.rows.size() == 111);
  CHECK(s.to_csv().rfind("tau,regime,re1,im1,re2,im2\n", 0) == 0);
  double last_positive = -1, first_complex = 10;
  for (std::size_t i = 0; i + 1 < s.rows.size(); ++i) {
    const auto& r = s.rows[i];
    const auto& next = s.rows[i + 1];
    if (r.regime == Regime::EventuallyStronglyPositive && next.regime == Regime::DominantSignChanging) {
      CHECK(r.tau < oracle::tau_p);
      CHECK(next.tau > oracle::tau_p);
    }
    if (r.regime != Regime::ComplexDominantPair && next.regime == Regime::ComplexDominantPair) {
      CHECK(r.tau < oracle::tau_s);
      CHECK(next.tau > oracle::tau_s);
    }
    if (r.regime == Regime::EventuallyStronglyPositive) last_positive = r.tau;
    if (r.regime == Regime::ComplexDominantPair) first_complex = std::min(first_complex, r.tau);
  }
  CHECK(s.rows[0].regime == Regime::PositiveSemigroup);
  CHECK(last_positive < oracle::tau_p);
  CHECK(last_positive > oracle::tau_p - 0.06);
  CHECK(first_complex > oracle::tau_s);
  CHECK(first_complex < oracle::tau_s + 0.06);
  REQUIRE(s.lambda1_monotone);
  CHECK(*s.lambda1_monotone);
  CHECK(s.to_json()["rows"].size() == 111);
}

TEST_CASE("thresholds report") {
  const json a = cmd_thresholds();
  const json b = cmd_thresholds();
  CHECK(a == b);
  CHECK(a["tau_p"].get<double>() == doctest::Approx(oracle::tau_p).epsilon(1e-13));
  CHECK(std::abs(a["derived"]["tau_p_minus_mu_p_over_sin_mu_p"].get<double>()) < 1e-12);
  CHECK(std::abs(a["derived"]["tau_star_minus_half_gap"].get<double>()) < 1e-12);
}

TEST_CASE("check reports agree on reference configurations") {
  {
    const CheckResult r = cmd_check(RunConfig::from_json({{"n", 40}}));
    CHECK(r.consistent);
    CHECK(r.report["markov"] == true);
    CHECK(r.report["positive"] == true);
    CHECK(r.report["kernel_dimension"] == 1);
    CHECK(r.report["asymptotic"] == "ConvergesToProjection");
  }
  {
    const CheckResult r = cmd_check(RunConfig::from_json({{"n", 40}, {"tau", 0.5}}));
    CHECK(r.consistent);
    CHECK(r.report["positive"] == false);
    CHECK(r.report["eventual"] == true);
  }
  {
    const CheckResult r = cmd_check(RunConfig::from_json({{"n", 40}, {"coupling", "example-6.10"}}));
    CHECK(r.consistent);
    CHECK(r.report["eventual"] == false);
    CHECK(r.report["kernel_dimension"] == 2);
  }
}

TEST_CASE("evolve and spectrum commands") {
  const EvolveResult ev = cmd_evolve(RunConfig::from_json({{"n", 30}, {"t_final", 2.0}, {"samples", 11}}));
  REQUIRE(ev.trace.mass.size() == 11);
  for (Eigen::Index k = 0; k < ev.trace.mass.size(); ++k) CHECK(std::abs(ev.trace.mass[k] - 3.0) <= 1e-9);
  const std::string svg = ev.to_svg();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);

  const json sp = cmd_spectrum(RunConfig::from_json({{"n", 30}, {"tau", 2.0}}));
  CHECK(sp["dominance"]["dominant"] == false);
  CHECK(sp["n"] == 30);
}

TEST_CASE("eigenfunction and projection commands") {
  CHECK_THROWS_AS(cmd_eigenfunction(2.0, 11), DomainError);
  const EigenfunctionResult z = cmd_eigenfunction(0.0, 11);
  CHECK(z.function.values.maxCoeff() - z.function.values.minCoeff() < 1e-14);
  const EigenfunctionResult p = cmd_eigenfunction(oracle::tau_p, 21);
  REQUIRE(p.function.zero);
  CHECK(*p.function.zero == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p.to_csv().rfind("x,", 0) == 0);

  const ProjRankResult pr = cmd_proj_rank(RunConfig::from_json({{"n", 40}, {"tau", 1.2}}));
  CHECK(pr.consistent);
  CHECK(pr.report["rank"] == 2);
}

TEST_CASE("command dispatch and exit codes") {
  CHECK(exit_code_for(ConfigError("x")) == kExitUsage);
  CHECK(exit_code_for(DomainError("x")) == kExitUsage);
  CHECK(exit_code_for(NumericalError("x")) == kExitNumerical);
  CHECK(exit_code_for(ContourError("x")) == kExitNumerical);
  CHECK(exit_code_for(ConsistencyError("x")) == kExitInconsistent);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitNumerical);

  std::ostringstream err;
  CommandOptions o;
  o.command = "frobnicate";
  CHECK(dispatch(o, err) == kExitUsage);
  o.command = "classify";
  CHECK(dispatch(o, err) == kExitUsage);  // no tau
  o.tau = 0.5;
  o.format = "svg";
  CHECK(dispatch(o, err) == kExitUsage);
  o.format = "";
  const CommandOutput out = run_command(o);
  CHECK(out.exit_code == kExitOk);
  CHECK(json::parse(out.text)["regime"] == "EventuallyStronglyPositive");

  CommandOptions t;
  t.command = "thresholds";
  t.format = "csv";
  CHECK(run_command(t).text.find("tau_p") != std::string::npos);
}

TEST_CASE("report helpers") {
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(std::nan("")) == "nan");
  CHECK(csv_number(INFINITY) == "inf");
  CHECK(csv_number(-INFINITY) == "-inf");
  CHECK(std::stod(csv_number(0.1 + 0.2)) == 0.1 + 0.2);
  const json s = stamp({{"a", 1}}, "cmd");
  CHECK(s["schema_version"] == kSchemaVersion);
  CHECK(s["command"] == "cmd");
  Vec x(3), y(3);
  x << 0, 1, 2;
  y << 1, NAN, 3;
  const std::string svg = svg_line_plot("t", "x", {{"a", x, y}});
  CHECK(svg.find("polyline") != std::string::npos);
}
