#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wentzell/errors.hpp"
#include "wentzell/matrix_exp.hpp"
#include "wentzell/order_checks.hpp"
#include "wentzell/semigroup.hpp"

using namespace wentzell;

namespace {

DiscreteGenerator make(int n, const CouplingDescriptor& d) {
  const Grid1D g(n);
  return assemble_generator(g, CoefficientSet::laplacian(), build_kernel_blocks(g, d));
}

Mat random_matrix(std::mt19937& rng, int n, bool metzler) {
  std::uniform_real_distribution<double> off(metzler ? 0.01 : -1.0, 1.0), diag(-2.0, 0.5);
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = i == j ? diag(rng) : off(rng);
  return A;
}

double m_norm(const Mat& E, const Vec& w) {
  const Vec s = w.cwiseSqrt();
  const Mat S = s.asDiagonal() * E * s.cwiseInverse().asDiagonal();
  return Eigen::JacobiSVD<Mat>(S).singularValues()[0];
}

}  // namespace

TEST_CASE("exponential of trivial matrices") {
  CHECK(expm(Mat::Zero(4, 4), 3.0).isApprox(Mat::Identity(4, 4), 1e-15));
  Mat d = Mat::Zero(2, 2);
  d.diagonal() << -1, -2;
  const Mat e = expm(d, 1.0);
  CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(e(0, 1) == 0.0);
  CHECK_THROWS_AS(expm(d, -1.0), DomainError);
  CHECK_THROWS_AS(expm(Mat::Zero(2, 3)), DimensionError);
  CHECK_THROWS_AS(expm(1000.0 * Mat::Identity(3, 3), 1.0), ScalingError);
}

TEST_CASE("rotation generator gives cos and sin") {
  Mat r(2, 2);
  r << 0, -1, 1, 0;
  const Mat e = expm(r, 2.5);
  CHECK(e(0, 0) == doctest::Approx(std::cos(2.5)).epsilon(1e-13));
  CHECK(e(1, 0) == doctest::Approx(std::sin(2.5)).epsilon(1e-13));
}

TEST_CASE("Metzler exponentials are entrywise nonnegative") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const Mat A = random_matrix(rng, 6, true);
    for (double t : {0.1, 1.0, 10.0}) CHECK(expm(A, t).minCoeff() >= -1e-12);
  }
}

TEST_CASE("squaring and eigendecomposition paths agree") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat A = random_matrix(rng, 6, trial % 2 == 0);
    for (double t : {0.3, 2.0}) {
      const Mat a = expm(A, t), b = expm_spectral(A, t);
      CHECK((a - b).norm() <= 1e-8 * a.norm());
    }
  }
  const DiscreteGenerator gen = make(30, CouplingDescriptor::example_8_1(0.5));
  const Mat a = expm(gen.G, 1.0), b = expm_spectral(gen.G, 1.0);
  CHECK((a - b).norm() <= 1e-8 * a.norm());
}

TEST_CASE("precision modes agree and the semigroup law holds") {
  const DiscreteGenerator gen = make(40, CouplingDescriptor::skew_default());
  const Mat d = expm(gen.G, 0.7, ExpmPrecision::Double);
  const Mat x = expm(gen.G, 0.7, ExpmPrecision::Extended);
  CHECK((d - x).norm() <= 1e-11 * x.norm());
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = U(rng), s = U(rng);
    const Mat lhs = expm(gen.G, t + s), rhs = expm(gen.G, t) * expm(gen.G, s);
    CHECK((lhs - rhs).norm() <= 1e-8 * lhs.norm());
  }
}

TEST_CASE("Gershgorin abscissa bounds the spectrum") {
  Mat a(2, 2);
  a << -3, 1, 2, 1;
  CHECK(gershgorin_abscissa(a) == doctest::Approx(3.0));
}

TEST_CASE("evolution of a Markov semigroup keeps constants") {
  const DiscreteGenerator gen = make(60, CouplingDescriptor::zero());
  const EvolutionTrace tr = evolve(gen, Vec::Ones(61), 5.0, 11);
  CHECK(tr.times[0] == 0.0);
  CHECK(tr.times[10] == doctest::Approx(5.0));
  for (int k = 1; k < 11; ++k) CHECK(tr.times[k] > tr.times[k - 1]);
  for (const Vec& s : tr.states) CHECK((s.array() - 1.0).abs().maxCoeff() <= 1e-10);
  for (int k = 0; k < 11; ++k) CHECK(tr.mass[k] == doctest::Approx(3.0).epsilon(1e-12));

  const Vec u0 = gen.grid.sample([](double x) { return std::sin(M_PI * x); });
  const EvolutionTrace tr2 = evolve(gen, u0, 3.0, 7);
  CHECK(tr2.states[0] == u0);
  for (int k = 0; k < 7; ++k) CHECK(std::abs(tr2.mass[k] - tr2.mass[0]) <= 1e-9);

  CHECK_THROWS_AS(evolve(gen, u0, 0.0, 5), DomainError);
  CHECK_THROWS_AS(evolve(gen, u0, 1.0, 1), DomainError);
  CHECK_THROWS_AS(evolve(gen, Vec::Ones(3), 1.0, 5), DimensionError);
}

TEST_CASE("first step is consistent with the generator to second order") {
  const DiscreteGenerator gen = make(20, CouplingDescriptor::example_8_1(1.0));
  const Vec u0 = gen.grid.sample([](double x) { return std::cos(M_PI * x) + x; });
  double err[2];
  int k = 0;
  for (double t1 : {1e-5, 5e-6}) {
    const EvolutionTrace tr = evolve(gen, u0, t1, 2);
    err[k++] = (tr.states[1] - (u0 + t1 * gen.G * u0)).norm();
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("trace serialization") {
  const DiscreteGenerator gen = make(4, CouplingDescriptor::zero());
  const EvolutionTrace tr = evolve(gen, Vec::Ones(5), 1.0, 3);
  std::istringstream csv(tr.to_csv());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,min_component,mass,sup_norm");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) rows += !line.empty();
  CHECK(rows == 3);
  CHECK(tr.to_csv(true).find(",u4") != std::string::npos);
  CHECK(tr.summary()["samples"] == 3);
}

TEST_CASE("empirical positivity probes") {
  const DiscreteGenerator lap = make(40, CouplingDescriptor::zero());
  CHECK(empirical_positivity(lap, {0.01, 0.1, 1.0, 10.0}).positive);

  const DiscreteGenerator e81 = make(40, CouplingDescriptor::example_8_1(0.5));
  const PositivityProbe p = empirical_positivity(e81, {0.01, 0.1});
  CHECK_FALSE(p.positive);
  REQUIRE(p.time);
  CHECK(*p.time == 0.01);
  CHECK(p.value < 0.0);
  CHECK(((p.row == 40 && p.col == 0) || (p.row == 0 && p.col == 40)));

  const DiscreteGenerator skew = make(40, CouplingDescriptor::skew_default());
  CHECK_FALSE(empirical_positivity(skew, {1e-3, 1e-2}).positive);
}

TEST_CASE("dissipative couplings give M-contractions") {
  for (const auto& d : {CouplingDescriptor::skew_default(), CouplingDescriptor::example_8_1(2.0),
                        CouplingDescriptor::example_6_10()}) {
    const DiscreteGenerator gen = make(30, d);
    for (double t : {0.01, 0.3, 3.0}) CHECK(m_norm(expm(gen.G, t), gen.weights.total()) <= 1.0 + 1e-8);
  }
}

TEST_CASE("empirical eventual positivity across regimes") {
  const auto r05 = empirical_eventual_positivity(make(60, CouplingDescriptor::example_8_1(0.5)));
  CHECK(r05.holds_up_to_horizon);
  REQUIRE(r05.t0);
  CHECK(*r05.t0 <= r05.horizon / 2);
  CHECK(r05.delta > 0.0);
  CHECK(r05.probes == 61);

  const auto r114 = empirical_eventual_positivity(make(60, CouplingDescriptor::example_8_1(1.14)));
  CHECK_FALSE(r114.holds_up_to_horizon);
  CHECK(r114.behavior == TailBehavior::ConvergesToSignChanging);

  const auto r2 = empirical_eventual_positivity(make(60, CouplingDescriptor::example_8_1(2.0)));
  CHECK_FALSE(r2.holds_up_to_horizon);
  CHECK(r2.behavior == TailBehavior::Oscillating);

  EventualProbeOptions few;
  few.probes = 8;
  const auto rnd = empirical_eventual_positivity(make(60, CouplingDescriptor::example_8_1(0.5)), few);
  CHECK(rnd.probes == 8);
  CHECK(rnd.holds_up_to_horizon);
}

TEST_CASE("asymptotic trichotomy") {
  const AsymptoticResult m = asymptotic_classify(make(60, CouplingDescriptor::zero()));
  CHECK(m.kind == AsymptoticKind::ConvergesToProjection);
  CHECK(m.rate_matches);
  CHECK(m.positive_generator);
  const cplx v0 = m.profile[0];
  for (Eigen::Index i = 0; i < m.profile.size(); ++i) CHECK(std::abs(m.profile[i] - v0) < 1e-8);

  CouplingDescriptor sub;
  sub.b11 = MultiplicationKernel{ScalarFunction::constant(-0.3)};
  const AsymptoticResult d = asymptotic_classify(make(60, sub));
  CHECK(d.kind == AsymptoticKind::DecaysExponentially);
  CHECK(d.rate == doctest::Approx(-d.spectral_bound).epsilon(0.1));

  CouplingDescriptor grow;
  grow.b12 = SeparableKernel{ScalarFunction::constant(2.0), ScalarFunction::constant(1.0)};
  const AsymptoticResult g = asymptotic_classify(make(60, grow));
  CHECK(g.kind == AsymptoticKind::GrowsExponentially);
  CHECK(g.rate == doctest::Approx(g.spectral_bound).epsilon(0.1));

  CHECK_FALSE(asymptotic_classify(make(60, CouplingDescriptor::example_8_1(0.5))).positive_generator);
}
