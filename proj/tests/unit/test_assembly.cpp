#include <doctest.h>

#include <cmath>
#include <random>

#include "wentzell/assembly.hpp"
#include "wentzell/errors.hpp"

using namespace wentzell;

namespace {

DiscreteGenerator make(int n, const CouplingDescriptor& d, const CoefficientSet& c = CoefficientSet::laplacian()) {
  const Grid1D g(n);
  return assemble_generator(g, c, build_kernel_blocks(g, d));
}

}  // namespace

TEST_CASE("stiffness of -u'' on two cells") {
  const Grid1D g(2);
  const Mat K = assemble_q(g, CoefficientSet::laplacian());
  Mat expected(3, 3);
  expected << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((K - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("stiffness annihilates constants without drift") {
  CoefficientSet c;
  c.a = ScalarFunction::poly({2.0, 0.5, -0.3});
  const Mat K = assemble_q(Grid1D(37), c);
  CHECK((K * Vec::Ones(38)).cwiseAbs().maxCoeff() < 1e-12);
  // tridiagonal
  for (int i = 0; i < 38; ++i)
    for (int j = 0; j < 38; ++j)
      if (std::abs(i - j) > 1) CHECK(K(i, j) == 0.0);
}

TEST_CASE("energy of x^2 approximates 4/3") {
  const Grid1D g(1000);
  const Vec u = g.sample([](double x) { return x * x; });
  const Mat K = assemble_q(g, CoefficientSet::laplacian());
  CHECK(std::abs(u.dot(K * u) - 4.0 / 3.0) < 1e-3);
}

TEST_CASE("ellipticity violation is rejected") {
  CoefficientSet c;
  c.a = ScalarFunction::poly({0.5, 1.0});  // a(x) = 0.5 + x
  c.eta = 0.8;
  CHECK_THROWS_AS(assemble_q(Grid1D(10), c), CoefficientError);
  c.eta = 0.5;
  CHECK_NOTHROW(assemble_q(Grid1D(10), c));
}

TEST_CASE("presets produce the documented blocks") {
  const Grid1D g(6);
  const NonlocalCoupling e81 = build_kernel_blocks(g, CouplingDescriptor::parse_preset("example-8.1(tau=2)"));
  CHECK(e81.B22(0, 0) == 0.0);
  CHECK(e81.B22(0, 1) == 2.0);
  CHECK(e81.B22(1, 0) == -2.0);
  CHECK(e81.B22(1, 1) == 0.0);
  CHECK(e81.B11.isZero(0.0));
  CHECK(e81.B12.isZero(0.0));
  CHECK(e81.B21.isZero(0.0));

  const NonlocalCoupling e610 = build_kernel_blocks(g, CouplingDescriptor::parse_preset("example-6.10"));
  CHECK(e610.B22(0, 0) == 1.0);
  CHECK(e610.B22(0, 1) == -1.0);
  CHECK(e610.B22(1, 0) == -1.0);
  CHECK(e610.B22(1, 1) == 1.0);

  CHECK(CouplingDescriptor::parse_preset("example-8.1(0.5)").example_tau == 0.5);
  CHECK_THROWS_AS(CouplingDescriptor::parse_preset("example-8.1(tau=)"), ConfigError);
  CHECK_THROWS_AS(CouplingDescriptor::parse_preset("example-9"), ConfigError);
}

TEST_CASE("mean-zero skew kernel annihilates constants on every grid") {
  for (int n : {16, 32, 64, 128}) {
    const Grid1D g(n);
    const NonlocalCoupling c = build_kernel_blocks(g, CouplingDescriptor::skew_default());
    const double err = std::max(c.interior_row_sums().cwiseAbs().maxCoeff(), c.boundary_row_sums().cwiseAbs().maxCoeff());
    CHECK(err <= 1e-14);
  }
}

TEST_CASE("skew kernel gives a skew coupling form") {
  const DiscreteGenerator gen = make(40, CouplingDescriptor::skew_default());
  CHECK((gen.B_h + gen.B_h.transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("separable kernel blocks follow the quadrature weights") {
  const Grid1D g(10);
  CouplingDescriptor d;
  d.b12 = SeparableKernel{ScalarFunction::poly({0.0, 1.0}), ScalarFunction::constant(3.0)};
  d.b21 = SeparableKernel{ScalarFunction::constant(1.0), ScalarFunction::poly({0.0, 2.0})};
  const NonlocalCoupling c = build_kernel_blocks(g, d);
  // (B12 1)(x) = x * (3 + 3), (B21 1)(z) = int 2x dx = 1
  for (int i = 0; i < g.size(); ++i) CHECK(c.interior_row_sums()[i] == doctest::Approx(6.0 * g.node(i)));
  CHECK(c.boundary_row_sums()[0] == doctest::Approx(1.0));
  CHECK(c.boundary_row_sums()[1] == doctest::Approx(1.0));
}

TEST_CASE("Neumann Laplacian generator conserves constants exactly") {
  const DiscreteGenerator gen = make(50, CouplingDescriptor::zero());
  CHECK((gen.G * Vec::Ones(51)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gen.A_form - gen.A_form.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat> es(gen.A_form);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("example-8.1 coupling enters the corner entries of the generator") {
  const double tau = 0.7;
  const DiscreteGenerator g0 = make(20, CouplingDescriptor::zero());
  const DiscreteGenerator gt = make(20, CouplingDescriptor::example_8_1(tau));
  Mat D = gt.G - g0.G;
  CHECK(D(0, 20) == doctest::Approx(tau / g0.weights[0]));
  CHECK(D(20, 0) == doctest::Approx(-tau / g0.weights[20]));
  D(0, 20) = D(20, 0) = 0.0;
  CHECK(D.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generator and form are linked by the mass inner product") {
  CoefficientSet c;
  c.a = ScalarFunction::poly({1.5, 0.2});
  c.b = ScalarFunction::constant(0.4);
  c.c = ScalarFunction::poly({0.0, 0.3});
  c.c_prime = ScalarFunction::constant(0.3);
  const DiscreteGenerator gen = make(30, CouplingDescriptor::skew_default(), c);
  std::mt19937 rng(3);
  std::normal_distribution<double> N;
  const MassWeights& w = gen.weights;
  for (int trial = 0; trial < 100; ++trial) {
    Vec u(31), v(31);
    for (auto& x : u) x = N(rng);
    for (auto& x : v) x = N(rng);
    const double lhs = inner_product(Vec(gen.G * u), v, w) + gen.form(u, v);
    CHECK(std::abs(lhs) < 1e-12 * (1 + gen.A_form.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("form bound in the pure Neumann case") {
  CoefficientSet c;
  c.a = ScalarFunction::poly({1.5, -0.5});  // a in [1, 1.5]
  c.eta = 1.0;
  const Grid1D g(25);
  const DiscreteGenerator gen = assemble_generator(g, c, build_kernel_blocks(g, CouplingDescriptor::zero()));
  std::mt19937 rng(5);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 50; ++trial) {
    Vec u(26);
    for (auto& x : u) x = N(rng);
    double seminorm = 0.0;
    for (int i = 0; i < 25; ++i) seminorm += (u[i + 1] - u[i]) * (u[i + 1] - u[i]) / g.h();
    CHECK(gen.form(u, u) >= c.eta * seminorm - 1e-10);
  }
}

TEST_CASE("shape mismatch between grid and coupling") {
  const Grid1D g(10), other(12);
  CHECK_THROWS_AS(assemble_generator(g, CoefficientSet::laplacian(), build_kernel_blocks(other, CouplingDescriptor::example_8_1(1))),
                  DimensionError);
  CouplingDescriptor d;
  d.b12 = DenseKernel{Mat::Ones(3, 2)};
  CHECK_THROWS_AS(build_kernel_blocks(g, d), ConfigError);
  d.b12 = MultiplicationKernel{ScalarFunction::constant(1.0)};
  CHECK_THROWS_AS(build_kernel_blocks(g, d), ConfigError);
}

TEST_CASE("generator is real and apply_coupling matches M^-1 B_h") {
  const DiscreteGenerator gen = make(12, CouplingDescriptor::example_8_1(1.5));
  CHECK(gen.G.allFinite());
  const Vec u = Vec::LinSpaced(13, -1.0, 2.0);
  const Vec expected = (gen.B_h * u).cwiseQuotient(gen.weights.total());
  CHECK((gen.apply_coupling(u) - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Neumann problem: constants, linear flux, manufactured solution") {
  const DiscreteGenerator gen = make(40, CouplingDescriptor::zero());
  const Grid1D& g = gen.grid;
  const Vec one = solve_neumann(gen, 1.0, Vec::Ones(41), {0.0, 0.0});
  CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-12);

  const Vec lin = solve_neumann(gen, 0.0, Vec::Zero(41), {-1.0, 1.0});
  for (int i = 0; i < 40; ++i) CHECK((lin[i + 1] - lin[i]) / g.h() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(lin.dot(gen.weights.interior())) < 1e-12);

  CHECK_THROWS_AS(solve_neumann(gen, 0.0, Vec::Ones(41), {0.0, 0.0}), ResolventError);
  try {
    solve_neumann(gen, 0.0, Vec::Ones(41), {0.0, 0.0});
  } catch (const ResolventError& e) {
    CHECK(e.lambda() == 0.0);
  }

  double errs[2];
  int k = 0;
  for (int n : {50, 100}) {
    const DiscreteGenerator gn = make(n, CouplingDescriptor::zero());
    const Vec f = gn.grid.sample([](double x) { return (1.0 + M_PI * M_PI) * std::cos(M_PI * x); });
    const Vec u = solve_neumann(gn, 1.0, f, {0.0, 0.0});
    const Vec exact = gn.grid.sample([](double x) { return std::cos(M_PI * x); });
    errs[k++] = (u - exact).cwiseAbs().maxCoeff();
  }
  CHECK(errs[0] < 5e-3);
  CHECK(std::log2(errs[0] / errs[1]) > 1.8);
}

TEST_CASE("discrete conormal derivative") {
  const DiscreteGenerator lap = make(200, CouplingDescriptor::zero());
  const Vec zero = Vec::Zero(201);
  const Eigen::Vector2d g1 = conormal_of(lap, Vec::Ones(201), zero);
  CHECK(g1.cwiseAbs().maxCoeff() < 1e-12);
  const Vec x = lap.grid.nodes();
  const Eigen::Vector2d gx = conormal_of(lap, x, zero);
  CHECK(gx[0] == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK(gx[1] == doctest::Approx(1.0).epsilon(1e-2));

  CoefficientSet c;
  c.c = ScalarFunction::constant(1.0);
  c.c_prime = ScalarFunction::constant(0.0);
  const DiscreteGenerator drift = make(200, CouplingDescriptor::zero(), c);
  const Eigen::Vector2d gc = conormal_of(drift, x, Vec::Constant(201, -1.0));
  CHECK(std::abs(gc[0] + 1.0) < 2e-2);
  CHECK(std::abs(gc[1] - 2.0) < 2e-2);
  CHECK_THROWS_AS(conormal_of(drift, Vec::Ones(5), zero), DimensionError);
}
