#include <doctest.h>

#include "wentzell/errors.hpp"
#include "wentzell/matrix_exp.hpp"
#include "wentzell/order_checks.hpp"
#include "wentzell/spectral.hpp"

using namespace wentzell;

namespace {

CouplingDescriptor sub_markov_coupling() {
  CouplingDescriptor d;
  d.b11 = MultiplicationKernel{ScalarFunction::constant(-0.2)};
  d.b12 = SeparableKernel{ScalarFunction::constant(0.05), ScalarFunction::constant(1.0)};
  d.b21 = SeparableKernel{ScalarFunction::constant(0.5), ScalarFunction::constant(1.0)};
  Mat b22(2, 2);
  b22 << -0.8, 0.1, 0.2, -0.9;
  d.b22 = DenseKernel{b22};
  return d;
}

}  // namespace

TEST_CASE("positive minimum principle on small matrices") {
  Mat a(2, 2);
  a << -5, 1, 2, -7;
  CHECK(pmp_check(a).holds);
  Mat b(2, 2);
  b << 0, -0.1, 0, 0;
  const PmpResult r = pmp_check(b);
  CHECK_FALSE(r.holds);
  CHECK(r.worst.row == 0);
  CHECK(r.worst.col == 1);
  CHECK(r.worst.value == doctest::Approx(-0.1));
  const NonlocalCoupling c = build_kernel_blocks(Grid1D(4), CouplingDescriptor::example_8_1(1.0));
  const PmpResult e = pmp_check(c.B22);
  CHECK_FALSE(e.holds);
  CHECK(e.worst.row == 1);
  CHECK(e.worst.col == 0);
  CHECK(e.worst.value == -1.0);
  CHECK_THROWS_AS(pmp_check(Mat::Zero(2, 3)), DimensionError);
}

TEST_CASE("positivity certificate of the coupling") {
  const Grid1D g(8);
  CHECK(certify_positive(build_kernel_blocks(g, CouplingDescriptor::zero())).positive);
  const PositivityResult e610 = certify_positive(build_kernel_blocks(g, CouplingDescriptor::example_6_10()));
  CHECK_FALSE(e610.positive);
  REQUIRE_FALSE(e610.witnesses.empty());
  CHECK(e610.witnesses.front().value == -1.0);

  CouplingDescriptor k;
  k.b12 = SeparableKernel{ScalarFunction::poly({1.0, 1.0}), ScalarFunction::constant(2.0)};
  k.b21 = SeparableKernel{ScalarFunction::constant(0.5), ScalarFunction::poly({0.0, 1.0})};
  CHECK(certify_positive(build_kernel_blocks(g, k)).positive);
  CHECK_FALSE(certify_positive(build_kernel_blocks(g, CouplingDescriptor::skew_default())).positive);
}

TEST_CASE("Markov certificates") {
  const Grid1D g(16);
  const OrderCertificate lap = certify_markov(CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::zero()), g);
  CHECK(lap.positive);
  CHECK(lap.sub_markov);
  CHECK(lap.markov);

  const OrderCertificate e81 =
      certify_markov(CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::example_8_1(1.0)), g);
  CHECK_FALSE(e81.positive);
  CHECK_FALSE(e81.markov);

  CoefficientSet drift;
  drift.c = ScalarFunction::poly({0.0, 1.0});
  drift.c_prime = ScalarFunction::constant(1.0);
  const OrderCertificate cx = certify_markov(drift, build_kernel_blocks(g, CouplingDescriptor::zero()), g);
  CHECK(cx.positive);
  CHECK_FALSE(cx.sub_markov);
  CHECK(cx.interior_slack.minCoeff() == doctest::Approx(1.0));

  const OrderCertificate sub = certify_markov(CoefficientSet::laplacian(), build_kernel_blocks(g, sub_markov_coupling()), g);
  CHECK(sub.positive);
  CHECK(sub.sub_markov);
  CHECK_FALSE(sub.markov);

  const auto j = sub.to_json();
  CHECK(j.contains("c_prime_source"));
  CHECK(j["sub_markov"] == true);
}

TEST_CASE("certificate chain markov => sub_markov => positive") {
  const Grid1D g(10);
  CouplingDescriptor grow;
  grow.b12 = SeparableKernel{ScalarFunction::constant(2.0), ScalarFunction::constant(1.0)};
  CoefficientSet drift;
  drift.c = ScalarFunction::poly({0.2, -0.4});
  drift.c_prime = ScalarFunction::constant(-0.4);
  for (const auto& d : {CouplingDescriptor::zero(), CouplingDescriptor::example_6_10(), CouplingDescriptor::skew_default(),
                        CouplingDescriptor::example_8_1(0.3), sub_markov_coupling(), grow}) {
    for (const auto& c : {CoefficientSet::laplacian(), drift}) {
      const OrderCertificate cert = certify_markov(c, build_kernel_blocks(g, d), g);
      if (cert.markov) CHECK(cert.sub_markov);
      if (cert.sub_markov) CHECK(cert.positive);
    }
  }
}

TEST_CASE("domination by the sufficient matrix condition") {
  const Grid1D g(10);
  const DiscreteGenerator lap =
      assemble_generator(g, CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::zero()));
  CHECK(check_domination(lap.G, lap.G));
  CHECK(check_domination(lap.G, lap.G + 0.3 * Vec::Ones(11) * Vec::LinSpaced(11, 0, 1).transpose()));
  Mat worse = lap.G;
  worse(0, 1) -= 1.0;
  CHECK_FALSE(check_domination(lap.G, worse));
  CHECK_THROWS_AS(check_domination(lap.G, Mat::Zero(3, 3)), DimensionError);
}

TEST_CASE("dominated pair has strictly smaller spectral bound") {
  const Grid1D g(30);
  const NonlocalCoupling sub = build_kernel_blocks(g, sub_markov_coupling());
  const NonlocalCoupling major = markov_majorant(CoefficientSet::laplacian(), sub, g);
  CHECK(certify_markov(CoefficientSet::laplacian(), major, g).markov);
  const DiscreteGenerator g1 = assemble_generator(g, CoefficientSet::laplacian(), sub);
  const DiscreteGenerator g2 = assemble_generator(g, CoefficientSet::laplacian(), major);
  REQUIRE(check_domination(g1.G, g2.G));
  REQUIRE(irreducibility_probe(g2.G, 0.5));
  CHECK(spectrum(g1).spectral_bound < spectrum(g2).spectral_bound - 1e-12);
  CHECK_THROWS_AS(markov_majorant(CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::skew_default()), g),
                  PreconditionError);
}

TEST_CASE("irreducibility probe") {
  const Grid1D g(50);
  const DiscreteGenerator lap =
      assemble_generator(g, CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::zero()));
  CHECK(irreducibility_probe(lap.G, 0.1));
  Mat blocks = Mat::Zero(4, 4);
  blocks.topLeftCorner(2, 2) << -1, 1, 1, -1;
  blocks.bottomRightCorner(2, 2) << -2, 2, 2, -2;
  CHECK_FALSE(irreducibility_probe(blocks, 1.0));
  CHECK_FALSE(irreducibility_probe(-Mat::Identity(3, 3), 1.0));
  const DiscreteGenerator e81 =
      assemble_generator(g, CoefficientSet::laplacian(), build_kernel_blocks(g, CouplingDescriptor::example_8_1(0.5)));
  CHECK_THROWS_AS(irreducibility_probe(e81.G, 0.1), PreconditionError);
}
