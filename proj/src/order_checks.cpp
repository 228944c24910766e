#include "wentzell/order_checks.hpp"

#include <cmath>
#include <sstream>

#include "wentzell/errors.hpp"
#include "wentzell/matrix_exp.hpp"

namespace wentzell {

PmpResult pmp_check(const Mat& B, double tol, const std::string& name) {
  if (B.rows() != B.cols()) throw DimensionError("pmp_check: matrix is not square");
  PmpResult out;
  out.worst.block = name;
  out.worst.value = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < B.rows(); ++i) {
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
      if (i != j && B(i, j) < out.worst.value) {
        out.worst.row = static_cast<int>(i);
        out.worst.col = static_cast<int>(j);
        out.worst.value = B(i, j);
      }
    }
  }
  if (out.worst.row < 0) out.worst.value = 0.0;
  out.holds = out.worst.value >= -tol;
  return out;
}

namespace {

void nonnegative_check(const Mat& B, double tol, const std::string& name, PositivityResult& out) {
  if (B.size() == 0) return;
  Eigen::Index i = 0, j = 0;
  const double worst = B.minCoeff(&i, &j);
  if (worst < -tol) {
    out.positive = false;
    out.witnesses.push_back({name, static_cast<int>(i), static_cast<int>(j), worst});
  }
}

}  // namespace

PositivityResult certify_positive(const NonlocalCoupling& coupling, double tol) {
  PositivityResult out;
  nonnegative_check(coupling.B12, tol, "B12", out);
  nonnegative_check(coupling.B21, tol, "B21", out);
  for (const auto& [mat, name] : {std::pair<Mat, std::string>{coupling.B11, "B11"}, {coupling.B22, "B22"}}) {
    const PmpResult r = pmp_check(mat, tol, name);
    if (!r.holds) {
      out.positive = false;
      out.witnesses.push_back(r.worst);
    }
  }
  return out;
}

nlohmann::json OrderCertificate::to_json() const {
  nlohmann::json w = nlohmann::json::array();
  for (const auto& x : witnesses) w.push_back({{"block", x.block}, {"row", x.row}, {"col", x.col}, {"value", x.value}});
  return {{"positive", positive},
          {"sub_markov", sub_markov},
          {"markov", markov},
          {"witnesses", w},
          {"tolerance", tolerance},
          {"max_interior_slack", interior_slack.size() ? interior_slack.maxCoeff() : 0.0},
          {"min_interior_slack", interior_slack.size() ? interior_slack.minCoeff() : 0.0},
          {"boundary_slack", {boundary_slack[0], boundary_slack[1]}},
          {"c_prime_source", "caller-supplied; not verified against c"}};
}

OrderCertificate certify_markov(const CoefficientSet& coeffs, const NonlocalCoupling& coupling, const Grid1D& grid,
                                double tol) {
  if (coupling.B11.rows() != grid.size()) throw DimensionError("certify_markov: coupling does not match grid");
  OrderCertificate cert;
  cert.tolerance = tol;
  const PositivityResult pos = certify_positive(coupling, tol);
  cert.positive = pos.positive;
  cert.witnesses = pos.witnesses;

  cert.interior_slack = grid.sample([&](double x) { return coeffs.c_prime(x); }) + coupling.interior_row_sums();
  const Eigen::Vector2d c_nu(-coeffs.c(0.0), coeffs.c(1.0));
  cert.boundary_slack = coupling.boundary_row_sums() - c_nu;

  const double max_slack = std::max(cert.interior_slack.maxCoeff(), cert.boundary_slack.maxCoeff());
  const double max_residual =
      std::max(cert.interior_slack.cwiseAbs().maxCoeff(), cert.boundary_slack.cwiseAbs().maxCoeff());
  cert.sub_markov = cert.positive && max_slack <= tol;
  cert.markov = cert.sub_markov && max_residual <= tol;
  if (cert.positive && !cert.sub_markov) {
    Eigen::Index i = 0;
    if (cert.interior_slack.maxCoeff(&i) > tol) {
      cert.witnesses.push_back({"interior-inequality", static_cast<int>(i), -1, cert.interior_slack[i]});
    }
    for (int k = 0; k < 2; ++k) {
      if (cert.boundary_slack[k] > tol) cert.witnesses.push_back({"boundary-inequality", k, -1, cert.boundary_slack[k]});
    }
  }
  return cert;
}

bool check_domination(const Mat& G1, const Mat& G2, double tol) {
  if (G1.rows() != G2.rows() || G1.cols() != G2.cols()) throw DimensionError("check_domination: shape mismatch");
  if (!pmp_check(G1, tol).holds) return false;
  return G1.size() == 0 || (G2 - G1).minCoeff() >= -tol;
}

bool irreducibility_probe(const Mat& G, double t, double tol) {
  const PmpResult r = pmp_check(G, tol, "G");
  if (!r.holds) {
    std::ostringstream os;
    os << "irreducibility_probe: generator is not Metzler (entry (" << r.worst.row << ", " << r.worst.col
       << ") = " << r.worst.value << "); use the eventual positivity analysis instead";
    throw PreconditionError(os.str());
  }
  return expm(G, t).minCoeff() > tol;
}

NonlocalCoupling markov_majorant(const CoefficientSet& coeffs, const NonlocalCoupling& coupling, const Grid1D& grid,
                                 double tol) {
  const OrderCertificate cert = certify_markov(coeffs, coupling, grid, tol);
  if (!cert.sub_markov) throw PreconditionError("markov_majorant: coupling is not sub-Markov");
  const MassWeights w(grid);
  NonlocalCoupling out = coupling;
  out.B12 -= 0.5 * cert.interior_slack * Eigen::RowVector2d::Ones();
  out.B21 -= cert.boundary_slack * w.interior().transpose();
  out.label = coupling.label + " (Markov majorant)";
  return out;
}

}  // namespace wentzell
