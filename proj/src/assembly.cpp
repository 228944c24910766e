#include "wentzell/assembly.hpp"

#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

CouplingDescriptor CouplingDescriptor::example_8_1(double tau) {
  CouplingDescriptor d;
  Mat b22(2, 2);
  b22 << 0.0, tau, -tau, 0.0;
  d.b22 = DenseKernel{b22};
  std::ostringstream os;
  os << "example-8.1(tau=" << tau << ")";
  d.label = os.str();
  d.example_tau = tau;
  return d;
}

CouplingDescriptor CouplingDescriptor::example_6_10() {
  CouplingDescriptor d;
  Mat b22(2, 2);
  b22 << 1.0, -1.0, -1.0, 1.0;
  d.b22 = DenseKernel{b22};
  d.label = "example-6.10";
  return d;
}

CouplingDescriptor CouplingDescriptor::skew(ScalarFunction f, std::array<double, 2> g) {
  CouplingDescriptor d;
  d.b12 = SeparableKernel{f, ScalarFunction::table({g[0], g[1]})};
  d.b21 = SeparableKernel{ScalarFunction::table({-g[0], -g[1]}), f};
  std::ostringstream os;
  os << "skew(" << f.description() << ", [" << g[0] << ", " << g[1] << "])";
  d.label = os.str();
  return d;
}

CouplingDescriptor CouplingDescriptor::skew_default() {
  return skew(ScalarFunction::trig(1.0, std::numbers::pi, std::numbers::pi / 2), {1.0, -1.0});
}

CouplingDescriptor CouplingDescriptor::parse_preset(const std::string& text) {
  if (text == "zero") return zero();
  if (text == "example-6.10") return example_6_10();
  if (text == "skew" || text == "skew(f,g)") return skew_default();
  static const std::regex ex81(R"(example-8\.1\((?:tau=|τ=)?\s*([-+0-9.eE]+)\s*\))");
  std::smatch m;
  if (std::regex_match(text, m, ex81)) {
    try {
      std::size_t used = 0;
      const double tau = std::stod(m[1].str(), &used);
      if (used == m[1].str().size() && std::isfinite(tau)) return example_8_1(tau);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("malformed coupling preset '" + text +
                    "' (expected zero | example-6.10 | example-8.1(tau=T) | skew)");
}

Vec NonlocalCoupling::interior_row_sums() const { return B11.rowwise().sum() + B12.rowwise().sum(); }

Eigen::Vector2d NonlocalCoupling::boundary_row_sums() const {
  return B21.rowwise().sum() + B22.rowwise().sum();
}

namespace {

enum class Side { Interior, Boundary };

struct Domain {
  Vec points;
  Vec weights;
};

Domain domain_of(Side side, const Grid1D& grid, const MassWeights& w) {
  if (side == Side::Interior) return {grid.nodes(), w.interior()};
  return {Eigen::Vector2d(0.0, 1.0), Eigen::Vector2d(1.0, 1.0)};
}

Mat build_block(const BlockDescriptor& desc, Side target, Side source, const Grid1D& grid,
                const MassWeights& w, const char* name) {
  const Domain tgt = domain_of(target, grid, w);
  const Domain src = domain_of(source, grid, w);
  const auto rows = tgt.points.size();
  const auto cols = src.points.size();

  return std::visit(
      [&](const auto& k) -> Mat {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ZeroKernel>) {
          return Mat::Zero(rows, cols);
        } else if constexpr (std::is_same_v<K, DenseKernel>) {
          if (k.values.rows() != rows || k.values.cols() != cols) {
            std::ostringstream os;
            os << name << ": dense kernel is " << k.values.rows() << "x" << k.values.cols() << ", expected "
               << rows << "x" << cols;
            throw ConfigError(os.str());
          }
          if (!k.values.allFinite()) throw ConfigError(std::string(name) + ": dense kernel has non-finite entries");
          return k.values * src.weights.asDiagonal();
        } else if constexpr (std::is_same_v<K, SeparableKernel>) {
          Vec left(rows), right(cols);
          for (Eigen::Index i = 0; i < rows; ++i) left[i] = k.left(tgt.points[i]);
          for (Eigen::Index j = 0; j < cols; ++j) right[j] = k.right(src.points[j]) * src.weights[j];
          if (!left.allFinite() || !right.allFinite()) {
            throw ConfigError(std::string(name) + ": separable kernel has non-finite values");
          }
          return left * right.transpose();
        } else {
          if (target != source) {
            throw ConfigError(std::string(name) + ": multiplication kernels are only valid for B11 and B22");
          }
          Vec m(rows);
          for (Eigen::Index i = 0; i < rows; ++i) m[i] = k.m(tgt.points[i]);
          if (!m.allFinite()) throw ConfigError(std::string(name) + ": multiplication kernel is not finite");
          return m.asDiagonal();
        }
      },
      desc);
}

}  // namespace

NonlocalCoupling build_kernel_blocks(const Grid1D& grid, const CouplingDescriptor& descriptor) {
  const MassWeights w(grid);
  NonlocalCoupling out;
  out.B11 = build_block(descriptor.b11, Side::Interior, Side::Interior, grid, w, "B11");
  out.B12 = build_block(descriptor.b12, Side::Interior, Side::Boundary, grid, w, "B12");
  out.B21 = build_block(descriptor.b21, Side::Boundary, Side::Interior, grid, w, "B21");
  out.B22 = build_block(descriptor.b22, Side::Boundary, Side::Boundary, grid, w, "B22");
  out.label = descriptor.label;
  return out;
}

Mat assemble_q(const Grid1D& grid, const CoefficientSet& coeffs) {
  if (!(coeffs.eta > 0.0)) throw CoefficientError("ellipticity constant eta must be positive");
  const int n = grid.size();
  const double h = grid.h();
  Mat K = Mat::Zero(n, n);
  constexpr double sign[2] = {-1.0, 1.0};
  for (int e = 0; e < grid.cells(); ++e) {
    const double x = grid.midpoint(e);
    const double a = coeffs.a(x);
    const double b = coeffs.b(x);
    const double c = coeffs.c(x);
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
      throw CoefficientError("coefficients are not finite at x = " + std::to_string(x));
    }
    if (a < coeffs.eta) {
      std::ostringstream os;
      os << "ellipticity violated: a(" << x << ") = " << a << " < eta = " << coeffs.eta;
      throw CoefficientError(os.str());
    }
    for (int r = 0; r < 2; ++r) {
      for (int s = 0; s < 2; ++s) {
        K(e + r, e + s) += a * sign[r] * sign[s] / h + 0.5 * b * sign[s] + 0.5 * c * sign[r];
      }
    }
  }
  return K;
}

DiscreteGenerator assemble_generator(const Grid1D& grid, const CoefficientSet& coeffs,
                                     const NonlocalCoupling& coupling) {
  const int n = grid.size();
  if (coupling.B11.rows() != n || coupling.B11.cols() != n || coupling.B12.rows() != n ||
      coupling.B12.cols() != 2 || coupling.B21.rows() != 2 || coupling.B21.cols() != n) {
    std::ostringstream os;
    os << "coupling blocks do not match a grid with " << n << " nodes (B11 " << coupling.B11.rows() << "x"
       << coupling.B11.cols() << ", B12 " << coupling.B12.rows() << "x" << coupling.B12.cols() << ", B21 "
       << coupling.B21.rows() << "x" << coupling.B21.cols() << ")";
    throw DimensionError(os.str());
  }
  DiscreteGenerator gen{grid, MassWeights(grid), coeffs, coupling, {}, {}, {}, {}};
  gen.K_q = assemble_q(grid, coeffs);

  const Vec& wo = gen.weights.interior();
  Mat T = Mat::Zero(2, n);
  T(0, 0) = 1.0;
  T(1, n - 1) = 1.0;
  gen.B_h = wo.asDiagonal() * coupling.B11;
  gen.B_h += wo.asDiagonal() * coupling.B12 * T;
  gen.B_h += T.transpose() * coupling.B21;
  gen.B_h += T.transpose() * coupling.B22 * T;

  gen.A_form = gen.K_q - gen.B_h;
  gen.G = -(gen.A_form.array().colwise() / gen.weights.total().array()).matrix();
  return gen;
}

Vec DiscreteGenerator::apply_coupling(const Vec& u) const {
  return ((B_h * u).array() / weights.total().array()).matrix();
}

Vec solve_neumann(const DiscreteGenerator& gen, double lambda, const Vec& f, const Eigen::Vector2d& g) {
  const int n = gen.size();
  if (f.size() != n) throw DimensionError("solve_neumann: data length does not match the grid");
  const Vec& wo = gen.weights.interior();
  Mat S = gen.K_q;
  S.diagonal() += lambda * wo;
  Vec rhs = wo.cwiseProduct(f);
  rhs[0] += g[0];
  rhs[n - 1] += g[1];

  Eigen::FullPivLU<Mat> lu(S);
  lu.setThreshold(1e-12);
  if (lu.isInvertible()) {
    Vec u = lu.solve(rhs);
    const double res = (S * u - rhs).norm();
    if (res > 1e-8 * (S.norm() * u.norm() + rhs.norm())) {
      throw ResolventError("solve_neumann: residual " + std::to_string(res) + " too large", lambda);
    }
    return u;
  }
  if (lu.dimensionOfKernel() != 1) {
    throw ResolventError("solve_neumann: system is singular with kernel dimension " +
                             std::to_string(lu.dimensionOfKernel()),
                         lambda);
  }
  // Bordered system fixing zero interior mean; the multiplier measures incompatibility.
  Mat bordered = Mat::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = S;
  bordered.block(0, n, n, 1) = wo;
  bordered.block(n, 0, 1, n) = wo.transpose();
  Vec brhs = Vec::Zero(n + 1);
  brhs.head(n) = rhs;
  Eigen::FullPivLU<Mat> blu(bordered);
  if (!blu.isInvertible()) throw ResolventError("solve_neumann: bordered system is singular", lambda);
  const Vec sol = blu.solve(brhs);
  const double multiplier = sol[n];
  if (std::abs(multiplier) > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "solve_neumann: data incompatible with the singular system (defect " << multiplier << ")";
    throw ResolventError(os.str(), lambda);
  }
  return sol.head(n);
}

Eigen::Vector2d conormal_of(const DiscreteGenerator& gen, const Vec& u, const Vec& Lu) {
  const int n = gen.size();
  if (u.size() != n || Lu.size() != n) throw DimensionError("conormal_of: vector lengths do not match the grid");
  const Vec r = gen.K_q * u - gen.weights.interior().cwiseProduct(Lu);
  return {r[0], r[n - 1]};
}

}  // namespace wentzell
