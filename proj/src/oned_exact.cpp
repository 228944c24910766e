#include "wentzell/oned_exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "wentzell/errors.hpp"

namespace wentzell {

namespace {

using std::numbers::pi;

/// Root of g in [a, b] by bisection, polished with safeguarded Newton.
double bracketed_root(const std::function<double(double)>& g, const std::function<double(double)>& dg, double a,
                      double b, const std::string& name) {
  const double ga = g(a);
  const double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (std::signbit(ga) == std::signbit(gb)) {
    std::ostringstream os;
    os << name << ": no sign change on [" << a << ", " << b << "] (g(a) = " << ga << ", g(b) = " << gb << ")";
    throw RootSearchError(os.str());
  }
  try {
    const auto [lo, hi] = boost::math::tools::bisect(g, a, b, boost::math::tools::eps_tolerance<double>(30));
    return boost::math::tools::newton_raphson_iterate([&](double x) { return std::make_pair(g(x), dg(x)); },
                                                      0.5 * (lo + hi), lo, hi, 52);
  } catch (const std::exception& e) {
    throw RootSearchError(name + ": " + e.what());
  }
}

// Defining functions, written without poles.
double cotmu_minus_mu(double m) { return std::cos(m) - m * std::sin(m); }
double d_cotmu_minus_mu(double m) { return -2.0 * std::sin(m) - m * std::cos(m); }

// tau = 0 equation cot(mu) = (mu^2 - 1) / (2 mu) times 2 mu sin(mu).
double tau0_eq(double m) { return 2.0 * m * std::cos(m) - (m * m - 1.0) * std::sin(m); }
double d_tau0_eq(double m) { return 2.0 * std::cos(m) - 2.0 * m * std::sin(m) - 2.0 * m * std::sin(m) - (m * m - 1.0) * std::cos(m); }

// Maximum condition 1 = 2mu^2 - 3mu cot(mu) + mu^2 csc^2(mu), times sin^2(mu).
double max_eq(double m) {
  const double s = std::sin(m), c = std::cos(m);
  return (2.0 * m * m - 1.0) * s * s - 3.0 * m * s * c + m * m;
}
double d_max_eq(double m) {
  const double s = std::sin(m), c = std::cos(m);
  return 4.0 * m * s * s + (2.0 * m * m - 1.0) * 2.0 * s * c - 3.0 * s * c - 3.0 * m * (c * c - s * s) + 2.0 * m;
}

// f(mu)^2 = 2 mu^3 cot(mu) + mu^2 - mu^4 and its derivative.
double f_squared(double m) { return 2.0 * m * m * m / std::tan(m) + m * m - m * m * m * m; }
double d_f_squared(double m) {
  const double s = std::sin(m);
  return 6.0 * m * m / std::tan(m) - 2.0 * m * m * m / (s * s) + 2.0 * m - 4.0 * m * m * m;
}

cplx sinhc(cplx w) {
  if (std::abs(w) < 1e-3) {
    const cplx w2 = w * w;
    return 1.0 + w2 / 6.0 + w2 * w2 / 120.0;
  }
  return std::sinh(w) / w;
}

Thresholds compute_thresholds_uncached() {
  Thresholds t;
  t.mu_p = bracketed_root(cotmu_minus_mu, d_cotmu_minus_mu, 0.1, 1.5, "mu_p");
  t.tau_p = t.mu_p / std::sin(t.mu_p);
  t.mu_s = bracketed_root(max_eq, d_max_eq, 0.5, 1.2, "mu_s");
  const double mu2 = bracketed_root(tau0_eq, d_tau0_eq, 0.5, pi / 2, "lambda2(0)");
  const double mu3 = bracketed_root(tau0_eq, d_tau0_eq, pi, 1.5 * pi, "lambda3(0)");
  t.lambda2_0 = -mu2 * mu2;
  t.lambda3_0 = -mu3 * mu3;
  t.tau_star = 0.5 * std::abs(t.lambda3_0 - t.lambda2_0);
  // f(mu_s), evaluated directly since mu_s lies inside the domain of f.
  t.tau_s = t.mu_s * std::sqrt(2.0 * t.mu_s / std::tan(t.mu_s) + 1.0 - t.mu_s * t.mu_s);

  const double s = std::sin(t.mu_s);
  t.residuals = std::max({std::abs(1.0 / std::tan(t.mu_p) - t.mu_p),
                          std::abs(2.0 * t.mu_s * t.mu_s - 3.0 * t.mu_s / std::tan(t.mu_s) + t.mu_s * t.mu_s / (s * s) - 1.0),
                          std::abs(char_residual_mu(mu2, 0.0)), std::abs(char_residual_mu(mu3, 0.0)),
                          std::abs(char_residual_mu(t.mu_p, t.tau_p)), std::abs(char_residual_mu(t.mu_s, t.tau_s))});
  return t;
}

}  // namespace

cplx det_Mw(cplx w, double tau) {
  const cplx w2 = w * w;
  return 2.0 * (-tau * tau - w2 - w2 * w2) * std::sinh(w) - 4.0 * w2 * w * std::cosh(w);
}

cplx det_Mw_derivative(cplx w, double tau) {
  const cplx w2 = w * w;
  const cplx sh = std::sinh(w), ch = std::cosh(w);
  return 2.0 * (-2.0 * w - 4.0 * w2 * w) * sh + 2.0 * (-tau * tau - w2 - w2 * w2) * ch - 12.0 * w2 * ch -
         4.0 * w2 * w * sh;
}

cplx characteristic_function(cplx lambda, double tau) {
  const cplx w = std::sqrt(lambda);
  return 2.0 * (-tau * tau - lambda - lambda * lambda) * sinhc(w) - 4.0 * lambda * std::cosh(w);
}

double char_residual_mu(double mu, double tau) {
  if (!(mu > 0.0)) throw DomainError("char_residual_mu: mu must be positive");
  const double s = std::sin(mu);
  if (std::abs(s) < 1e-14) throw DomainError("char_residual_mu: mu is at a pole of cot");
  return std::cos(mu) / s - (tau * tau - mu * mu + mu * mu * mu * mu) / (2.0 * mu * mu * mu);
}

double f_of_mu(double mu) {
  const Thresholds& t = compute_thresholds();
  const double upper = std::sqrt(-t.lambda2_0);
  if (!(mu > 0.0) || mu > upper * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "f_of_mu: mu = " << mu << " outside (0, " << upper << "]";
    throw DomainError(os.str());
  }
  const double radicand = 2.0 * mu / std::tan(mu) + 1.0 - mu * mu;
  if (radicand < -1e-12) throw DomainError("f_of_mu: negative radicand");
  return mu * std::sqrt(std::max(0.0, radicand));
}

bool Thresholds::ordering_holds() const {
  return 0.0 < tau_p && tau_p < tau_s && tau_s < tau_star && 0.0 < mu_p && mu_p < mu_s && mu_s < std::sqrt(-lambda2_0) &&
         std::sqrt(-lambda2_0) < pi / 2 && pi / 2 < pi && pi < std::sqrt(-lambda3_0);
}

nlohmann::json Thresholds::to_json() const {
  return {{"mu_p", mu_p},
          {"tau_p", tau_p},
          {"mu_s", mu_s},
          {"tau_s", tau_s},
          {"lambda2_0", lambda2_0},
          {"lambda3_0", lambda3_0},
          {"tau_star", tau_star},
          {"residuals", residuals},
          {"ordering", ordering_holds() ? "ok" : "violated"},
          {"equations",
           {{"mu_p", "smallest positive root of cot(mu) = mu"},
            {"tau_p", "f(mu_p) = mu_p / sin(mu_p)"},
            {"mu_s", "1 = 2 mu^2 - 3 mu cot(mu) + mu^2 csc^2(mu)"},
            {"tau_s", "f(mu_s), f(mu) = mu sqrt(2 mu cot(mu) + 1 - mu^2)"},
            {"lambda2_0", "-mu^2, second root of cot(mu) = (mu^2 - 1) / (2 mu)"},
            {"lambda3_0", "-mu^2, third root of cot(mu) = (mu^2 - 1) / (2 mu)"},
            {"tau_star", "|lambda3_0 - lambda2_0| / 2"}}}};
}

const Thresholds& compute_thresholds() {
  static const Thresholds t = compute_thresholds_uncached();
  return t;
}

Box leading_box() {
  const Thresholds& t = compute_thresholds();
  return {t.lambda2_0 - t.tau_star, t.tau_star, -t.tau_star, t.tau_star};
}

std::vector<RealEigenvalue> real_eigenvalues(double tau, double max_mu) {
  const Thresholds& t = compute_thresholds();
  const double a = std::abs(tau);
  if (!(a < t.tau_star)) throw DomainError("real_eigenvalues: requires |tau| < tau*");
  const double mu2 = std::sqrt(-t.lambda2_0);
  std::vector<RealEigenvalue> out;
  if (a <= kRegimeTol) {
    out.push_back({0.0, 0.0, true});
    out.push_back({t.lambda2_0, mu2, true});
  } else if (std::abs(a - t.tau_s) <= kRegimeTol) {
    out.push_back({-t.mu_s * t.mu_s, t.mu_s, true});
  } else if (a < t.tau_s) {
    const auto g = [a](double m) { return f_squared(m) - a * a; };
    const double left = bracketed_root(g, d_f_squared, std::min(a / 10.0, 0.5 * t.mu_s), t.mu_s, "left window root");
    const double right = bracketed_root(g, d_f_squared, t.mu_s, mu2, "right window root");
    out.push_back({-left * left, left, true});
    out.push_back({-right * right, right, true});
  }
  // Deeper real spectrum: h(mu) = sin(mu) * 2mu^3 * residual, free of poles.
  const auto h = [a](double m) {
    return 2.0 * m * m * m * std::cos(m) - (a * a - m * m + m * m * m * m) * std::sin(m);
  };
  const auto dh = [a](double m) {
    const double s = std::sin(m), c = std::cos(m);
    return 6.0 * m * m * c - 2.0 * m * m * m * s - (-2.0 * m + 4.0 * m * m * m) * s - (a * a - m * m + m * m * m * m) * c;
  };
  const double step = 1e-2;
  double lo = mu2 + 1e-6;
  double hlo = h(lo);
  while (lo < max_mu) {
    const double hi = std::min(lo + step, max_mu);
    const double hhi = h(hi);
    if (std::signbit(hlo) != std::signbit(hhi)) {
      const double m = bracketed_root(h, dh, lo, hi, "deep real root");
      out.push_back({-m * m, m, false});
    }
    lo = hi;
    hlo = hhi;
  }
  return out;
}

std::pair<cplx, cplx> complex_leading_pair(double tau) {
  const Thresholds& t = compute_thresholds();
  const double a = std::abs(tau);
  if (!(a > t.tau_s + kRegimeTol && a < t.tau_star)) {
    throw DomainError("complex_leading_pair: requires tau_s < |tau| < tau*");
  }
  const Box box = leading_box();
  std::vector<cplx> roots;
  std::ostringstream trace;
  constexpr int kGrid = 12;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 1; j <= kGrid; ++j) {
      const cplx seed(box.re_min + (0.0 - box.re_min) * (i + 0.5) / kGrid, box.im_max * j / kGrid);
      cplx w = cplx(0.0, 1.0) * std::sqrt(-seed);
      bool converged = false;
      for (int it = 0; it < 80; ++it) {
        const cplx d = det_Mw_derivative(w, a);
        if (std::abs(d) == 0.0) break;
        const cplx step = det_Mw(w, a) / d;
        w -= step;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) break;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) {
          converged = true;
          break;
        }
      }
      const cplx lambda = w * w;
      const cplx w2 = w * w;
      const double scale =
          std::abs(2.0 * (-a * a - w2 - w2 * w2) * std::sinh(w)) + std::abs(4.0 * w2 * w * std::cosh(w)) + 1e-300;
      if (!converged || std::abs(w) < 1e-6 || std::abs(det_Mw(w, a)) > 1e-10 * scale) {
        trace << " seed " << seed << " -> w " << w;
        continue;
      }
      if (std::abs(lambda.imag()) > 1e-8 && box.contains(lambda)) {
        roots.push_back(lambda.imag() > 0 ? lambda : std::conj(lambda));
      }
    }
  }
  if (roots.empty()) {
    throw RootSearchError("complex_leading_pair: Newton failed from every seed at tau = " + std::to_string(tau) +
                          ";" + trace.str().substr(0, 2000));
  }
  const cplx best = *std::max_element(roots.begin(), roots.end(),
                                      [](cplx x, cplx y) { return x.real() < y.real(); });
  const WindingCount wc = argument_principle_count(a, box);
  if (wc.count != 2) {
    std::ostringstream os;
    os << "complex_leading_pair: argument principle counts " << wc.count << " zeros in the leading box at tau = " << tau;
    throw RootSearchError(os.str());
  }
  return {best, std::conj(best)};
}

WindingCount argument_principle_count(double tau, const Box& box, int initial_points) {
  if (!(box.re_max > box.re_min && box.im_max > box.im_min)) throw DomainError("argument_principle_count: degenerate box");
  const cplx corners[5] = {{box.re_min, box.im_min},
                           {box.re_max, box.im_min},
                           {box.re_max, box.im_max},
                           {box.re_min, box.im_max},
                           {box.re_min, box.im_min}};
  const auto F = [tau](cplx z) {
    const cplx v = characteristic_function(z, tau);
    if (std::abs(v) < 1e-280) throw ContourError("argument_principle_count: zero on the contour");
    return v;
  };
  // Adaptive phase tracking: split any segment whose phase increment exceeds 0.5 rad.
  std::function<double(cplx, cplx, cplx, cplx, int)> phase = [&](cplx z0, cplx z1, cplx f0, cplx f1, int depth) {
    const double d = std::arg(f1 / f0);
    if (std::abs(d) <= 0.5 || depth > 40) return d;
    const cplx zm = 0.5 * (z0 + z1);
    const cplx fm = F(zm);
    return phase(z0, zm, f0, fm, depth + 1) + phase(zm, z1, fm, f1, depth + 1);
  };
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    cplx zp = corners[e];
    cplx fp = F(zp);
    for (int k = 1; k <= initial_points; ++k) {
      const cplx z = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(k) / initial_points);
      const cplx fz = F(z);
      total += phase(zp, z, fp, fz, 0);
      zp = z;
      fp = fz;
    }
  }
  WindingCount out;
  out.winding = total / (2.0 * pi);
  out.count = static_cast<int>(std::lround(out.winding));
  if (std::abs(out.winding - out.count) > 0.1) {
    throw ContourError("argument_principle_count: winding number " + std::to_string(out.winding) + " is not integral");
  }
  return out;
}

std::string to_string(ZeroKind k) {
  switch (k) {
    case ZeroKind::None:
      return "none";
    case ZeroKind::Boundary:
      return "boundary";
    case ZeroKind::Interior:
      return "interior";
  }
  return "unknown";
}

Eigenfunction eigenfunction(double tau, double mu, int samples) {
  if (samples < 2) throw DomainError("eigenfunction: need at least two samples");
  if (tau == 0.0) throw DomainError("eigenfunction: tau must be nonzero");
  const double fm = f_of_mu(mu);
  if (std::abs(fm - std::abs(tau)) > 1e-8) {
    std::ostringstream os;
    os << "eigenfunction: f(mu) = " << fm << " differs from |tau| = " << std::abs(tau);
    throw ConsistencyError(os.str());
  }
  const double s = std::sin(mu), c = std::cos(mu);
  Eigenfunction out;
  out.x = Vec::LinSpaced(samples, 0.0, 1.0);
  out.values.resize(samples);
  double zero = std::numeric_limits<double>::quiet_NaN();
  if (tau > 0) {
    const double num = mu + tau * s;
    const double den = tau * c + mu * mu;
    const double k = den / num;
    for (int i = 0; i < samples; ++i) out.values[i] = std::cos(mu * out.x[i]) - k * std::sin(mu * out.x[i]);
    // tan(mu x) = num / den with mu x in (0, pi/2)
    if (den > 0) zero = std::atan(num / den) / mu;
  } else {
    const double k = (mu * mu * s - mu * c) / (mu * s + mu * mu * c + fm);
    for (int i = 0; i < samples; ++i) out.values[i] = std::sin(mu * out.x[i]) - k * std::cos(mu * out.x[i]);
    // tan(mu x) = k; a slightly negative k is rounding of a zero at x = 0
    zero = std::atan(k) / mu;
  }
  constexpr double kEdge = 1e-8;  // zeros this close to an endpoint count as boundary zeros
  if (!std::isnan(zero) && zero >= -kEdge && zero <= 1.0 + kEdge) {
    out.zero = std::clamp(zero, 0.0, 1.0);
    out.kind = (zero <= kEdge || zero >= 1.0 - kEdge) ? ZeroKind::Boundary : ZeroKind::Interior;
  }
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PositiveSemigroup:
      return "PositiveSemigroup";
    case Regime::EventuallyStronglyPositive:
      return "EventuallyStronglyPositive";
    case Regime::BoundaryDegenerate:
      return "BoundaryDegenerate";
    case Regime::DominantSignChanging:
      return "DominantSignChanging";
    case Regime::JordanDefect:
      return "JordanDefect";
    case Regime::ComplexDominantPair:
      return "ComplexDominantPair";
    case Regime::OutOfValidatedRange:
      return "OutOfValidatedRange";
  }
  return "unknown";
}

nlohmann::json RegimeClassification::to_json() const {
  nlohmann::json lead = nlohmann::json::array();
  for (const cplx& z : leading_eigenvalues) lead.push_back({z.real(), z.imag()});
  return {{"tau", tau},
          {"regime", to_string(regime)},
          {"leading_eigenvalues", lead},
          {"leading_mu", leading_mu ? nlohmann::json(*leading_mu) : nlohmann::json(nullptr)},
          {"eigenfunction_zero", eigenfunction_zero ? nlohmann::json(*eigenfunction_zero) : nlohmann::json(nullptr)},
          {"zero_kind", to_string(zero_kind)}};
}

RegimeClassification classify(double tau) {
  const Thresholds& t = compute_thresholds();
  const double a = std::abs(tau);
  RegimeClassification out;
  out.tau = tau;
  if (a <= kRegimeTol) {
    out.regime = Regime::PositiveSemigroup;
  } else if (std::abs(a - t.tau_p) <= kRegimeTol) {
    out.regime = Regime::BoundaryDegenerate;
  } else if (a < t.tau_p) {
    out.regime = Regime::EventuallyStronglyPositive;
  } else if (std::abs(a - t.tau_s) <= kRegimeTol) {
    out.regime = Regime::JordanDefect;
  } else if (a < t.tau_s) {
    out.regime = Regime::DominantSignChanging;
  } else if (a < t.tau_star - kRegimeTol) {
    out.regime = Regime::ComplexDominantPair;
  } else {
    out.regime = Regime::OutOfValidatedRange;
    return out;
  }

  if (out.regime == Regime::ComplexDominantPair) {
    const auto [l1, l2] = complex_leading_pair(tau);
    out.leading_eigenvalues = {l1, l2};
    return out;
  }
  for (const RealEigenvalue& r : real_eigenvalues(tau)) {
    if (r.in_window) out.leading_eigenvalues.emplace_back(r.lambda, 0.0);
  }
  const RealEigenvalue lead = real_eigenvalues(tau).front();
  out.leading_mu = lead.mu;
  if (out.regime != Regime::PositiveSemigroup) {
    // Evaluate at |tau| = f(mu) exactly so the eigenfunction precondition is met
    // at the tolerance band edges.
    const double signed_tau = std::copysign(f_of_mu(lead.mu), tau);
    const Eigenfunction ef = eigenfunction(signed_tau, lead.mu, 2);
    out.eigenfunction_zero = ef.zero;
    out.zero_kind = ef.kind;
  }
  return out;
}

}  // namespace wentzell
