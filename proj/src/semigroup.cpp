#include "wentzell/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "wentzell/errors.hpp"
#include "wentzell/matrix_exp.hpp"
#include "wentzell/order_checks.hpp"
#include "wentzell/spectral.hpp"

namespace wentzell {

namespace {

Mat shifted(const Mat& G, double s) {
  Mat out = G;
  out.diagonal().array() -= s;
  return out;
}

/// Least-squares line through (t, y); returns slope and RMS residual.
std::pair<double, double> fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  const auto n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  const double icpt = (sy - slope * st) / n;
  double rss = 0;
  for (std::size_t i = 0; i < t.size(); ++i) rss += std::pow(y[i] - icpt - slope * t[i], 2);
  return {slope, std::sqrt(rss / n)};
}

}  // namespace

std::string EvolutionTrace::to_csv(bool full_states) const {
  std::ostringstream os;
  os.precision(17);
  os << "t,min_component,mass,sup_norm";
  if (full_states && !states.empty()) {
    for (Eigen::Index i = 0; i < states[0].size(); ++i) os << ",u" << i;
  }
  os << "\n";
  for (Eigen::Index k = 0; k < times.size(); ++k) {
    os << times[k] << "," << min_component[k] << "," << mass[k] << "," << sup_norm[k];
    if (full_states) {
      for (Eigen::Index i = 0; i < states[k].size(); ++i) os << "," << states[k][i];
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json EvolutionTrace::summary() const {
  return {{"samples", times.size()},
          {"t_final", times.size() ? times[times.size() - 1] : 0.0},
          {"shift", shift},
          {"min_component_final", min_component.size() ? min_component[min_component.size() - 1] : 0.0},
          {"mass_initial", mass.size() ? mass[0] : 0.0},
          {"mass_final", mass.size() ? mass[mass.size() - 1] : 0.0},
          {"mass_drift", mass.size() ? (mass.array() - mass[0]).abs().maxCoeff() : 0.0},
          {"sup_norm_final", sup_norm.size() ? sup_norm[sup_norm.size() - 1] : 0.0}};
}

EvolutionTrace evolve(const DiscreteGenerator& gen, const Vec& u0, double t_final, int samples, double shift) {
  if (!(t_final > 0.0)) throw DomainError("evolve: t_final must be positive");
  if (samples < 2) throw DomainError("evolve: need at least two samples");
  if (u0.size() != gen.size()) throw DimensionError("evolve: initial datum does not match the grid");
  const double dt = t_final / (samples - 1);
  const Mat E = expm(shifted(gen.G, shift), dt);
  const Vec& w = gen.weights.total();
  EvolutionTrace tr;
  tr.shift = shift;
  tr.times = Vec::LinSpaced(samples, 0.0, t_final);
  tr.min_component.resize(samples);
  tr.mass.resize(samples);
  tr.sup_norm.resize(samples);
  Vec u = u0;
  for (int k = 0; k < samples; ++k) {
    if (k > 0) u = E * u;
    tr.states.push_back(u);
    tr.min_component[k] = u.minCoeff();
    tr.mass[k] = w.dot(u);
    tr.sup_norm[k] = u.cwiseAbs().maxCoeff();
  }
  return tr;
}

PositivityProbe empirical_positivity(const Mat& G, const std::vector<double>& times, double tol) {
  PositivityProbe out;
  for (double t : times) {
    const Mat E = expm(G, t);
    Eigen::Index i = 0, j = 0;
    const double m = E.minCoeff(&i, &j);
    if (m < -tol) {
      out.positive = false;
      out.time = t;
      out.row = static_cast<int>(i);
      out.col = static_cast<int>(j);
      out.value = m;
      return out;
    }
  }
  return out;
}

PositivityProbe empirical_positivity(const DiscreteGenerator& gen, const std::vector<double>& times, double tol) {
  return empirical_positivity(gen.G, times, tol);
}

std::string to_string(TailBehavior b) {
  switch (b) {
    case TailBehavior::StrictlyPositive:
      return "StrictlyPositive";
    case TailBehavior::ConvergesToSignChanging:
      return "ConvergesToSignChanging";
    case TailBehavior::Oscillating:
      return "Oscillating";
    case TailBehavior::ConvergesToNonStrict:
      return "ConvergesToNonStrict";
  }
  return "unknown";
}

nlohmann::json EventualPositivityEmpirical::to_json() const {
  return {{"holds_up_to_horizon", holds_up_to_horizon},
          {"t0", t0 ? nlohmann::json(*t0) : nlohmann::json(nullptr)},
          {"delta", delta},
          {"horizon", horizon},
          {"probes", probes},
          {"shift", shift},
          {"tail", to_string(behavior)},
          {"final_ratio", final_ratio}};
}

EventualPositivityEmpirical empirical_eventual_positivity(const DiscreteGenerator& gen,
                                                          const EventualProbeOptions& options) {
  if (options.samples < 3) throw DomainError("empirical_eventual_positivity: need at least three samples");
  SpectrumOptions sopt;
  sopt.count = 1;
  const SpectrumReport rep = spectrum(gen, sopt);
  EventualPositivityEmpirical out;
  out.shift = rep.spectral_bound;
  out.horizon = options.horizon > 0 ? options.horizon
                                    : ((rep.dominant && rep.gap > 0) ? 20.0 / rep.gap : 50.0);
  const int n = gen.size();
  Mat U;
  if (options.probes <= 0 && n <= 401) {
    U = Mat::Identity(n, n);
  } else {
    const int p = options.probes > 0 ? options.probes : 64;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    U.resize(n, p);
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i) U(i, j) = unif(rng);
    }
  }
  const auto p = static_cast<int>(U.cols());
  out.probes = p;
  const int samples = options.samples;
  const double dt = out.horizon / (samples - 1);
  const Mat E = expm(shifted(gen.G, out.shift), dt);

  Mat ratio(samples, p);
  std::vector<Mat> late;  // normalized states over the second half
  const int half = (samples - 1) / 2;
  for (int k = 0; k < samples; ++k) {
    if (k > 0) U = E * U;
    for (int j = 0; j < p; ++j) {
      const double sup = U.col(j).cwiseAbs().maxCoeff();
      ratio(k, j) = sup > 0 ? U.col(j).minCoeff() / sup : 0.0;
    }
    if (k >= half) {
      Mat N = U;
      for (int j = 0; j < p; ++j) {
        const double sup = N.col(j).cwiseAbs().maxCoeff();
        if (sup > 0) N.col(j) /= sup;
      }
      late.push_back(std::move(N));
    }
  }

  bool all_hold = true;
  double t0 = 0.0;
  double delta = std::numeric_limits<double>::infinity();
  bool oscillating = false, sign_changing = false;
  out.final_ratio = ratio.row(samples - 1).minCoeff();
  for (int j = 0; j < p; ++j) {
    int start = samples;
    while (start > 0 && ratio(start - 1, j) > 0.0) --start;
    const bool ok = start <= half;
    if (ok) {
      t0 = std::max(t0, start * dt);
      delta = std::min(delta, 0.5 * ratio.col(j).tail(samples - start).minCoeff());
      continue;
    }
    all_hold = false;
    double drift = 0.0;
    for (const Mat& N : late) drift = std::max(drift, (N.col(j) - late.back().col(j)).cwiseAbs().maxCoeff());
    if (drift > 0.1) {
      oscillating = true;
    } else if (ratio(samples - 1, j) < -kStrictTol) {
      sign_changing = true;
    }
  }
  out.holds_up_to_horizon = all_hold && delta > 0.0;
  if (out.holds_up_to_horizon) {
    out.t0 = t0;
    out.delta = delta;
    out.behavior = TailBehavior::StrictlyPositive;
  } else {
    out.behavior = oscillating      ? TailBehavior::Oscillating
                   : sign_changing ? TailBehavior::ConvergesToSignChanging
                                   : TailBehavior::ConvergesToNonStrict;
  }
  return out;
}

std::string to_string(AsymptoticKind k) {
  switch (k) {
    case AsymptoticKind::ConvergesToProjection:
      return "ConvergesToProjection";
    case AsymptoticKind::DecaysExponentially:
      return "DecaysExponentially";
    case AsymptoticKind::GrowsExponentially:
      return "GrowsExponentially";
  }
  return "unknown";
}

nlohmann::json AsymptoticResult::to_json() const {
  return {{"kind", to_string(kind)},
          {"rate", rate},
          {"predicted_rate", predicted_rate},
          {"rate_matches", rate_matches},
          {"fit_residual", fit_residual},
          {"spectral_bound", spectral_bound},
          {"gap", gap},
          {"positive_generator", positive_generator},
          {"density_normalization", "<v, psi>_M = 1"}};
}

AsymptoticResult asymptotic_classify(const DiscreteGenerator& gen, double tol) {
  SpectrumOptions sopt;
  sopt.count = 1;
  const SpectrumReport rep = spectrum(gen, sopt);
  AsymptoticResult out;
  out.spectral_bound = rep.spectral_bound;
  out.gap = rep.gap;
  out.positive_generator = pmp_check(gen.G, kSignTol).holds;
  out.profile = rep.right_vectors.col(0);
  out.density = rep.left_vectors.col(0);
  if (!(rep.gap > 0.0)) throw NumericalError("asymptotic_classify: no spectral gap below the bound");
  const double s = rep.spectral_bound;
  const bool converging = std::abs(s) <= tol;
  out.kind = converging ? AsymptoticKind::ConvergesToProjection
             : s < 0    ? AsymptoticKind::DecaysExponentially
                        : AsymptoticKind::GrowsExponentially;
  out.predicted_rate = converging ? rep.gap : std::abs(s);

  // Fit window: late enough that subdominant modes are below e^-6 relative,
  // short enough that ||exp(tG) - P|| stays far above rounding.
  double t_end = (converging ? 16.0 : 24.0) / rep.gap;
  if (!converging) t_end = std::min(t_end, 600.0 / std::abs(s));
  const double t_start = t_end / 4.0;
  constexpr int kSamples = 41;
  const double dt = (t_end - t_start) / (kSamples - 1);
  const Mat E0 = expm(gen.G, t_start);
  const Mat Edt = expm(gen.G, dt);
  Mat P = Mat::Zero(gen.size(), gen.size());
  if (converging) {
    const Vec& w = gen.weights.total();
    const CVec mpsi = (w.cast<cplx>().array() * out.density.conjugate().array()).matrix();
    P = (out.profile * mpsi.transpose()).real();
  }
  std::vector<double> ts, logs;
  Mat X = E0;
  for (int k = 0; k < kSamples; ++k) {
    if (k > 0) X = Edt * X;
    const double nrm = (X - P).cwiseAbs().rowwise().sum().maxCoeff();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("asymptotic_classify: degenerate norm sample");
    ts.push_back(t_start + k * dt);
    logs.push_back(std::log(nrm));
  }
  const auto [slope, resid] = fit_line(ts, logs);
  out.fit_residual = resid;
  out.rate = out.kind == AsymptoticKind::GrowsExponentially ? slope : -slope;
  out.rate_matches = std::abs(out.rate - out.predicted_rate) <= 0.1 * out.predicted_rate;
  if (resid > 0.05) {
    std::ostringstream os;
    os << "asymptotic_classify: ambiguous log-linear fit (slope " << slope << ", residual " << resid << ", window ["
       << t_start << ", " << t_end << "], spectral bound " << s << ", gap " << rep.gap << ")";
    throw NumericalError(os.str());
  }
  return out;
}

}  // namespace wentzell
