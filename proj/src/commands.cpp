#include "wentzell/commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wentzell/errors.hpp"
#include "wentzell/matrix_exp.hpp"
#include "wentzell/order_checks.hpp"
#include "wentzell/report.hpp"
#include "wentzell/spectral.hpp"

namespace wentzell {

using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConsistencyError*>(&e)) return kExitInconsistent;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const Error*>(&e)) return kExitUsage;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kExitUsage;
  return kExitNumerical;
}

namespace {

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

json leading(const CVec& eig, int count) {
  json out = json::array();
  for (int k = 0; k < std::min<int>(count, static_cast<int>(eig.size())); ++k) out.push_back(complex_pair(eig[k]));
  return out;
}

int kernel_dimension(const SpectrumReport& rep, double tol = 1e-6) {
  int count = 0;
  for (Eigen::Index k = 0; k < rep.eigenvalues.size(); ++k) count += std::abs(rep.eigenvalues[k]) <= tol;
  return count;
}

std::string require_format(const std::string& requested, const std::string& fallback,
                           std::initializer_list<const char*> allowed, const std::string& command) {
  const std::string f = requested.empty() ? fallback : requested;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw ConfigError("format '" + f + "' is not available for " + command);
}

double require_tau(const RunConfig& cfg, const std::string& command) {
  if (!cfg.tau) throw ConfigError(command + " needs --tau (or a tau in the configuration)");
  return *cfg.tau;
}

}  // namespace

json cmd_thresholds() {
  const Thresholds& t = compute_thresholds();
  json out = t.to_json();
  out["derived"] = {{"tau_p_minus_mu_p_over_sin_mu_p", t.tau_p - t.mu_p / std::sin(t.mu_p)},
                    {"tau_star_minus_half_gap", t.tau_star - 0.5 * std::abs(t.lambda3_0 - t.lambda2_0)},
                    {"sqrt_minus_lambda2_0", std::sqrt(-t.lambda2_0)},
                    {"sqrt_minus_lambda3_0", std::sqrt(-t.lambda3_0)}};
  return out;
}

json cmd_classify(double tau) { return classify(tau).to_json(); }

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << "tau,regime,re1,im1,re2,im2\n";
  for (const auto& r : rows) {
    os << csv_number(r.tau) << ',' << to_string(r.regime) << ',' << csv_number(r.lambda1.real()) << ','
       << csv_number(r.lambda1.imag()) << ',' << csv_number(r.lambda2.real()) << ','
       << csv_number(r.lambda2.imag()) << '\n';
  }
  return os.str();
}

json SweepResult::to_json() const {
  json out = json::array();
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  for (const auto& r : rows) {
    out.push_back({{"tau", r.tau},
                   {"regime", to_string(r.regime)},
                   {"re1", num(r.lambda1.real())},
                   {"im1", num(r.lambda1.imag())},
                   {"re2", num(r.lambda2.real())},
                   {"im2", num(r.lambda2.imag())}});
  }
  return {{"rows", out},
          {"lambda1_monotone", lambda1_monotone ? json(*lambda1_monotone) : json(nullptr)},
          {"lambda1_monotone_note", "observed on the sampled taus, not a theorem"}};
}

SweepResult cmd_sweep(double tau_min, double tau_max, int steps) {
  if (steps < 2) throw ConfigError("sweep needs --steps >= 2");
  if (!(tau_min < tau_max)) throw ConfigError("sweep needs --tau-min < --tau-max");
  const double tau_s = compute_thresholds().tau_s;
  SweepResult out;
  for (int k = 0; k < steps; ++k) {
    const double tau = k + 1 == steps ? tau_max : tau_min + (tau_max - tau_min) * k / (steps - 1);
    const RegimeClassification c = classify(tau);
    SweepRow row;
    row.tau = tau;
    row.regime = c.regime;
    if (!c.leading_eigenvalues.empty()) row.lambda1 = c.leading_eigenvalues[0];
    if (c.leading_eigenvalues.size() > 1) row.lambda2 = c.leading_eigenvalues[1];
    out.rows.push_back(row);
  }
  std::vector<std::pair<double, double>> branch;
  for (const auto& r : out.rows) {
    const double a = std::abs(r.tau);
    if (a > kRegimeTol && a < tau_s - kRegimeTol && std::isfinite(r.lambda1.real())) {
      branch.emplace_back(a, r.lambda1.real());
    }
  }
  std::sort(branch.begin(), branch.end());
  if (branch.size() >= 2) {
    bool mono = true;
    for (std::size_t i = 1; i < branch.size(); ++i) {
      if (branch[i].first > branch[i - 1].first) mono = mono && branch[i].second < branch[i - 1].second;
    }
    out.lambda1_monotone = mono;
  }
  return out;
}

json cmd_spectrum(const RunConfig& cfg) {
  const DiscreteGenerator gen = cfg.generator();
  const SpectrumReport rep = spectrum(gen);
  const DominanceResult dom = classify_dominance(rep);
  json out = rep.to_json();
  out["n"] = cfg.n;
  out["coupling"] = gen.coupling.label;
  out["kernel_dimension"] = kernel_dimension(rep);
  out["dominance"] = {{"dominant", dom.dominant},
                      {"simplicity", to_string(dom.simple)},
                      {"top_cluster_size", dom.top_cluster_size},
                      {"biorthogonality", dom.biorthogonality},
                      {"details", dom.details}};
  out["eventual_positivity"] = eventual_positivity_spectral(rep).to_json();
  return out;
}

std::string EvolveResult::to_svg() const {
  return svg_line_plot("evolution", "t",
                       {{"min_component", trace.times, trace.min_component}, {"mass", trace.times, trace.mass}});
}

EvolveResult cmd_evolve(const RunConfig& cfg) {
  const DiscreteGenerator gen = cfg.generator();
  double shift = 0.0;
  if (cfg.rescale) shift = spectrum(gen, {1}).spectral_bound;
  EvolveResult out{evolve(gen, cfg.u0.materialize(gen.grid), cfg.t_final, cfg.samples, shift), {}};
  out.summary = out.trace.summary();
  out.summary["coupling"] = gen.coupling.label;
  out.summary["n"] = cfg.n;
  out.summary["u0"] = cfg.u0.spec;
  return out;
}

CheckResult cmd_check(const RunConfig& cfg) {
  const DiscreteGenerator gen = cfg.generator();
  const double tol = cfg.tol;
  const OrderCertificate cert = certify_markov(gen.coeffs, gen.coupling, gen.grid);

  const std::vector<double> times = {0.05, 0.5, 5.0};
  const PositivityProbe pos = empirical_positivity(gen.G, times, tol);
  double excess = -INFINITY, deviation = 0.0;
  for (double t : times) {
    const Vec e1 = expm(gen.G, t) * Vec::Ones(gen.size());
    excess = std::max(excess, (e1.array() - 1.0).maxCoeff());
    deviation = std::max(deviation, (e1.array() - 1.0).abs().maxCoeff());
  }
  const bool emp_sub = pos.positive && excess <= tol;
  const bool emp_markov = pos.positive && deviation <= tol;

  const SpectrumReport rep = spectrum(gen);
  const EventualPositivityVerdict verdict = eventual_positivity_spectral(rep);
  EventualProbeOptions probe_opts;
  probe_opts.horizon = cfg.horizon;
  const EventualPositivityEmpirical emp_eventual = empirical_eventual_positivity(gen, probe_opts);

  json agreement = {{"positive", cert.positive == pos.positive},
                    {"sub_markov", cert.sub_markov == emp_sub},
                    {"markov", cert.markov == emp_markov},
                    {"eventual", verdict.holds == emp_eventual.holds_up_to_horizon}};
  bool consistent = true;
  for (const auto& [_, v] : agreement.items()) consistent = consistent && v.get<bool>();

  json asymptotic = nullptr;
  if (cert.positive) {
    const AsymptoticResult a = asymptotic_classify(gen, tol);
    asymptotic = a.to_json();
  }

  json empirical_probe = {{"times", times},
                          {"positive", pos.positive},
                          {"sub_markov", emp_sub},
                          {"markov", emp_markov},
                          {"max_excess_over_one", excess},
                          {"max_deviation_from_one", deviation}};
  if (!pos.positive) {
    empirical_probe["violation"] = {
        {"time", *pos.time}, {"row", pos.row}, {"col", pos.col}, {"value", pos.value}};
  }

  CheckResult out;
  out.consistent = consistent;
  out.report = {
      {"coupling", gen.coupling.label},
      {"n", cfg.n},
      {"positive", cert.positive},
      {"sub_markov", cert.sub_markov},
      {"markov", cert.markov},
      {"eventual", verdict.holds},
      {"kernel_dimension", kernel_dimension(rep)},
      {"asymptotic", cert.positive ? asymptotic["kind"] : json(nullptr)},
      {"consistent", consistent},
      {"algebraic",
       {{"certificate", cert.to_json()},
        {"spectrum",
         {{"spectral_bound", rep.spectral_bound},
          {"gap", rep.gap},
          {"dominant", rep.dominant},
          {"leading_eigenvalues", leading(rep.eigenvalues, 4)}}},
        {"eventual_positivity", verdict.to_json()}}},
      {"empirical", {{"semigroup", empirical_probe}, {"eventual_positivity", emp_eventual.to_json()}}},
      {"agreement", agreement},
      {"asymptotic_detail", asymptotic}};
  return out;
}

json EigenfunctionResult::to_json() const {
  return {{"tau", tau},
          {"mu", mu},
          {"lambda", lambda},
          {"zero", function.zero ? json(*function.zero) : json(nullptr)},
          {"zero_kind", to_string(function.kind)},
          {"x", std::vector<double>(function.x.begin(), function.x.end())},
          {"values", std::vector<double>(function.values.begin(), function.values.end())}};
}

std::string EigenfunctionResult::to_csv() const {
  std::ostringstream os;
  os << "x,value\n";
  for (Eigen::Index i = 0; i < function.x.size(); ++i) {
    os << csv_number(function.x[i]) << ',' << csv_number(function.values[i]) << '\n';
  }
  return os.str();
}

EigenfunctionResult cmd_eigenfunction(double tau, int samples) {
  const Thresholds& t = compute_thresholds();
  if (std::abs(tau) > t.tau_s + kRegimeTol) {
    throw DomainError("eigenfunction: no real leading eigenvalue for |tau| > tau_s");
  }
  EigenfunctionResult out;
  out.tau = tau;
  const RealEigenvalue lead = real_eigenvalues(tau).front();
  out.mu = lead.mu;
  out.lambda = lead.lambda;
  if (std::abs(tau) <= kRegimeTol) {
    out.function.x = Vec::LinSpaced(samples, 0.0, 1.0);
    out.function.values = Vec::Ones(samples);
    return out;
  }
  out.function = eigenfunction(std::copysign(f_of_mu(lead.mu), tau), lead.mu, samples);
  return out;
}

ProjRankResult cmd_proj_rank(const RunConfig& cfg) {
  const DiscreteGenerator gen = cfg.generator();
  const Box box = leading_box();
  const ContourProjection cp = spectral_projection_contour(gen, box);
  const Eigen::Index shown = std::min<Eigen::Index>(cp.singular_values.size(), 4);
  ProjRankResult out;
  out.report = {{"coupling", gen.coupling.label},
                {"n", cfg.n},
                {"box", {box.re_min, box.re_max, box.im_min, box.im_max}},
                {"rank", cp.rank},
                {"trace", cp.trace},
                {"idempotency_residual", cp.idempotency_residual},
                {"enclosed_eigenvalues", cp.enclosed_eigenvalues},
                {"singular_values", std::vector<double>(cp.singular_values.data(),
                                                        cp.singular_values.data() + shown)}};
  const auto tau = cfg.effective_coupling().example_tau;
  if (tau && std::abs(*tau) < compute_thresholds().tau_star) {
    const WindingCount w = argument_principle_count(*tau, box);
    out.report["argument_principle_count"] = w.count;
    out.report["winding"] = w.winding;
    out.consistent = w.count == cp.rank && cp.enclosed_eigenvalues == cp.rank;
  } else {
    out.report["argument_principle_count"] = nullptr;
    out.consistent = cp.enclosed_eigenvalues == cp.rank;
  }
  out.report["consistent"] = out.consistent;
  return out;
}

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = opts.config_path ? RunConfig::from_file(*opts.config_path) : RunConfig{};
  if (opts.n) cfg.n = *opts.n;
  if (opts.t_final) cfg.t_final = *opts.t_final;
  if (opts.samples) cfg.samples = *opts.samples;
  if (opts.tol) cfg.tol = *opts.tol;
  if (opts.tau) {
    if (!std::isfinite(*opts.tau)) throw ConfigError("--tau is not finite");
    if (cfg.coupling_given && !cfg.coupling.example_tau) {
      throw ConfigError("--tau only applies to the example-8.1 coupling");
    }
    cfg.tau = *opts.tau;
    if (cfg.coupling_given) cfg.coupling = CouplingDescriptor::example_8_1(*opts.tau);
  }
  cfg.validate();
  cfg.u0.materialize(cfg.grid());
  return cfg;
}

CommandOutput run_command(const CommandOptions& opts) {
  const std::string& cmd = opts.command;
  CommandOutput out;
  auto emit_json = [&](const json& j) { out.text = stamp(j, cmd).dump(2) + "\n"; };

  if (cmd == "thresholds") {
    const auto f = require_format(opts.format, "json", {"json", "csv"}, cmd);
    const json j = cmd_thresholds();
    if (f == "json") {
      emit_json(j);
    } else {
      std::ostringstream os;
      os << "name,value\n";
      for (const char* k : {"mu_p", "tau_p", "mu_s", "tau_s", "lambda2_0", "lambda3_0", "tau_star", "residuals"}) {
        os << k << ',' << csv_number(j[k].get<double>()) << '\n';
      }
      out.text = os.str();
    }
    return out;
  }
  if (cmd == "sweep") {
    const auto f = require_format(opts.format, "csv", {"csv", "json"}, cmd);
    const SweepResult r = cmd_sweep(opts.tau_min.value_or(0.0), opts.tau_max.value_or(5.5), opts.steps.value_or(111));
    out.text = f == "csv" ? r.to_csv() : stamp(r.to_json(), cmd).dump(2) + "\n";
    return out;
  }

  const RunConfig cfg = resolve_config(opts);
  if (cmd == "classify") {
    require_format(opts.format, "json", {"json"}, cmd);
    emit_json(cmd_classify(require_tau(cfg, cmd)));
  } else if (cmd == "spectrum") {
    const auto f = require_format(opts.format, "json", {"json", "csv"}, cmd);
    const json j = cmd_spectrum(cfg);
    if (f == "json") {
      emit_json(j);
    } else {
      const SpectrumReport rep = spectrum(cfg.generator(), {1});
      std::ostringstream os;
      os << "index,re,im,cluster\n";
      for (int k = 0; k < rep.size(); ++k) {
        os << k << ',' << csv_number(rep.eigenvalues[k].real()) << ',' << csv_number(rep.eigenvalues[k].imag())
           << ',' << rep.cluster[static_cast<std::size_t>(k)] << '\n';
      }
      out.text = os.str();
    }
  } else if (cmd == "evolve") {
    const auto f = require_format(opts.format, "csv", {"csv", "svg", "json"}, cmd);
    const EvolveResult r = cmd_evolve(cfg);
    if (f == "csv") out.text = r.trace.to_csv();
    if (f == "svg") out.text = r.to_svg();
    if (f == "json") emit_json(r.summary);
  } else if (cmd == "check") {
    require_format(opts.format, "json", {"json"}, cmd);
    const CheckResult r = cmd_check(cfg);
    emit_json(r.report);
    if (!r.consistent) out.exit_code = kExitInconsistent;
  } else if (cmd == "eigenfunction") {
    const auto f = require_format(opts.format, "json", {"json", "csv", "svg"}, cmd);
    const EigenfunctionResult r = cmd_eigenfunction(require_tau(cfg, cmd), cfg.samples);
    if (f == "json") emit_json(r.to_json());
    if (f == "csv") out.text = r.to_csv();
    if (f == "svg") {
      out.text = svg_line_plot("leading eigenfunction", "x", {{"v", r.function.x, r.function.values}});
    }
  } else if (cmd == "proj-rank") {
    require_format(opts.format, "json", {"json"}, cmd);
    const ProjRankResult r = cmd_proj_rank(cfg);
    emit_json(r.report);
    if (!r.consistent) out.exit_code = kExitInconsistent;
  } else {
    throw ConfigError("unknown command '" + cmd + "'");
  }
  return out;
}

int dispatch(const CommandOptions& opts, std::ostream& err) {
  try {
    const CommandOutput out = run_command(opts);
    write_text(opts.out, out.text);
    if (out.exit_code == kExitInconsistent) err << "wrlab: algebraic and empirical results disagree\n";
    return out.exit_code;
  } catch (const std::exception& e) {
    err << "wrlab: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace wentzell
