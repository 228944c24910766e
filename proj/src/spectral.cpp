#include "wentzell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "wentzell/errors.hpp"

namespace wentzell {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBiorthTol = 1e-6;
constexpr double kJordanTol = 1e-3;

double inf_norm(const Mat& G) { return G.size() ? G.cwiseAbs().rowwise().sum().maxCoeff() : 0.0; }

bool is_symmetric_similar(const Mat& G, const Vec& mass, double g_norm) {
  const Vec s = mass.cwiseSqrt();
  const Mat S = s.asDiagonal() * G * s.cwiseInverse().asDiagonal();
  return (S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, g_norm);
}

CVec sorted_eigenvalues(const Mat& G, const Vec& mass, bool symmetric) {
  const Vec s = mass.cwiseSqrt();
  Mat S = s.asDiagonal() * G * s.cwiseInverse().asDiagonal();
  CVec ev;
  if (symmetric) {
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("spectrum: symmetric eigensolver did not converge");
    ev = es.eigenvalues().cast<cplx>();
  } else {
    Eigen::EigenSolver<Mat> es(S, false);
    if (es.info() != Eigen::Success) {
      std::ostringstream os;
      os << "spectrum: nonsymmetric eigensolver did not converge (n = " << G.rows() << ", ||G||_inf = " << inf_norm(G)
         << ")";
      throw NumericalError(os.str());
    }
    ev = es.eigenvalues();
  }
  std::vector<cplx> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return Eigen::Map<CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> cluster_ids(const CVec& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // sorted by real part: once the real parts separate by more than tol, stop
      if (ev[i].real() - ev[j].real() > tol) break;
      if (std::abs(ev[i] - ev[j]) <= tol) parent[find(j)] = find(i);
    }
  }
  std::vector<int> id(n, -1), label(n, -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (label[r] < 0) label[r] = next++;
    id[i] = label[r];
  }
  return id;
}

template <class MatT>
MatT random_block(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  MatT X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      if constexpr (std::is_same_v<typename MatT::Scalar, cplx>) {
        const double re = nd(rng);
        X(i, j) = cplx(re, nd(rng));
      } else {
        X(i, j) = nd(rng);
      }
    }
  }
  return X;
}

template <class MatT>
MatT orthonormalize(const MatT& X) {
  Eigen::HouseholderQR<MatT> qr(X);
  return qr.householderQ() * MatT::Identity(X.rows(), X.cols());
}

struct RitzPairs {
  CVec values;
  CMat vectors;
};

/// Block inverse iteration at shift sigma followed by Rayleigh-Ritz on the
/// converged subspace.  Returns k right and k left Ritz pairs (left pairs are
/// eigenvectors of G^T).
template <class Scalar>
std::pair<RitzPairs, RitzPairs> cluster_pairs(const Mat& G, Scalar sigma, int k, double g_norm, std::uint64_t seed) {
  using MatS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = G.rows();
  const MatS Gs = G.template cast<Scalar>();
  for (int attempt = 0; attempt < 4; ++attempt) {
    MatS shifted = Gs;
    shifted.diagonal().array() -= sigma;
    Eigen::PartialPivLU<MatS> lu(shifted);
    // Near-defective clusters make later iterates lose the secondary
    // directions, so keep the basis with the smallest invariance residual.
    auto iterate = [&](const MatS& op, auto&& solve, std::uint64_t s) -> std::optional<MatS> {
      MatS X = random_block<MatS>(n, k, s);
      std::optional<MatS> best;
      double best_res = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 6; ++it) {
        X = orthonormalize<MatS>(solve(X));
        if (!X.allFinite()) break;
        const MatS H = X.adjoint() * op * X;
        const double res = (op * X - X * H).norm();
        if (res < best_res) {
          best_res = res;
          best = X;
        }
        if (res <= 1e-12 * std::max(1.0, g_norm)) break;
      }
      return best;
    };
    const MatS GsT = Gs.transpose();
    const auto R = iterate(Gs, [&](const MatS& X) { return MatS(lu.solve(X)); }, seed);
    const auto L = iterate(GsT, [&](const MatS& X) { return MatS(lu.transpose().solve(X)); },
                           seed ^ 0x9e3779b97f4a7c15ULL);
    if (!R || !L) {
      sigma += static_cast<Scalar>(1e-11 * std::max(1.0, g_norm) * (attempt + 1));
      continue;
    }
    auto ritz = [&](const MatS& Q, const MatS& op) {
      const CMat Qc = Q.template cast<cplx>();
      const CMat H = Qc.adjoint() * op.template cast<cplx>() * Qc;
      Eigen::ComplexEigenSolver<CMat> es(H);
      return RitzPairs{es.eigenvalues(), Qc * es.eigenvectors()};
    };
    return {ritz(*R, Gs), ritz(*L, GsT)};
  }
  throw NumericalError("spectrum: inverse iteration failed to produce finite vectors");
}

/// Index of the Ritz value closest to lambda among those not yet used.
int match(const CVec& values, cplx lambda, std::vector<bool>& used) {
  int best = -1;
  double dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < values.size(); ++i) {
    if (!used[i] && std::abs(values[i] - lambda) < dist) {
      dist = std::abs(values[i] - lambda);
      best = i;
    }
  }
  used[best] = true;
  return best;
}

double m_norm(const CVec& v, const Vec& mass) { return std::sqrt((v.cwiseAbs2().array() * mass.array()).sum()); }

cplx m_inner(const CVec& u, const CVec& v, const Vec& mass) {
  return (u.array() * v.conjugate().array() * mass.array().cast<cplx>()).sum();
}

/// Rotate so the component of largest modulus is real and positive.
CVec fix_phase(const CVec& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (std::abs(v[i]) == 0.0) return v;
  return v * (std::abs(v[i]) / v[i]);
}

}  // namespace

SpectrumReport spectrum(const DiscreteGenerator& gen, const SpectrumOptions& options) {
  return spectrum(gen.G, gen.weights.total(), options);
}

SpectrumReport spectrum(const Mat& G, const Vec& mass, const SpectrumOptions& options) {
  if (G.rows() != G.cols() || G.rows() != mass.size()) throw DimensionError("spectrum: shape mismatch");
  if (!G.allFinite()) throw NumericalError("spectrum: generator has non-finite entries");
  const int n = static_cast<int>(G.rows());
  SpectrumReport rep;
  rep.mass = mass;
  rep.g_norm = inf_norm(G);
  rep.cluster_tol = options.cluster_tol > 0 ? options.cluster_tol : 10.0 * std::sqrt(kEps * std::max(1.0, rep.g_norm));
  rep.symmetric = is_symmetric_similar(G, mass, rep.g_norm);
  rep.eigenvalues = sorted_eigenvalues(G, mass, rep.symmetric);
  rep.cluster = cluster_ids(rep.eigenvalues, rep.cluster_tol);
  const CVec& ev = rep.eigenvalues;

  rep.spectral_bound = ev[0].real();
  rep.gap = 0.0;
  for (int i = 1; i < n; ++i) {
    if (ev[i].real() < rep.spectral_bound - rep.cluster_tol) {
      rep.gap = rep.spectral_bound - ev[i].real();
      break;
    }
  }
  bool top_real = true;
  bool separated = true;
  for (int i = 0; i < n; ++i) {
    if (rep.cluster[i] == 0) {
      top_real = top_real && std::abs(ev[i].imag()) <= rep.cluster_tol;
    } else if (ev[i].real() >= rep.spectral_bound - rep.cluster_tol) {
      separated = false;
    }
  }
  rep.dominant = top_real && separated && rep.gap > rep.cluster_tol;

  // Retain a prefix closed under clusters and conjugation.
  auto conj_index = [&](int i) {
    if (ev[i].imag() == 0.0) return i;
    int best = i;
    double d = std::numeric_limits<double>::infinity();
    for (int j = std::max(0, i - 3); j < std::min(n, i + 4); ++j) {
      if (j != i && std::abs(ev[j] - std::conj(ev[i])) < d) {
        d = std::abs(ev[j] - std::conj(ev[i]));
        best = j;
      }
    }
    return best;
  };
  int r = std::clamp(options.count, 0, n);
  for (bool grown = true; grown && r > 0;) {
    grown = false;
    int need = r;
    for (int i = 0; i < r; ++i) {
      need = std::max(need, conj_index(i) + 1);
      for (int j = r; j < n; ++j) {
        if (rep.cluster[j] == rep.cluster[i]) need = std::max(need, j + 1);
      }
    }
    if (need > r) {
      r = need;
      grown = true;
    }
  }

  rep.right_vectors = CMat::Zero(n, r);
  rep.left_vectors = CMat::Zero(n, r);
  rep.biorthogonality = Vec::Zero(r);
  rep.right_residuals = Vec::Zero(r);
  rep.left_residuals = Vec::Zero(r);
  std::vector<bool> done(r, false);
  for (int i = 0; i < r; ++i) {
    if (done[i]) continue;
    std::vector<int> members;
    for (int j = i; j < r; ++j) {
      if (rep.cluster[j] == rep.cluster[i]) members.push_back(j);
    }
    cplx sigma = 0.0;
    for (int j : members) sigma += ev[j];
    sigma /= static_cast<double>(members.size());
    const int k = static_cast<int>(members.size());
    const std::uint64_t seed = options.seed + 7919ULL * static_cast<std::uint64_t>(i);

    const bool real_cluster = std::abs(sigma.imag()) <= rep.cluster_tol;
    if (!real_cluster && sigma.imag() < 0.0) {
      // conjugate partner cluster was already handled
      const int partner = conj_index(members.front());
      if (partner < i && done[partner]) {
        for (int j : members) {
          const int p = conj_index(j);
          rep.right_vectors.col(j) = rep.right_vectors.col(p).conjugate();
          rep.left_vectors.col(j) = rep.left_vectors.col(p).conjugate();
          rep.biorthogonality[j] = rep.biorthogonality[p];
          done[j] = true;
        }
        continue;
      }
    }
    auto pairs = real_cluster ? cluster_pairs<double>(G, sigma.real(), k, rep.g_norm, seed)
                              : cluster_pairs<cplx>(G, sigma, k, rep.g_norm, seed);
    std::vector<bool> used_r(k, false), used_l(k, false);
    for (int j : members) {
      const int a = match(pairs.first.values, ev[j], used_r);
      const int b = match(pairs.second.values, ev[j], used_l);
      CVec v = pairs.first.vectors.col(a);
      v /= m_norm(v, mass);
      v = fix_phase(v);
      const CVec y = pairs.second.vectors.col(b);
      CVec psi = (y.conjugate().array() / mass.array().cast<cplx>()).matrix();
      const double psi_norm = m_norm(psi, mass);
      const cplx overlap = m_inner(v, psi, mass);
      rep.biorthogonality[j] = std::abs(overlap) / psi_norm;
      if (rep.biorthogonality[j] >= kBiorthTol) {
        psi /= std::conj(overlap);
      } else {
        psi = fix_phase(CVec(psi / psi_norm));
      }
      rep.right_vectors.col(j) = v;
      rep.left_vectors.col(j) = psi;
      done[j] = true;
    }
  }

  // Residuals in the M-norm; the M-adjoint is M^{-1} G^T M.
  const CMat Gc = G.cast<cplx>();
  for (int j = 0; j < r; ++j) {
    const CVec v = rep.right_vectors.col(j);
    const CVec psi = rep.left_vectors.col(j);
    rep.right_residuals[j] = m_norm(Gc * v - ev[j] * v, mass) / m_norm(v, mass);
    const CVec mpsi = (mass.cast<cplx>().array() * psi.array()).matrix();
    const CVec adj = ((Gc.transpose() * mpsi).array() / mass.cast<cplx>().array()).matrix();
    rep.left_residuals[j] = m_norm(adj - std::conj(ev[j]) * psi, mass) / m_norm(psi, mass);
    const double limit = 1e-8 * std::max(1.0, rep.g_norm);
    if (rep.right_residuals[j] > limit || rep.left_residuals[j] > limit) {
      std::ostringstream os;
      os << "spectrum: eigenpair " << j << " (lambda = " << ev[j] << ") has residuals " << rep.right_residuals[j]
         << " / " << rep.left_residuals[j] << " above " << limit;
      throw NumericalError(os.str());
    }
  }
  return rep;
}

nlohmann::json SpectrumReport::to_json(int max_eigenvalues) const {
  nlohmann::json vals = nlohmann::json::array();
  for (int i = 0; i < std::min<int>(max_eigenvalues, size()); ++i) {
    vals.push_back({eigenvalues[i].real(), eigenvalues[i].imag()});
  }
  const DominanceResult dom = classify_dominance(*this);
  return {{"eigenvalues", vals},
          {"size", size()},
          {"spectral_bound", spectral_bound},
          {"gap", gap},
          {"cluster_tol", cluster_tol},
          {"dominant", dom.dominant},
          {"simplicity", to_string(dom.simple)},
          {"simplicity_details", dom.details},
          {"top_cluster_size", dom.top_cluster_size},
          {"biorthogonality", dom.biorthogonality},
          {"symmetric_path", symmetric},
          {"left_vector_normalization", "<v, psi>_M = 1"}};
}

std::string to_string(Simplicity s) {
  switch (s) {
    case Simplicity::AlgebraicallySimple:
      return "AlgebraicallySimple";
    case Simplicity::GeometricallySimpleOnly:
      return "GeometricallySimpleOnly";
    case Simplicity::Degenerate:
      return "Degenerate";
  }
  return "unknown";
}

DominanceResult classify_dominance(const SpectrumReport& report) {
  DominanceResult out;
  out.dominant = report.dominant;
  std::vector<int> top;
  for (int i = 0; i < report.size(); ++i) {
    if (report.cluster[i] == 0) top.push_back(i);
  }
  out.top_cluster_size = static_cast<int>(top.size());
  if (std::abs(report.eigenvalues[0].imag()) > report.cluster_tol) out.details = "complex";
  if (report.retained() <= top.back()) {
    out.simple = top.size() == 1 ? Simplicity::AlgebraicallySimple : Simplicity::Degenerate;
    out.biorthogonality = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.biorthogonality = std::numeric_limits<double>::infinity();
  for (int i : top) out.biorthogonality = std::min(out.biorthogonality, report.biorthogonality[i]);
  if (top.size() == 1) {
    out.simple = out.biorthogonality >= kBiorthTol ? Simplicity::AlgebraicallySimple
                                                   : Simplicity::GeometricallySimpleOnly;
    return out;
  }
  out.simple = Simplicity::Degenerate;
  CMat V(report.eigenvalues.size(), static_cast<Eigen::Index>(top.size()));
  const Vec s = report.mass.cwiseSqrt();
  for (std::size_t c = 0; c < top.size(); ++c) {
    V.col(static_cast<Eigen::Index>(c)) = s.cast<cplx>().cwiseProduct(report.right_vectors.col(top[c]));
  }
  Eigen::JacobiSVD<CMat> svd(V);
  const double smallest = svd.singularValues().minCoeff();
  if (out.details.empty()) out.details = smallest < kJordanTol ? "jordan" : "semisimple";
  return out;
}

namespace {

/// Gauss-Legendre nodes and weights on [-1, 1] via the Golub-Welsch eigenproblem.
std::pair<Vec, Vec> gauss_legendre(int m) {
  Mat J = Mat::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Vec w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
  return {es.eigenvalues(), w};
}

}  // namespace

ContourProjection spectral_projection_contour(const DiscreteGenerator& gen, const Box& box, int quad_points,
                                              QuadratureRule rule) {
  SpectrumOptions opt;
  opt.count = 0;
  const SpectrumReport rep = spectrum(gen, opt);
  return spectral_projection_contour(gen.G, rep.eigenvalues, box, quad_points, rule);
}

ContourProjection spectral_projection_contour(const Mat& G, const CVec& eigenvalues, const Box& box, int quad_points,
                                              QuadratureRule rule) {
  if (G.rows() != G.cols()) throw DimensionError("spectral_projection_contour: matrix is not square");
  if (!(box.re_max > box.re_min && box.im_max > box.im_min)) {
    throw DomainError("spectral_projection_contour: degenerate box");
  }
  if (quad_points < 2) throw DomainError("spectral_projection_contour: need at least two points per edge");
  const double diameter = std::hypot(box.re_max - box.re_min, box.im_max - box.im_min);
  const double dist_tol = 1e-6 * diameter;
  ContourProjection out;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const cplx z = eigenvalues[i];
    const bool inside = z.real() >= box.re_min && z.real() <= box.re_max && z.imag() >= box.im_min &&
                        z.imag() <= box.im_max;
    if (inside && box.boundary_distance(z) <= dist_tol) {
      std::ostringstream os;
      os << "spectral_projection_contour: eigenvalue " << z << " lies within " << dist_tol << " of the contour";
      throw ContourError(os.str());
    }
    if (!inside) {
      // outside points can also sit on an edge extension; distance to the rectangle
      const double dx = std::max({box.re_min - z.real(), 0.0, z.real() - box.re_max});
      const double dy = std::max({box.im_min - z.imag(), 0.0, z.imag() - box.im_max});
      if (std::hypot(dx, dy) <= dist_tol) {
        std::ostringstream os;
        os << "spectral_projection_contour: eigenvalue " << z << " lies within " << dist_tol << " of the contour";
        throw ContourError(os.str());
      }
    }
    if (inside) ++out.enclosed_eigenvalues;
  }

  Vec nodes, weights;
  if (rule == QuadratureRule::GaussLegendre) {
    std::tie(nodes, weights) = gauss_legendre(quad_points);
  } else {
    nodes = Vec::LinSpaced(quad_points + 1, -1.0, 1.0);
    weights = Vec::Constant(quad_points + 1, 2.0 / quad_points);
    weights[0] = weights[quad_points] = 1.0 / quad_points;
  }
  const cplx corners[5] = {{box.re_min, box.im_min},
                           {box.re_max, box.im_min},
                           {box.re_max, box.im_max},
                           {box.re_min, box.im_max},
                           {box.re_min, box.im_min}};
  const Eigen::Index n = G.rows();
  const CMat Gc = G.cast<cplx>();
  const CMat I = CMat::Identity(n, n);
  CMat P = CMat::Zero(n, n);
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[e + 1];
    for (Eigen::Index q = 0; q < nodes.size(); ++q) {
      const cplx z = a + (b - a) * (0.5 * (nodes[q] + 1.0));
      const cplx dz = 0.5 * (b - a) * weights[q];
      const CMat shifted = z * I - Gc;
      P += dz * shifted.partialPivLu().solve(I);
    }
  }
  P /= cplx(0.0, 2.0 * std::numbers::pi);
  if (!P.allFinite()) throw ContourError("spectral_projection_contour: resolvent quadrature produced non-finite values");

  Eigen::BDCSVD<CMat> svd(P);
  out.singular_values = svd.singularValues();
  out.rank = static_cast<int>((out.singular_values.array() > 0.5).count());
  const CMat defect = P * P - P;
  out.idempotency_residual = Eigen::BDCSVD<CMat>(defect).singularValues()[0];
  out.trace = P.trace().real();
  out.projection = std::move(P);
  return out;
}

std::string to_string(PositivityReason r) {
  switch (r) {
    case PositivityReason::DominantSimpleStrictEigvecs:
      return "DominantSimpleStrictEigvecs";
    case PositivityReason::EigvecNotStrictlyPositive:
      return "EigvecNotStrictlyPositive";
    case PositivityReason::EigvecSignChanging:
      return "EigvecSignChanging";
    case PositivityReason::NotAlgebraicallySimple:
      return "NotAlgebraicallySimple";
    case PositivityReason::ComplexDominantPair:
      return "ComplexDominantPair";
    case PositivityReason::NoRealDominant:
      return "NoRealDominant";
  }
  return "unknown";
}

nlohmann::json EventualPositivityVerdict::to_json() const {
  return {{"holds", holds}, {"reason", to_string(reason)}, {"delta_primal", delta_primal}, {"delta_dual", delta_dual}};
}

namespace {

double normalized_min(const CVec& v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  Vec re = v.real();
  if (re[i] < 0) re = -re;
  return re.minCoeff() / re.maxCoeff();
}

}  // namespace

EventualPositivityVerdict eventual_positivity_spectral(const SpectrumReport& report) {
  EventualPositivityVerdict out;
  if (report.eigenvalues[0].imag() > report.cluster_tol) {
    out.reason = PositivityReason::ComplexDominantPair;
    return out;
  }
  if (!report.dominant) {
    out.reason = PositivityReason::NoRealDominant;
    return out;
  }
  const DominanceResult dom = classify_dominance(report);
  if (dom.simple != Simplicity::AlgebraicallySimple) {
    out.reason = PositivityReason::NotAlgebraicallySimple;
    return out;
  }
  out.delta_primal = normalized_min(report.right_vectors.col(0));
  out.delta_dual = normalized_min(report.left_vectors.col(0));
  const double worst = std::min(out.delta_primal, out.delta_dual);
  if (worst < -kStrictTol) {
    out.reason = PositivityReason::EigvecSignChanging;
  } else if (worst <= kStrictTol) {
    out.reason = PositivityReason::EigvecNotStrictlyPositive;
  } else {
    out.reason = PositivityReason::DominantSimpleStrictEigvecs;
    out.holds = true;
  }
  return out;
}

EventualPositivityVerdict eventual_positivity_spectral(const DiscreteGenerator& gen) {
  SpectrumOptions opt;
  opt.count = 2;
  return eventual_positivity_spectral(spectrum(gen, opt));
}

bool DissipativeReport::all_hold() const {
  return bound_nonpositive && imaginary_axis_only_zero && equivalence_holds && (!bound_is_zero || kernel_angle <= 1e-6);
}

nlohmann::json DissipativeReport::to_json() const {
  return {{"spectral_bound", spectral_bound},
          {"coupling_dissipativity", coupling_dissipativity},
          {"coupling_on_one", coupling_on_one},
          {"bound_nonpositive", bound_nonpositive},
          {"imaginary_axis_only_zero", imaginary_axis_only_zero},
          {"coupling_kills_one", coupling_kills_one},
          {"bound_is_zero", bound_is_zero},
          {"equivalence_holds", equivalence_holds},
          {"kernel_angle", std::isnan(kernel_angle) ? nlohmann::json(nullptr) : nlohmann::json(kernel_angle)},
          {"all_hold", all_hold()}};
}

DissipativeReport dissipative_regime_checks(const DiscreteGenerator& gen, double tol) {
  if (!gen.coeffs.drift_free()) {
    throw PreconditionError("dissipative_regime_checks: drift coefficients b, c must vanish");
  }
  DissipativeReport out;
  const Vec& w = gen.weights.total();
  const Vec s = w.cwiseSqrt().cwiseInverse();
  const Mat sym = s.asDiagonal() * (0.5 * (gen.B_h + gen.B_h.transpose())) * s.asDiagonal();
  out.coupling_dissipativity = Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (out.coupling_dissipativity > tol) {
    std::ostringstream os;
    os << "dissipative_regime_checks: coupling is not dissipative (largest eigenvalue of its symmetric part "
       << out.coupling_dissipativity << ")";
    throw PreconditionError(os.str());
  }
  SpectrumOptions opt;
  opt.count = 1;
  const SpectrumReport rep = spectrum(gen, opt);
  out.spectral_bound = rep.spectral_bound;
  out.bound_nonpositive = rep.spectral_bound <= tol;
  out.imaginary_axis_only_zero = true;
  for (int i = 0; i < rep.size(); ++i) {
    const cplx z = rep.eigenvalues[i];
    if (std::abs(z.real()) <= tol && std::abs(z.imag()) > tol) out.imaginary_axis_only_zero = false;
  }
  out.coupling_on_one = gen.apply_coupling(Vec::Ones(gen.size())).cwiseAbs().maxCoeff();
  out.coupling_kills_one = out.coupling_on_one <= tol;
  out.bound_is_zero = std::abs(rep.spectral_bound) <= tol;
  out.equivalence_holds = out.coupling_kills_one == out.bound_is_zero;
  out.kernel_angle = std::numeric_limits<double>::quiet_NaN();
  if (out.bound_is_zero) {
    out.kernel_angle = principal_angles(rep.right_vectors.col(0), CVec::Ones(gen.size()), w).maxCoeff();
  }
  return out;
}

Vec principal_angles(const CMat& A, const CMat& B, const Vec& mass) {
  if (A.rows() != mass.size() || B.rows() != mass.size()) throw DimensionError("principal_angles: shape mismatch");
  const Vec s = mass.cwiseSqrt();
  const CMat QA = orthonormalize<CMat>(s.cast<cplx>().asDiagonal() * A);
  const CMat QB = orthonormalize<CMat>(s.cast<cplx>().asDiagonal() * B);
  const CMat C = QA.adjoint() * QB;
  const Vec cosines = Eigen::JacobiSVD<CMat>(C).singularValues();  // descending
  Vec sines = Eigen::JacobiSVD<CMat>(QB - QA * C).singularValues();
  std::sort(sines.data(), sines.data() + sines.size());  // ascending
  const Eigen::Index m = std::min(cosines.size(), sines.size());
  Vec angles(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double c = std::min(1.0, cosines[i]);
    angles[i] = c < 0.9 ? std::acos(c) : std::asin(std::min(1.0, sines[i]));
  }
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

double discrete_coalescence_tau(int cells, double lo, double hi, double tol) {
  const Grid1D grid(cells);
  auto top_is_complex = [&](double tau) {
    const auto gen = assemble_generator(grid, CoefficientSet::laplacian(),
                                        build_kernel_blocks(grid, CouplingDescriptor::example_8_1(tau)));
    return sorted_eigenvalues(gen.G, gen.weights.total(), false)[0].imag() != 0.0;
  };
  if (top_is_complex(lo) || !top_is_complex(hi)) {
    std::ostringstream os;
    os << "discrete_coalescence_tau: [" << lo << ", " << hi << "] does not bracket the coalescence";
    throw RootSearchError(os.str());
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (top_is_complex(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wentzell
