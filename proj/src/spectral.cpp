#include "typlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace typlab {

namespace {

void check_ascending(const Eigen::VectorXd& evals) {
  for (Eigen::Index i = 0; i + 1 < evals.size(); ++i)
    require(evals(i) <= evals(i + 1), errc::invalid_argument,
            "eigenvalues must be in ascending order");
}

// Cluster representatives (means), i.e. the distinct eigenvalues at tol.
std::vector<double> distinct_values(const Eigen::VectorXd& evals, double tol) {
  std::vector<double> reps;
  for (const auto& [b, e] : eigenvalue_clusters(evals, tol)) {
    double mean = 0.0;
    for (int i = b; i < e; ++i) mean += evals(i);
    reps.push_back(mean / (e - b));
  }
  return reps;
}

// All signed differences e − e′ over distinct values (e ≠ e′), sorted.
std::vector<double> sorted_signed_differences(const std::vector<double>& reps) {
  const std::size_t n = reps.size();
  std::vector<double> diffs;
  if (n < 2) return diffs;
  diffs.reserve(n * (n - 1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) diffs.push_back(reps[a] - reps[b]);
  std::sort(diffs.begin(), diffs.end());
  return diffs;
}

} // namespace

// --------------------------------------------------------------- eigenwork

SpectralData diagonalize(const Eigen::MatrixXcd& H) {
  require(H.rows() == H.cols(), errc::invalid_argument, "matrix must be square");
  require(H.size() > 0, errc::invalid_argument, "matrix must be nonempty");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double herm_dev = (H - H.adjoint()).cwiseAbs().maxCoeff();
  require(herm_dev <= 1e-10 * scale, errc::invalid_argument,
          "matrix is not Hermitian within 1e-10 relative tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H);
  require(solver.info() == Eigen::Success, errc::numeric, "eigensolver failed to converge");

  SpectralData out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();

  // Max per-eigenpair residual ‖Hφ_n − E_nφ_n‖.
  Eigen::MatrixXcd R = H * out.eigenvectors;
  R -= out.eigenvectors * out.eigenvalues.asDiagonal();
  out.residual = R.colwise().norm().maxCoeff();
  return out;
}

double operator_norm(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues()(0);
}

double operator_norm(const Eigen::MatrixXcd& A) {
  if (A.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

double default_spectral_tol(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() < 2) return 0.0;
  return 1e-10 * (eigenvalues(eigenvalues.size() - 1) - eigenvalues(0));
}

std::vector<std::pair<int, int>> eigenvalue_clusters(const Eigen::VectorXd& eigenvalues,
                                                     double tol) {
  require(tol >= 0.0, errc::invalid_argument, "tolerance must be >= 0");
  check_ascending(eigenvalues);
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(eigenvalues.size());
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || eigenvalues(i) - eigenvalues(i - 1) > tol) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

// ------------------------------------------------------ spectrum statistics

int max_degeneracy(const Eigen::VectorXd& eigenvalues, double tol) {
  require(eigenvalues.size() >= 1, errc::invalid_argument, "empty spectrum");
  require(tol >= 0.0, errc::invalid_argument, "tolerance must be >= 0");
  check_ascending(eigenvalues);
  int best = 1;
  for (const auto& [b, e] : eigenvalue_clusters(eigenvalues, tol)) best = std::max(best, e - b);
  return best;
}

long gap_count(const Eigen::VectorXd& eigenvalues, double kappa, double tol) {
  require(kappa > 0.0, errc::invalid_argument, "window length must be positive");
  require(tol >= 0.0, errc::invalid_argument, "tolerance must be >= 0");
  check_ascending(eigenvalues);
  const auto diffs = sorted_signed_differences(distinct_values(eigenvalues, tol));
  if (diffs.empty()) return 0;
  // Max count of differences in a half-open window [E, E+κ); the maximum is
  // attained with the window flush against some difference, so slide it.
  long best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (j < i) j = i;
    while (j < diffs.size() && diffs[j] - diffs[i] < kappa) ++j;
    best = std::max(best, static_cast<long>(j - i));
  }
  return best;
}

int max_gap_degeneracy(const Eigen::VectorXd& eigenvalues, double tol) {
  require(eigenvalues.size() >= 1, errc::invalid_argument, "empty spectrum");
  require(tol >= 0.0, errc::invalid_argument, "tolerance must be >= 0");
  check_ascending(eigenvalues);
  const auto diffs = sorted_signed_differences(distinct_values(eigenvalues, tol));
  // A spectrum with a single distinct level has no gaps; report multiplicity 1
  // so downstream bound formulas (which multiply by D_G) stay usable.
  if (diffs.empty()) return 1;
  int best = 1, run = 1;
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    if (diffs[i] - diffs[i - 1] <= tol)
      ++run;
    else
      run = 1;
    best = std::max(best, run);
  }
  return best;
}

ResonanceResult resonance_check(const Eigen::VectorXd& eigenvalues, double tol) {
  require(tol >= 0.0, errc::invalid_argument, "tolerance must be >= 0");
  check_ascending(eigenvalues);
  const int n = static_cast<int>(eigenvalues.size());
  ResonanceResult res;

  // Degenerate pair: E_k = E_l is a resonance (match it against the trivial
  // zero difference E_0 − E_0).
  for (int i = 0; i + 1 < n; ++i) {
    if (eigenvalues(i + 1) - eigenvalues(i) <= tol) {
      res.resonance_free = false;
      res.witness = ResonanceWitness{0, 0, i + 1, i, 0.0, eigenvalues(i + 1) - eigenvalues(i)};
      return res;
    }
  }

  // Two equal gaps between distinct index pairs. Only positive differences
  // need checking: a positive difference can only match a negative one near
  // zero, which the degeneracy scan above already excluded. Identical ordered
  // pairs never collide here because each (i > j) pair enters once.
  struct Diff {
    double value;
    int i, j; // value = E_i − E_j, i > j
  };
  std::vector<Diff> diffs;
  diffs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) diffs.push_back({eigenvalues(i) - eigenvalues(j), i, j});
  std::sort(diffs.begin(), diffs.end(), [](const Diff& a, const Diff& b) { return a.value < b.value; });
  for (std::size_t k = 0; k + 1 < diffs.size(); ++k) {
    if (diffs[k + 1].value - diffs[k].value <= tol) {
      res.resonance_free = false;
      res.witness = ResonanceWitness{diffs[k + 1].i, diffs[k + 1].j, diffs[k].i, diffs[k].j,
                                     diffs[k + 1].value, diffs[k].value};
      return res;
    }
  }
  return res;
}

SpectrumDiagnostics spectrum_diagnostics(const Eigen::VectorXd& eigenvalues, double tol) {
  SpectrumDiagnostics d;
  d.D_E = max_degeneracy(eigenvalues, tol);
  d.D_G = max_gap_degeneracy(eigenvalues, tol);
  const auto reps = distinct_values(eigenvalues, tol);
  d.min_gap = 0.0;
  for (std::size_t i = 0; i + 1 < reps.size(); ++i) {
    const double g = reps[i + 1] - reps[i];
    if (d.min_gap == 0.0 || g < d.min_gap) d.min_gap = g;
  }
  d.resonance_free = resonance_check(eigenvalues, tol).resonance_free;
  return d;
}

// --------------------------------------------------- delocalization metrics

double sup_norm(const Eigen::VectorXcd& phi) {
  require(phi.size() > 0, errc::invalid_argument, "empty vector");
  return std::sqrt(phi.cwiseAbs2().maxCoeff());
}

double min_subset_mass(const Eigen::VectorXcd& phi, double kappa) {
  const int D = static_cast<int>(phi.size());
  require(D > 0, errc::invalid_argument, "empty vector");
  require(kappa > 0.0 && kappa <= 1.0, errc::invalid_argument, "kappa must lie in (0, 1]");
  // ⌈κD⌉ with a tiny guard against 3.0000000000000004-style fp noise.
  const int k = std::max(1, static_cast<int>(std::ceil(kappa * D - 1e-9)));
  std::vector<double> mass(static_cast<std::size_t>(D));
  for (int j = 0; j < D; ++j) mass[static_cast<std::size_t>(j)] = std::norm(phi(j));
  // The minimizing subset of size k is the k smallest-|φ_j|² coordinates.
  std::nth_element(mass.begin(), mass.begin() + (k - 1), mass.end());
  return std::accumulate(mass.begin(), mass.begin() + k, 0.0);
}

GapEventResult detect_gap_event(const SpectralData& spec, double kappa, double delta) {
  require(kappa > 0.0 && kappa < 1.0, errc::invalid_argument, "kappa must lie in (0, 1)");
  require(delta > 0.0, errc::invalid_argument, "delta must be positive");
  GapEventResult res;
  const int D = spec.dim();
  for (int n = 0; n < D; ++n) {
    const double mass = min_subset_mass(spec.eigenvectors.col(n), kappa);
    if (res.worst_index < 0 || mass < res.worst_mass) {
      res.worst_index = n;
      res.worst_mass = mass;
    }
  }
  // The event compares squared mass against δ² (norm bound ‖φ_I‖ < δ).
  res.event = res.worst_mass < delta * delta;
  return res;
}

EthStatistic eth_statistic(const SpectralData& spec, const Eigen::MatrixXcd& B) {
  const int D = spec.dim();
  require(B.rows() == D && B.cols() == D, errc::dimension_mismatch,
          "observable dimension does not match the spectral data");
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  require((B - B.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale, errc::invalid_argument,
          "observable must be Hermitian");

  EthStatistic out;
  out.D = D;
  out.trace_B = B.trace().real();
  const double mean = out.trace_B / D;

  // (tr|B̊|²)^{1/2} is the Frobenius norm of the traceless part; basis-free,
  // so compute it straight from B.
  Eigen::MatrixXcd Bo = B;
  Bo.diagonal().array() -= mean;
  out.hs_norm_traceless = Bo.norm();

  // Eigenbasis matrix elements, with the microcanonical diagonal removed.
  Eigen::MatrixXcd M = spec.eigenvectors.adjoint() * (B * spec.eigenvectors);
  M.diagonal().array() -= mean;
  out.stat = M.cwiseAbs().maxCoeff();
  return out;
}

// ------------------------------------------------------------ Dyson solver

DysonSolution solve_dyson(const Eigen::MatrixXd& S, std::complex<double> z,
                          const DysonOptions& opts) {
  const int D = static_cast<int>(S.rows());
  require(S.rows() == S.cols(), errc::dimension_mismatch, "variance matrix must be square");
  require(D >= 1, errc::invalid_argument, "variance matrix must be nonempty");
  require(S.minCoeff() >= 0.0, errc::invalid_argument, "variance matrix must be entrywise >= 0");
  require(z.imag() > 0.0, errc::invalid_argument, "spectral parameter needs Im z > 0");
  require(opts.tol > 0.0, errc::invalid_argument, "tolerance must be positive");
  require(opts.damping > 0.0 && opts.damping <= 1.0, errc::invalid_argument,
          "damping must lie in (0, 1]");
  require(opts.max_iter >= 1, errc::invalid_argument, "max_iter must be >= 1");

  DysonSolution sol;
  sol.z = z;
  Eigen::VectorXcd m = Eigen::VectorXcd::Constant(D, -1.0 / z);

  const double theta = opts.damping;
  for (int iter = 0;; ++iter) {
    // One real-matrix product per part; S is real so this halves the work.
    Eigen::VectorXcd Sm =
        (S * m.real()).cast<std::complex<double>>() +
        std::complex<double>(0.0, 1.0) * (S * m.imag()).cast<std::complex<double>>();
    double resid = 0.0;
    for (int i = 0; i < D; ++i)
      resid = std::max(resid, std::abs(1.0 / m(i) + z + Sm(i)));
    if (resid <= opts.tol) {
      sol.m = m;
      sol.residual = resid;
      sol.iterations = iter;
      return sol;
    }
    if (iter >= opts.max_iter)
      fail(errc::not_converged, "Dyson iteration did not reach tolerance; last residual " +
                                    std::to_string(resid));
    for (int i = 0; i < D; ++i) {
      const std::complex<double> target = -1.0 / (z + Sm(i));
      m(i) = (1.0 - theta) * m(i) + theta * target;
      // The physical solution lives in the upper half-plane; leaving it means
      // the iteration jumped to the wrong branch.
      require(m(i).imag() > 0.0, errc::numeric,
              "Dyson iterate left the upper half-plane (wrong branch)");
    }
  }
}

bool uniform_primitivity_check(const Eigen::MatrixXd& S, int L, double p) {
  const int D = static_cast<int>(S.rows());
  require(S.rows() == S.cols(), errc::dimension_mismatch, "variance matrix must be square");
  require(L >= 1, errc::invalid_argument, "power must be >= 1");
  require(p > 0.0, errc::invalid_argument, "threshold must be positive");
  Eigen::MatrixXd P = S;
  for (int k = 1; k < L; ++k) P = P * S;
  return P.minCoeff() >= p / static_cast<double>(D);
}

} // namespace typlab
