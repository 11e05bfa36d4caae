#include "typlab/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace typlab {

namespace {

constexpr int kTimeChunk = 256; // phase-matrix block width for GEMM evaluation

double resolve_tol(const SpectralData& spec, double tol) {
  return tol < 0.0 ? default_spectral_tol(spec.eigenvalues) : tol;
}

// Phase matrix U_{n,k} = exp(−i E_n t_k) for a block of times.
Eigen::MatrixXcd phase_block(const Eigen::VectorXd& evals, const std::vector<double>& times,
                             std::size_t begin, std::size_t end) {
  const int D = static_cast<int>(evals.size());
  Eigen::MatrixXcd U(D, static_cast<int>(end - begin));
  for (std::size_t k = begin; k < end; ++k) {
    const double t = times[k];
    for (int n = 0; n < D; ++n)
      U(n, static_cast<int>(k - begin)) = std::polar(1.0, -evals(n) * t);
  }
  return U;
}

// Curve (1/d_μ)·u(t)† C u(t) over a time grid, u(t)_n = e^{−i t E_n},
// for Hermitian C, evaluated chunk-wise with GEMM.
std::vector<double> hermitian_phase_curve(const Eigen::MatrixXcd& C, const Eigen::VectorXd& evals,
                                          const std::vector<double>& times, double inv_dmu) {
  std::vector<double> out(times.size());
  for (std::size_t begin = 0; begin < times.size(); begin += kTimeChunk) {
    const std::size_t end = std::min(times.size(), begin + kTimeChunk);
    const Eigen::MatrixXcd U = phase_block(evals, times, begin, end);
    const Eigen::MatrixXcd V = C * U;
    for (std::size_t k = begin; k < end; ++k) {
      const int col = static_cast<int>(k - begin);
      out[k] = inv_dmu * U.col(col).dot(V.col(col)).real();
    }
  }
  return out;
}

// A_ν = Φ_ν† Φ_ν (D×D, Hermitian PSD) from the I_ν row block of the
// eigenvector matrix: (A_ν)_{nm} = ⟨φ_n|P_ν|φ_m⟩.
Eigen::MatrixXcd projector_overlap(const SpectralData& spec, const MacroDecomposition& decomp,
                                   int nu) {
  const auto block =
      spec.eigenvectors.block(decomp.offset(nu), 0, decomp.dim(nu), spec.dim());
  return block.adjoint() * block;
}

void check_macro(const SpectralData& spec, const MacroDecomposition& decomp, int mu) {
  require(decomp.total_dim() == spec.dim(), errc::dimension_mismatch,
          "decomposition dimension does not match the spectrum");
  require(mu >= 0 && mu < decomp.macro_count(), errc::invalid_argument,
          "macro index out of range");
}

void check_observable(const SpectralData& spec, const Eigen::MatrixXcd& B) {
  require(B.rows() == spec.dim() && B.cols() == spec.dim(), errc::dimension_mismatch,
          "observable dimension does not match the spectrum");
}

} // namespace

State evolve(const SpectralData& spec, const State& psi0, double t) {
  require(psi0.size() == spec.dim(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  const Eigen::VectorXcd c = spec.eigenvectors.adjoint() * psi0;
  Eigen::VectorXcd phased(c.size());
  for (Eigen::Index n = 0; n < c.size(); ++n)
    phased(n) = std::polar(1.0, -spec.eigenvalues(n) * t) * c(n);
  return spec.eigenvectors * phased;
}

ScalarResult compute_M_psiB(const SpectralData& spec, const State& psi0, const Eigen::MatrixXcd& B,
                            double tol) {
  require(psi0.size() == spec.dim(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  check_observable(spec, B);
  const auto clusters = eigenvalue_clusters(spec.eigenvalues, resolve_tol(spec, tol));

  const Eigen::VectorXcd c = spec.eigenvectors.adjoint() * psi0;
  const Eigen::MatrixXcd W = B * spec.eigenvectors; // W.col(n) = B φ_n

  ScalarResult res;
  for (const auto& [b, e] : clusters) {
    if (e - b == 1) {
      const double bnn = spec.eigenvectors.col(b).dot(W.col(b)).real();
      res.value += std::norm(c(b)) * bnn;
    } else {
      // ⟨ψ|Π_e B Π_e|ψ⟩ = c_e† (Φ_e† B Φ_e) c_e over the cluster block.
      res.block_form = true;
      const int w = e - b;
      const Eigen::MatrixXcd Be =
          spec.eigenvectors.middleCols(b, w).adjoint() * W.middleCols(b, w);
      const Eigen::VectorXcd ce = c.segment(b, w);
      res.value += (ce.adjoint() * (Be * ce))(0).real();
    }
  }
  return res;
}

ScalarResult compute_M_muB(const SpectralData& spec, const MacroDecomposition& decomp, int mu,
                           const Eigen::MatrixXcd& B, double tol) {
  check_macro(spec, decomp, mu);
  check_observable(spec, B);
  const auto clusters = eigenvalue_clusters(spec.eigenvalues, resolve_tol(spec, tol));

  const int off = decomp.offset(mu);
  const int dmu = decomp.dim(mu);
  const Eigen::MatrixXcd W = B * spec.eigenvectors;

  ScalarResult res;
  for (const auto& [b, e] : clusters) {
    if (e - b == 1) {
      const double p = spec.eigenvectors.col(b).segment(off, dmu).squaredNorm();
      const double bnn = spec.eigenvectors.col(b).dot(W.col(b)).real();
      res.value += p * bnn;
    } else {
      // tr(P_μ Π_e B Π_e) = tr( (Φ_e† P_μ Φ_e)(Φ_e† B Φ_e) ).
      res.block_form = true;
      const int w = e - b;
      const auto mu_rows = spec.eigenvectors.block(off, b, dmu, w);
      const Eigen::MatrixXcd Ae = mu_rows.adjoint() * mu_rows;
      const Eigen::MatrixXcd Be =
          spec.eigenvectors.middleCols(b, w).adjoint() * W.middleCols(b, w);
      res.value += (Ae * Be).trace().real();
    }
  }
  res.value /= dmu;
  return res;
}

WeightVector asymptotic_weights(const SpectralData& spec, const MacroDecomposition& decomp,
                                const State& psi0, double tol) {
  require(decomp.total_dim() == spec.dim(), errc::dimension_mismatch,
          "decomposition dimension does not match the spectrum");
  require(psi0.size() == spec.dim(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  const auto clusters = eigenvalue_clusters(spec.eigenvalues, resolve_tol(spec, tol));
  const int m = decomp.macro_count();

  WeightVector out;
  out.weights.assign(static_cast<std::size_t>(m), 0.0);
  const Eigen::VectorXcd c = spec.eigenvectors.adjoint() * psi0;
  // Per cluster: ⟨ψ|Π_e P_ν Π_e|ψ⟩ = ‖(rows I_ν of Φ_e)·c_e‖²; for singleton
  // clusters this is |c_n|²·‖(φ_n)_{I_ν}‖², the non-degenerate formula.
  for (const auto& [b, e] : clusters) {
    const int w = e - b;
    if (w > 1) out.block_form = true;
    const Eigen::VectorXcd u = spec.eigenvectors.middleCols(b, w) * c.segment(b, w);
    for (int nu = 0; nu < m; ++nu)
      out.weights[static_cast<std::size_t>(nu)] +=
          u.segment(decomp.offset(nu), decomp.dim(nu)).squaredNorm();
  }
  return out;
}

MMatrix compute_M_matrix(const SpectralData& spec, const MacroDecomposition& decomp, double tol) {
  require(decomp.total_dim() == spec.dim(), errc::dimension_mismatch,
          "decomposition dimension does not match the spectrum");
  const auto clusters = eigenvalue_clusters(spec.eigenvalues, resolve_tol(spec, tol));
  const int D = spec.dim();
  const int m = decomp.macro_count();

  MMatrix res;
  res.block_form =
      std::any_of(clusters.begin(), clusters.end(),
                  [](const std::pair<int, int>& c) { return c.second - c.first > 1; });

  if (!res.block_form) {
    // P(n,ν) = ⟨φ_n|P_ν|φ_n⟩; then M = diag(1/d_μ)·PᵀP.
    Eigen::MatrixXd P(D, m);
    for (int nu = 0; nu < m; ++nu)
      for (int n = 0; n < D; ++n)
        P(n, nu) = spec.eigenvectors.col(n).segment(decomp.offset(nu), decomp.dim(nu))
                       .squaredNorm();
    res.entries = P.transpose() * P;
  } else {
    res.entries = Eigen::MatrixXd::Zero(m, m);
    for (const auto& [b, e] : clusters) {
      const int w = e - b;
      // A_ν = Φ_e† P_ν Φ_e per macro space; entries gain tr(A_μ A_ν).
      std::vector<Eigen::MatrixXcd> A(static_cast<std::size_t>(m));
      for (int nu = 0; nu < m; ++nu) {
        const auto rows = spec.eigenvectors.block(decomp.offset(nu), b, decomp.dim(nu), w);
        A[static_cast<std::size_t>(nu)] = rows.adjoint() * rows;
      }
      for (int mu = 0; mu < m; ++mu)
        for (int nu = 0; nu < m; ++nu)
          res.entries(mu, nu) +=
              (A[static_cast<std::size_t>(mu)] * A[static_cast<std::size_t>(nu)]).trace().real();
    }
  }
  for (int mu = 0; mu < m; ++mu) res.entries.row(mu) /= decomp.dim(mu);
  return res;
}

std::vector<double> ensemble_curve_w(const SpectralData& spec, const MacroDecomposition& decomp,
                                     int mu, const Eigen::MatrixXcd& B,
                                     const std::vector<double>& times) {
  check_macro(spec, decomp, mu);
  check_observable(spec, B);
  const Eigen::MatrixXcd Amu = projector_overlap(spec, decomp, mu);
  const Eigen::MatrixXcd Beig =
      spec.eigenvectors.adjoint() * (B * spec.eigenvectors);
  // w_μB(t) = (1/d_μ)·u† (A_μ ∘ B_eigᵀ) u with u_n = e^{−i t E_n}.
  const Eigen::MatrixXcd C = Amu.cwiseProduct(Beig.transpose());
  return hermitian_phase_curve(C, spec.eigenvalues, times, 1.0 / decomp.dim(mu));
}

std::vector<double> ensemble_curve_w(const SpectralData& spec, const MacroDecomposition& decomp,
                                     int mu, int nu, const std::vector<double>& times) {
  check_macro(spec, decomp, mu);
  check_macro(spec, decomp, nu);
  const Eigen::MatrixXcd Amu = projector_overlap(spec, decomp, mu);
  const Eigen::MatrixXcd Anu = projector_overlap(spec, decomp, nu);
  const Eigen::MatrixXcd C = Amu.cwiseProduct(Anu.transpose());
  return hermitian_phase_curve(C, spec.eigenvalues, times, 1.0 / decomp.dim(mu));
}

Trajectory trajectory(const SpectralData& spec, const MacroDecomposition& decomp,
                      const State& psi0, const std::vector<double>& times,
                      const Eigen::MatrixXcd* B) {
  require(decomp.total_dim() == spec.dim(), errc::dimension_mismatch,
          "decomposition dimension does not match the spectrum");
  require(psi0.size() == spec.dim(), errc::dimension_mismatch,
          "state dimension does not match the spectrum");
  if (B != nullptr) check_observable(spec, *B);

  const int m = decomp.macro_count();
  Trajectory out;
  out.times = times;
  out.weights.resize(static_cast<Eigen::Index>(times.size()), m);
  if (B != nullptr) out.observable.resize(times.size());

  const Eigen::VectorXcd c = spec.eigenvectors.adjoint() * psi0;
  for (std::size_t begin = 0; begin < times.size(); begin += kTimeChunk) {
    const std::size_t end = std::min(times.size(), begin + kTimeChunk);
    Eigen::MatrixXcd U = phase_block(spec.eigenvalues, times, begin, end);
    U.array().colwise() *= c.array(); // U.col(k) = phases(t_k) ∘ c
    const Eigen::MatrixXcd Psi = spec.eigenvectors * U;
    Eigen::MatrixXcd BPsi;
    if (B != nullptr) BPsi = (*B) * Psi;
    for (std::size_t k = begin; k < end; ++k) {
      const int col = static_cast<int>(k - begin);
      for (int nu = 0; nu < m; ++nu)
        out.weights(static_cast<Eigen::Index>(k), nu) =
            Psi.col(col).segment(decomp.offset(nu), decomp.dim(nu)).squaredNorm();
      if (B != nullptr) out.observable[k] = Psi.col(col).dot(BPsi.col(col)).real();
    }
  }
  return out;
}

ErrorSeries error_series(const std::vector<double>& series, const std::vector<double>& ref,
                         ErrorMode mode, double denominator) {
  require(!series.empty(), errc::invalid_argument, "empty series");
  require(ref.size() == 1 || ref.size() == series.size(), errc::dimension_mismatch,
          "reference must be a scalar or match the series length");

  ErrorSeries out;
  out.values.resize(series.size());
  out.defined.assign(series.size(), 1);
  const double denom = (mode == ErrorMode::absolute) ? 1.0 : denominator;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double r = ref.size() == 1 ? ref[0] : ref[k];
    if (std::abs(denom) < 1e-14) {
      out.values[k] = std::numeric_limits<double>::quiet_NaN();
      out.defined[k] = 0;
      ++out.undefined_count;
    } else {
      out.values[k] = std::abs(series[k] - r) / std::abs(denom);
    }
  }
  return out;
}

double most_t_fraction(const std::vector<double>& series, double bound) {
  require(!series.empty(), errc::invalid_argument, "empty series");
  std::size_t hits = 0;
  for (double v : series)
    if (v <= bound) ++hits;
  return static_cast<double>(hits) / static_cast<double>(series.size());
}

double most_t_fraction(const ErrorSeries& series, double bound) {
  std::size_t hits = 0, total = 0;
  for (std::size_t k = 0; k < series.values.size(); ++k) {
    if (!series.defined[k]) continue;
    ++total;
    if (series.values[k] <= bound) ++hits;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

FractionEstimate most_psi_fraction(const SpectralData& spec, const MacroDecomposition& decomp,
                                   int mu, const std::function<bool(const State&)>& predicate,
                                   int n_samples, std::uint64_t seed) {
  check_macro(spec, decomp, mu);
  require(n_samples >= 1, errc::invalid_argument, "need at least one sample");
  require(static_cast<bool>(predicate), errc::invalid_argument, "predicate must be callable");

  long hits = 0;
  for (int k = 0; k < n_samples; ++k) {
    const State psi0 = sample_unit_state(decomp, mu, derive_seed(seed, static_cast<std::uint64_t>(k)));
    if (predicate(psi0)) ++hits;
  }
  FractionEstimate est;
  est.n_samples = n_samples;
  est.fraction = static_cast<double>(hits) / n_samples;
  est.std_error = std::sqrt(est.fraction * (1.0 - est.fraction) / n_samples);
  return est;
}

} // namespace typlab
