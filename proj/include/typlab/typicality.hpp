#pragma once

// Unitary dynamics and typicality statistics.
//
// Given an eigendecomposition, evolve pure states, compute the asymptotic
// weights M_ψB and M_μB, the macro-transition matrix M_μν, the ensemble
// reference curve w_μB(t), trajectory weight series, error series
// (absolute / relative / comparative), and "most t" / "most ψ0" fraction
// estimators.
//
// Degenerate spectra: the asymptotic weights are defined through eigenspace
// projectors Π_e. When the spectrum has a cluster of (numerically) equal
// eigenvalues, the non-degenerate diagonal formulas are wrong, so every
// M-quantity routes through cluster blocks in that case and flags that it
// did (`block_form`). For non-degenerate spectra both paths coincide.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "typlab/hilbert.hpp"
#include "typlab/spectral.hpp"

namespace typlab {

// ψ_t = Σ_n c_n e^{−iE_n t} φ_n with c_n = ⟨φ_n|ψ0⟩. Norm-preserving.
State evolve(const SpectralData& spec, const State& psi0, double t);

// Scalar result that remembers whether the degenerate-block path was taken.
struct ScalarResult {
  double value = 0.0;
  bool block_form = false;
};

// M_ψB = Σ_e ⟨ψ|Π_e B Π_e|ψ⟩; equals Σ_n |c_n|²⟨φ_n|B|φ_n⟩ when the spectrum
// is non-degenerate. This is the infinite-time average of ⟨ψ_t|B|ψ_t⟩.
// tol < 0 selects the default clustering tolerance.
ScalarResult compute_M_psiB(const SpectralData& spec, const State& psi0, const Eigen::MatrixXcd& B,
                            double tol = -1.0);

// M_μB = (1/d_μ) Σ_e tr(P_μ Π_e B Π_e); equals
// (1/d_μ) Σ_n ⟨φ_n|P_μ|φ_n⟩⟨φ_n|B|φ_n⟩ in the non-degenerate case. This is
// the average of M_ψB over uniform ψ from the sphere of H_μ.
ScalarResult compute_M_muB(const SpectralData& spec, const MacroDecomposition& decomp, int mu,
                           const Eigen::MatrixXcd& B, double tol = -1.0);

// All asymptotic macro weights of one state at once: component ν equals
// compute_M_psiB with B = P_ν, but is evaluated directly from eigenvector
// segments (O(D²) total instead of one dense projector GEMM per ν).
struct WeightVector {
  std::vector<double> weights; // one entry per macro space
  bool block_form = false;
};
WeightVector asymptotic_weights(const SpectralData& spec, const MacroDecomposition& decomp,
                                const State& psi0, double tol = -1.0);

// M_μν = (1/d_μ) Σ_n ⟨φ_n|P_μ|φ_n⟩⟨φ_n|P_ν|φ_n⟩ (non-degenerate case; block
// form otherwise). Row-stochastic with the detailed-balance symmetry
// d_μ M_μν = d_ν M_νμ and column identity Σ_μ d_μ M_μν = d_ν.
struct MMatrix {
  Eigen::MatrixXd entries; // m × m
  bool block_form = false;
};
MMatrix compute_M_matrix(const SpectralData& spec, const MacroDecomposition& decomp,
                         double tol = -1.0);

// Ensemble reference curve w_μB(t) = (1/d_μ)·tr[P_μ e^{iHt} B e^{−iHt}],
// evaluated in the eigenbasis as a quadratic form in the phase vector
// (e^{−itE_n})_n. Real for Hermitian B. The projector overload (B = P_ν) is
// the common case and avoids forming B.
std::vector<double> ensemble_curve_w(const SpectralData& spec, const MacroDecomposition& decomp,
                                     int mu, const Eigen::MatrixXcd& B,
                                     const std::vector<double>& times);
std::vector<double> ensemble_curve_w(const SpectralData& spec, const MacroDecomposition& decomp,
                                     int mu, int nu, const std::vector<double>& times);

// Weight series ‖P_ν ψ_t‖² over a time grid, plus ⟨ψ_t|B|ψ_t⟩ if B is given.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd weights;        // times.size() × m
  std::vector<double> observable; // empty unless B supplied
};
Trajectory trajectory(const SpectralData& spec, const MacroDecomposition& decomp,
                      const State& psi0, const std::vector<double>& times,
                      const Eigen::MatrixXcd* B = nullptr);

// Error series against a reference. `ref` holds either one value (constant
// reference, e.g. M_μν) or a full series (e.g. w_μν(t)).
//   absolute:     |x_t − ref_t|
//   relative:     |x_t − ref_t| / denominator      (denominator = M_μν)
//   comparative:  |x_t − ref_t| / denominator      (ref = w-curve, denominator = M_ψ0ν)
// Samples whose denominator is below 1e−14 in magnitude are marked undefined
// and excluded from fraction statistics rather than producing infinities.
enum class ErrorMode { absolute, relative, comparative };
struct ErrorSeries {
  std::vector<double> values;       // undefined entries hold NaN
  std::vector<unsigned char> defined;
  std::size_t undefined_count = 0;
};
ErrorSeries error_series(const std::vector<double>& series, const std::vector<double>& ref,
                         ErrorMode mode, double denominator = 1.0);

// Fraction of grid points with value ≤ bound (uniform-grid estimator of the
// fraction of time). The ErrorSeries overload skips undefined samples.
double most_t_fraction(const std::vector<double>& series, double bound);
double most_t_fraction(const ErrorSeries& series, double bound);

// Monte Carlo estimate of the measure of initial states ψ0 ∈ sphere(H_μ)
// satisfying a predicate, with the binomial standard error attached.
struct FractionEstimate {
  double fraction = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};
FractionEstimate most_psi_fraction(const SpectralData& spec, const MacroDecomposition& decomp,
                                   int mu, const std::function<bool(const State&)>& predicate,
                                   int n_samples, std::uint64_t seed);

} // namespace typlab
