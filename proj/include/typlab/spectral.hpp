#pragma once

// Hermitian eigendecomposition and every spectrum / eigenvector diagnostic:
// degeneracy and gap-multiplicity counts, resonance checks, delocalization
// metrics (sup-norm, minimal subset mass, gap events), the eigenbasis
// matrix-element statistic used for thermalization checks, and a damped
// fixed-point solver for the vector Dyson equation.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "typlab/common.hpp"

namespace typlab {

// Eigensystem of a Hermitian matrix: ascending eigenvalues, orthonormal
// eigenvectors as columns, and the max per-column residual ‖Hφ_n − E_nφ_n‖.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  double residual = 0.0;

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  double spectral_range() const {
    return dim() > 0 ? eigenvalues(dim() - 1) - eigenvalues(0) : 0.0;
  }
  // Mean level spacing (E_max − E_min)/(D−1); the natural inverse time unit.
  double mean_gap() const { return dim() > 1 ? spectral_range() / (dim() - 1) : 0.0; }
};

// Full eigendecomposition. Input must be Hermitian within 1e−10 (relative to
// its largest entry). Throws errc::numeric if the eigensolver fails.
SpectralData diagonalize(const Eigen::MatrixXcd& H);

// Operator norm = largest singular value.
double operator_norm(const Eigen::MatrixXd& A);
double operator_norm(const Eigen::MatrixXcd& A);

// Default clustering tolerance for degeneracy/gap statistics:
// 1e−10 × spectral range. Exact-arithmetic statements about distinctness need
// an explicit numerical tolerance.
double default_spectral_tol(const Eigen::VectorXd& eigenvalues);

// Half-open index ranges [begin, end) of eigenvalue clusters under transitive
// chaining of |E_{i+1} − E_i| ≤ tol (input ascending). Singleton ranges mean
// simple eigenvalues; larger ranges are numerically degenerate groups.
std::vector<std::pair<int, int>> eigenvalue_clusters(const Eigen::VectorXd& eigenvalues,
                                                     double tol);

// D_E: size of the largest eigenvalue cluster under transitive chaining of
// |E_{i+1} − E_i| ≤ tol (input ascending).
int max_degeneracy(const Eigen::VectorXd& eigenvalues, double tol);

// G(κ): over the multiset {e − e′ : e ≠ e′ distinct eigenvalues at tol},
// the maximal number of differences in a half-open window [E, E+κ).
// Nondecreasing in κ.
long gap_count(const Eigen::VectorXd& eigenvalues, double kappa, double tol);

// D_G = lim_{κ→0+} G(κ): maximal multiplicity among difference values
// clustered at tol. Returns 1 for spectra with fewer than two distinct
// eigenvalues.
int max_gap_degeneracy(const Eigen::VectorXd& eigenvalues, double tol);

// A resonance is an equality λ_i − λ_j = λ_k − λ_l between two genuinely
// distinct index pairs (the trivial coincidences i=j,k=l and (i,j)=(k,l) are
// excluded). Degenerate eigenvalues count (take i = j). Continuous ensembles
// are resonance-free with probability 1; this verifies a given spectrum at a
// numerical tolerance.
struct ResonanceWitness {
  int i = 0, j = 0, k = 0, l = 0; // λ_i − λ_j ≈ λ_k − λ_l (0-based)
  double lhs = 0.0, rhs = 0.0;
};
struct ResonanceResult {
  bool resonance_free = true;
  std::optional<ResonanceWitness> witness;
};
ResonanceResult resonance_check(const Eigen::VectorXd& eigenvalues, double tol);

// Convenience bundle of the scalar diagnostics.
struct SpectrumDiagnostics {
  int D_E = 1;
  int D_G = 1;
  double min_gap = 0.0; // smallest spacing between consecutive distinct eigenvalues
  bool resonance_free = true;
};
SpectrumDiagnostics spectrum_diagnostics(const Eigen::VectorXd& eigenvalues, double tol);

// max_j |φ_j|; equals D^{−1/2} exactly for a flat vector, 1 for a basis
// vector. Always ≥ D^{−1/2} for normalized input.
double sup_norm(const Eigen::VectorXcd& phi);

// Minimal squared mass any index subset of size ⌈κD⌉ can carry: the sum of
// the ⌈κD⌉ smallest |φ_j|². Squared-mass convention — a norm lower bound
// ‖φ_I‖ ≥ c translates to min_subset_mass ≥ c². κ ∈ (0, 1].
double min_subset_mass(const Eigen::VectorXcd& phi, double kappa);

// Gap event: some eigenvector has a size-⌈κD⌉ subset carrying squared mass
// below δ². Reports the worst (eigenvector index, mass) pair either way.
struct GapEventResult {
  bool event = false;
  int worst_index = -1;
  double worst_mass = 0.0;
};
GapEventResult detect_gap_event(const SpectralData& spec, double kappa, double delta);

// Deviation of an observable's eigenbasis matrix from the microcanonical
// expectation: stat = max_{i,j} |⟨φ_i|B|φ_j⟩ − (tr B/D)·δ_ij|. The natural
// comparison scale is threshold(ξ) = D^ξ/D · (tr|B̊|²)^{1/2}, with B̊ the
// traceless part of B; the statistic is invariant under B → B + c·I.
struct EthStatistic {
  double stat = 0.0;
  double trace_B = 0.0;
  double hs_norm_traceless = 0.0; // (tr|B̊|²)^{1/2}
  int D = 0;

  double threshold(double xi) const { return std::pow(double(D), xi) / double(D) * hs_norm_traceless; }
};
EthStatistic eth_statistic(const SpectralData& spec, const Eigen::MatrixXcd& B);

// Vector Dyson equation −1/m_i(z) = z + Σ_j S_ij m_j(z) for Im z > 0,
// S_ij = σ_ij². Solved by damped fixed-point iteration
//   m ← (1−θ)·m + θ·(−1/(z + S m))    starting from m_i = −1/z,
// which respects the upper-half-plane structure of the solution.
struct DysonOptions {
  double tol = 1e-10;
  int max_iter = 200000;
  double damping = 0.5; // θ ∈ (0, 1]
};
struct DysonSolution {
  Eigen::VectorXcd m;
  std::complex<double> z;
  double residual = 0.0; // max_i |1/m_i + z + (S m)_i|
  int iterations = 0;
};
DysonSolution solve_dyson(const Eigen::MatrixXd& S, std::complex<double> z,
                          const DysonOptions& opts = {});

// True iff every entry of S^L is ≥ p/D: L coupling steps connect every pair
// of sites with uniform strength.
bool uniform_primitivity_check(const Eigen::MatrixXd& S, int L, double p);

} // namespace typlab
