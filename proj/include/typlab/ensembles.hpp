#pragma once

// Random Hermitian Hamiltonian ensembles with variance profiles:
// H = H0 + (A + A*)/√2 where A has independent centered complex Gaussian
// entries with Var(Re a_ij) = Var(Im a_ij) = σ_ij²/2 and a symmetric profile
// σ_ij = σ_ji. Marginals of the random part: off-diagonal Re/Im parts are
// N(0, σ_ij²/2); diagonal entries are real N(0, σ_ii²).
//
// Also: the ensemble constants used by the theoretical bounds — the diagonal
// density bound K, the norm-quantile parameter J, the deterministic-part
// scale C_H0, and the composite constant C_σ.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "typlab/common.hpp"

namespace typlab {

enum class ProfileKind { constant, exponential_band, custom_table };

// Symmetric matrix of entry standard deviations σ_ij (stored as variances
// σ_ij²). Exponential-band profiles σ_jk² = exp(−s·|j−k|) give band matrices
// whose bandwidth shrinks as s grows.
class VarianceProfile {
public:
  static VarianceProfile constant(int D, double sigma2 = 1.0);
  static VarianceProfile exponential_band(int D, double s);
  // Dense symmetric table of variances σ_ij² (validated for symmetry and
  // nonnegativity).
  static VarianceProfile custom_table(Eigen::MatrixXd sigma2);

  ProfileKind kind() const { return kind_; }
  int dim() const { return D_; }
  double band_rate() const { return s_; } // meaningful for exponential_band

  double sigma2(int i, int j) const;
  double sigma(int i, int j) const;
  // Extremes of σ over all entries (σ_-, σ_+).
  double sigma_min() const;
  double sigma_max() const;

  // Dense variance matrix; this is the S that enters the Dyson equation.
  Eigen::MatrixXd dense_sigma2() const;

  // JSON round-trip:
  //   {"kind":"constant","sigma2":x,"dim":D}
  //   {"kind":"exponential-band","s":x,"dim":D}
  //   {"kind":"table","sigma2":[[...],...]}
  // "dim" is optional on input (config files omit it and resolve the
  // dimension later via with_dim) and emitted whenever the profile has one.
  std::string to_json() const;
  static VarianceProfile from_json(const std::string& text);

  // Same profile shape at dimension D. Config files specify profiles without
  // a dimension (it comes from the decomposition); tables must already match.
  VarianceProfile with_dim(int D) const;

private:
  VarianceProfile() = default;
  ProfileKind kind_ = ProfileKind::constant;
  int D_ = 0;
  double scalar_sigma2_ = 1.0; // constant kind
  double s_ = 0.0;             // exponential-band kind
  Eigen::MatrixXd table_;      // custom-table kind
};

// Recipe for one ensemble: dimension, optional deterministic part H0
// (Hermitian), and the variance profile of the random part.
struct EnsembleSpec {
  int D = 0;
  std::optional<Eigen::MatrixXcd> H0;
  VarianceProfile profile = VarianceProfile::constant(0, 1.0);

  static EnsembleSpec make(VarianceProfile profile,
                           std::optional<Eigen::MatrixXcd> H0 = std::nullopt);
};

// All constants a bound report records. The absolute constants c_-, c_+, c_c,
// chat are not pinned numerically by the theory; they default to 1 and every
// report echoes the values used.
struct EnsembleConstants {
  double K = 0.0;       // density bound for diagonal entries
  double J = 0.0;       // norm-quantile parameter: P(‖H‖ ≤ J√D) ≈ 1−η
  double eta = 0.1;     // quantile level, in (0, 1/2)
  double C_H0 = 0.0;    // deterministic-part scale
  double C_sigma = 0.0; // composite constant c_-σ_-/(c_+σ_+ + C_H0)
  double c_minus = 1.0;
  double c_plus = 1.0;
  double c_c = 1.0;
  double chat = 1.0;
};

// Draw one Hamiltonian. Hermiticity is exact by construction (only the upper
// triangle is drawn; the lower is its conjugate; diagonal imaginary parts are
// identically zero). Deterministic given the seed.
Eigen::MatrixXcd sample_hamiltonian(const EnsembleSpec& spec, std::uint64_t seed);

// Three-term norm bound for a random matrix with independent centered entries:
//   chat·( max_i sqrt(Σ_j E x_ij²) + max_j sqrt(Σ_i E x_ij²) + (Σ_ij E x_ij⁴)^{1/4} ).
// The Gaussian overload fills in E x⁴ = 3·(E x²)².
double latala_expression(const VarianceProfile& profile, double chat);
double latala_expression(const VarianceProfile& profile, const Eigen::MatrixXd& fourth_moments,
                         double chat);

// C_H0 = D^{−1/2}·max(‖Re H0‖, ‖Im H0‖), operator norms of the real and
// imaginary parts. Zero matrix gives 0.
double compute_CH0(const Eigen::MatrixXcd& H0);

// Event ‖H‖ ≤ J√D (operator norm = largest singular value; accepted within
// 1e−10 relative slack to absorb eigensolver rounding).
bool boundedness_event(const Eigen::MatrixXcd& H, double J);

struct JEstimate {
  double quantile = 0.0; // empirical (1−η)-quantile of max(‖Re H‖,‖Im H‖)/√D
  double J = 0.0;        // max(K^{-1}, quantile); the usable parameter
};

// Empirical quantile estimator for J over n_samples independent draws.
// Deterministic given (spec, eta, n_samples, seed). Requires n_samples ≥ 20.
JEstimate estimate_J(const EnsembleSpec& spec, double eta, int n_samples, std::uint64_t seed);

// Closed-form Markov-style alternative: J = (1/η)(4·chat·σ_+ + C_H0), which
// reduces to (4/η)·chat·σ_+ for centered ensembles.
double markov_J(const VarianceProfile& profile, double C_H0, double eta, double chat);

// K = 1/(√(2π)·σ_-): uniform bound on the density of any diagonal entry.
// σ_- = 0 means the density is unbounded → error.
double density_bound_K(const VarianceProfile& profile);

// C_σ = c_-·σ_- / (c_+·σ_+ + C_H0); denominator must be positive.
double compute_C_sigma(const EnsembleConstants& constants, double sigma_minus, double sigma_plus,
                       double C_H0);

// Quantile level η solving (1 − 2^{−d_μ/2} − 2^{−d_ν/2})(1 − η)^4 = 1 − ε′
// (closed-form inversion). The one-space overload solves
// (1 − 2^{−d_μ/2})(1 − η)^4 = 1 − ε′.
double solve_eta(double eps_prime, double d_mu, double d_nu);
double solve_eta(double eps_prime, double d_mu);

} // namespace typlab
