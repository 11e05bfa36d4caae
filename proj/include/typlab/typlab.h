#ifndef TYPLAB_H
#define TYPLAB_H

/*
 * typlab — C interface to the typicality laboratory.
 *
 * The library generates random Hermitian Hamiltonians with variance-profile
 * band structure, simulates unitary dynamics of pure states, computes
 * typicality statistics (asymptotic weights, macro-transition matrices,
 * ensemble reference curves), eigenvector delocalization diagnostics, and
 * the theoretical bounds those quantities are compared against.
 *
 * Conventions:
 *   - Every function returns a typlab_status; outputs go through pointers.
 *     On failure, typlab_last_error() describes the problem (thread-local).
 *   - Complex vectors/matrices cross the ABI as double arrays with
 *     interleaved (re, im) pairs; matrices are row-major, so a D×D complex
 *     matrix occupies 2·D·D doubles and entry (i, j) starts at 2·(i·D + j).
 *   - Real matrices are row-major double arrays.
 *   - Macro-space and eigenvector indices are 0-based.
 *   - All sampling is deterministic given the seed arguments.
 *
 * Handles (typlab_decomposition, typlab_profile, typlab_spectral) are opaque,
 * immutable after creation, safe to share across threads, and must be
 * released with the matching _free function.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* ------------------------------------------------------------------ */
/* status codes                                                        */

typedef enum typlab_status {
  TYPLAB_OK = 0,
  TYPLAB_ERR_INVALID_ARGUMENT = 1,
  TYPLAB_ERR_DIMENSION_MISMATCH = 2,
  TYPLAB_ERR_CONFIG = 3,
  TYPLAB_ERR_IO = 4,
  TYPLAB_ERR_NUMERIC = 5,
  TYPLAB_ERR_NOT_CONVERGED = 6,
  TYPLAB_ERR_INTERNAL = 7
} typlab_status;

/* Thread-local description of the most recent failure in this thread. */
const char* typlab_last_error(void);

/* Semantic version of the library. */
const char* typlab_version(void);

/* ------------------------------------------------------------------ */
/* opaque handles                                                      */

typedef struct typlab_decomposition typlab_decomposition;
typedef struct typlab_profile typlab_profile;
typedef struct typlab_spectral typlab_spectral;

/* ------------------------------------------------------------------ */
/* macro-space decomposition                                           */

/* dims: m positive block dimensions; blocks tile {0..D-1} contiguously. */
typlab_status typlab_decomposition_create(const int32_t* dims, size_t m,
                                          typlab_decomposition** out);
void typlab_decomposition_free(typlab_decomposition* d);
typlab_status typlab_decomposition_total(const typlab_decomposition* d, int32_t* out);
typlab_status typlab_decomposition_count(const typlab_decomposition* d, int32_t* out);
typlab_status typlab_decomposition_dim(const typlab_decomposition* d, int32_t nu, int32_t* out);
typlab_status typlab_decomposition_offset(const typlab_decomposition* d, int32_t nu, int32_t* out);

/* Uniform unit vector on the sphere of macro space mu.
 * out: 2·D doubles (interleaved complex). */
typlab_status typlab_sample_state(const typlab_decomposition* d, int32_t mu, uint64_t seed,
                                  double* out);

/* Superposition weight of macro space nu in state psi (2·D doubles). */
typlab_status typlab_project_weight(const typlab_decomposition* d, const double* psi, int32_t nu,
                                    double* out);

/* s = kB·ln(dim)/N. */
typlab_status typlab_entropy_per_particle(int64_t dim, int64_t N, double kB, double* out);

/* Expectation of the Boltzmann-entropy observable in psi. */
typlab_status typlab_boltzmann_entropy(const typlab_decomposition* d, const double* psi, int64_t N,
                                       double kB, double* out);

/* ------------------------------------------------------------------ */
/* variance profiles and Hamiltonian sampling                          */

typlab_status typlab_profile_constant(int32_t D, double sigma2, typlab_profile** out);
typlab_status typlab_profile_exponential_band(int32_t D, double s, typlab_profile** out);
/* sigma2: D×D row-major symmetric nonnegative variance table. */
typlab_status typlab_profile_table(int32_t D, const double* sigma2, typlab_profile** out);
typlab_status typlab_profile_from_json(const char* json_text, typlab_profile** out);
/* Serialized profile; free the returned string with typlab_string_free. */
typlab_status typlab_profile_to_json(const typlab_profile* p, char** out);
void typlab_profile_free(typlab_profile* p);
void typlab_string_free(char* s);
typlab_status typlab_profile_dim(const typlab_profile* p, int32_t* out);
typlab_status typlab_profile_sigma_range(const typlab_profile* p, double* sigma_min,
                                         double* sigma_max);

/* Draw H = H0 + (A + A*)/√2; h0 may be NULL (interleaved complex, 2·D·D
 * doubles otherwise). out: 2·D·D doubles. Hermitian exactly. */
typlab_status typlab_sample_hamiltonian(const typlab_profile* p, const double* h0, uint64_t seed,
                                        double* out);

/* Ensemble constants. */
typlab_status typlab_latala_expression(const typlab_profile* p, double chat, double* out);
typlab_status typlab_density_bound_k(const typlab_profile* p, double* out);
typlab_status typlab_compute_ch0(const double* h0, int32_t D, double* out);
typlab_status typlab_c_sigma(double c_minus, double c_plus, double sigma_minus, double sigma_plus,
                             double ch0, double* out);
/* Empirical (1−eta)-quantile estimator of ‖H‖-type norms over n samples. */
typlab_status typlab_estimate_j(const typlab_profile* p, const double* h0_or_null, double eta,
                                int32_t n_samples, uint64_t seed, double* quantile, double* J);
typlab_status typlab_markov_j(const typlab_profile* p, double ch0, double eta, double chat,
                              double* out);
/* 1 iff ‖H‖ ≤ J·√D. */
typlab_status typlab_boundedness_event(const double* H, int32_t D, double J, int32_t* out);
/* Closed-form eta solving the two-space quantile-budget equation. */
typlab_status typlab_solve_eta(double eps_prime, double d_mu, double d_nu, double* out);

/* ------------------------------------------------------------------ */
/* spectral data and diagnostics                                       */

/* Full eigendecomposition of a Hermitian H (2·D·D doubles). */
typlab_status typlab_spectral_create(const double* H, int32_t D, typlab_spectral** out);
void typlab_spectral_free(typlab_spectral* s);
typlab_status typlab_spectral_dim(const typlab_spectral* s, int32_t* out);
/* out: D doubles, ascending. */
typlab_status typlab_spectral_eigenvalues(const typlab_spectral* s, double* out);
/* Eigenvector n, out: 2·D doubles. */
typlab_status typlab_spectral_eigenvector(const typlab_spectral* s, int32_t n, double* out);
typlab_status typlab_spectral_residual(const typlab_spectral* s, double* out);

/* Spectrum statistics on an ascending eigenvalue array. tol < 0 selects the
 * default 1e−10 × (spectral range). */
typlab_status typlab_max_degeneracy(const double* evals, int32_t n, double tol, int32_t* out);
typlab_status typlab_gap_count(const double* evals, int32_t n, double kappa, double tol,
                               int64_t* out);
typlab_status typlab_max_gap_degeneracy(const double* evals, int32_t n, double tol, int32_t* out);
/* resonance_free: 1/0; witness (optional, pass NULL to skip): 4 indices
 * i, j, k, l with E_i − E_j ≈ E_k − E_l. */
typlab_status typlab_resonance_check(const double* evals, int32_t n, double tol,
                                     int32_t* resonance_free, int32_t* witness);

/* Delocalization metrics. psi/phi: 2·D doubles. */
typlab_status typlab_sup_norm(const double* phi, int32_t D, double* out);
typlab_status typlab_min_subset_mass(const double* phi, int32_t D, double kappa, double* out);
typlab_status typlab_detect_gap_event(const typlab_spectral* s, double kappa, double delta,
                                      int32_t* event, int32_t* worst_index, double* worst_mass);

/* Eigenbasis matrix-element statistic of Hermitian B (2·D·D doubles) and the
 * threshold scale (tr|B̊|²)^{1/2}. threshold(ξ) = D^ξ/D · hs_traceless. */
typlab_status typlab_eth_statistic(const typlab_spectral* s, const double* B, double* stat,
                                   double* hs_traceless);

/* Damped fixed-point solution of the vector Dyson equation for a variance
 * matrix S (D×D row-major, entrywise ≥ 0) at z with Im z > 0.
 * m_out: 2·D doubles. */
typlab_status typlab_solve_dyson(const double* S, int32_t D, double z_re, double z_im, double tol,
                                 int32_t max_iter, double damping, double* m_out,
                                 double* residual_out, int32_t* iterations_out);

/* 1 iff every entry of S^L is ≥ p/D. */
typlab_status typlab_uniform_primitivity(const double* S, int32_t D, int32_t L, double p,
                                         int32_t* out);

/* ------------------------------------------------------------------ */
/* typicality quantities                                               */

/* psi_t = e^{−iHt} psi0 via the eigenbasis. psi0/out: 2·D doubles. */
typlab_status typlab_evolve(const typlab_spectral* s, const double* psi0, double t, double* out);

/* Asymptotic weights. block_form (nullable) reports whether degenerate
 * eigenspace blocks were used. B: 2·D·D doubles. */
typlab_status typlab_m_psi_b(const typlab_spectral* s, const double* psi0, const double* B,
                             double* out, int32_t* block_form);
typlab_status typlab_m_mu_b(const typlab_spectral* s, const typlab_decomposition* d, int32_t mu,
                            const double* B, double* out, int32_t* block_form);
/* Macro-transition matrix, m×m row-major. */
typlab_status typlab_m_matrix(const typlab_spectral* s, const typlab_decomposition* d, double* out,
                              int32_t* block_form);

/* Ensemble reference curve w (B = projector onto macro space nu) on a time
 * grid. out: n_times doubles. */
typlab_status typlab_w_curve(const typlab_spectral* s, const typlab_decomposition* d, int32_t mu,
                             int32_t nu, const double* times, size_t n_times, double* out);

/* Weight series along a trajectory: out is n_times × m row-major. */
typlab_status typlab_trajectory_weights(const typlab_spectral* s, const typlab_decomposition* d,
                                        const double* psi0, const double* times, size_t n_times,
                                        double* out);

/* Fraction of grid values ≤ bound. */
typlab_status typlab_most_t_fraction(const double* values, size_t n, double bound, double* out);

/* ------------------------------------------------------------------ */
/* bound evaluators                                                    */

/* Mirror of the C++ BoundInputs record; see the library documentation for
 * field semantics. Initialize with typlab_bound_inputs_default. */
typedef struct typlab_bound_inputs {
  double eps, delta, eps_prime, kappa, T;
  double d_mu, d_nu, D;
  double D_E, D_G, G_kappa;
  double norm_B, tr_abs_B, tr_B_plus, tr_B_minus;
  double b_plus_min, b_plus_max, b_minus_min, b_minus_max;
  double K, J, C_sigma, c_c;
  double s_mu, s_nu, s_mc, N, kB;
  double xi, tau;
} typlab_bound_inputs;

void typlab_bound_inputs_default(typlab_bound_inputs* in);

typlab_status typlab_bound_abs_finite_t(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_abs_inf_t(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_mmunu_lower_rv(const typlab_bound_inputs* in, double* out,
                                          int32_t* precondition_ok);
typlab_status typlab_bound_mmub_lower(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_relative_gnt(const typlab_bound_inputs* in, double* dimension_form,
                                        double* entropy_form, double* entropy_form_as_dim);
typlab_status typlab_bound_dyntyp_abs(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_dyntyp_l2(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_comparative(const typlab_bound_inputs* in, double* pointwise_entropy,
                                       double* pointwise_dimension, double* l2_entropy,
                                       double* l2_dimension);
typlab_status typlab_bound_lb_b_psi(const typlab_bound_inputs* in, double* out);
typlab_status typlab_bound_prop54(const typlab_bound_inputs* in, double* b, int32_t* applicable,
                                  double* value);
typlab_status typlab_bound_aek(const typlab_bound_inputs* in, double* lb1, double* lb2);
typlab_status typlab_bound_eth(const typlab_bound_inputs* in, double trace_B, double hs_traceless,
                               double* mmub, double* mmunu, double* relative_entropy,
                               double* relative_dimension);

/* ------------------------------------------------------------------ */
/* experiment runner                                                   */

/* Execute a whole experiment: parse config_json, run `command` (one of
 * simulate|mmatrix|deloc|bounds|dyson|eth) and write CSV/JSON artifacts.
 * out_dir / seed_override may be NULL (config values apply); threads = 0
 * falls back to the TYPLAB_THREADS environment variable, then 1. */
typlab_status typlab_run(const char* command, const char* config_json, const char* out_dir,
                         const uint64_t* seed_override, int32_t threads);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TYPLAB_H */
