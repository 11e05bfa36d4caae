// C ABI bridge: thin translation between the C header and the C++ core.
// Every entry point catches exceptions and converts them to status codes;
// the message is parked in a thread-local buffer for typlab_last_error().

#include "typlab/typlab.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "typlab/bounds.hpp"
#include "typlab/common.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/hilbert.hpp"
#include "typlab/runner.hpp"
#include "typlab/spectral.hpp"
#include "typlab/typicality.hpp"

struct typlab_decomposition {
  typlab::MacroDecomposition impl;
};
struct typlab_profile {
  typlab::VarianceProfile impl;
};
struct typlab_spectral {
  typlab::SpectralData impl;
};

namespace {

thread_local std::string g_last_error;

typlab_status to_status(typlab::errc c) {
  switch (c) {
    case typlab::errc::ok: return TYPLAB_OK;
    case typlab::errc::invalid_argument: return TYPLAB_ERR_INVALID_ARGUMENT;
    case typlab::errc::dimension_mismatch: return TYPLAB_ERR_DIMENSION_MISMATCH;
    case typlab::errc::config: return TYPLAB_ERR_CONFIG;
    case typlab::errc::io: return TYPLAB_ERR_IO;
    case typlab::errc::numeric: return TYPLAB_ERR_NUMERIC;
    case typlab::errc::not_converged: return TYPLAB_ERR_NOT_CONVERGED;
  }
  return TYPLAB_ERR_INTERNAL;
}

template <typename F>
typlab_status guarded(F&& f) noexcept {
  try {
    f();
    return TYPLAB_OK;
  } catch (const typlab::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TYPLAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TYPLAB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TYPLAB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  typlab::require(p != nullptr, typlab::errc::invalid_argument,
                  std::string(what) + " must not be NULL");
}

Eigen::VectorXcd to_cvec(const double* p, int D) {
  Eigen::VectorXcd v(D);
  for (int i = 0; i < D; ++i) v(i) = std::complex<double>(p[2 * i], p[2 * i + 1]);
  return v;
}

void from_cvec(const Eigen::VectorXcd& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[2 * i] = v(i).real();
    out[2 * i + 1] = v(i).imag();
  }
}

Eigen::MatrixXcd to_cmat(const double* p, int rows, int cols) {
  Eigen::MatrixXcd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double* e = p + 2 * (static_cast<std::size_t>(i) * cols + j);
      M(i, j) = std::complex<double>(e[0], e[1]);
    }
  return M;
}

void from_cmat(const Eigen::MatrixXcd& M, double* out) {
  const int rows = static_cast<int>(M.rows()), cols = static_cast<int>(M.cols());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double* e = out + 2 * (static_cast<std::size_t>(i) * cols + j);
      e[0] = M(i, j).real();
      e[1] = M(i, j).imag();
    }
}

Eigen::MatrixXd to_rmat(const double* p, int rows, int cols) {
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = p[static_cast<std::size_t>(i) * cols + j];
  return M;
}

Eigen::VectorXd to_rvec(const double* p, int n) {
  return Eigen::Map<const Eigen::VectorXd>(p, n);
}

double resolve_tol(const Eigen::VectorXd& evals, double tol) {
  return tol < 0.0 ? typlab::default_spectral_tol(evals) : tol;
}

typlab::BoundInputs to_inputs(const typlab_bound_inputs* in) {
  need(in, "bound inputs");
  typlab::BoundInputs b;
  b.eps = in->eps;
  b.delta = in->delta;
  b.eps_prime = in->eps_prime;
  b.kappa = in->kappa;
  b.T = in->T;
  b.d_mu = in->d_mu;
  b.d_nu = in->d_nu;
  b.D = in->D;
  b.D_E = in->D_E;
  b.D_G = in->D_G;
  b.G_kappa = in->G_kappa;
  b.norm_B = in->norm_B;
  b.tr_abs_B = in->tr_abs_B;
  b.tr_B_plus = in->tr_B_plus;
  b.tr_B_minus = in->tr_B_minus;
  b.b_plus_min = in->b_plus_min;
  b.b_plus_max = in->b_plus_max;
  b.b_minus_min = in->b_minus_min;
  b.b_minus_max = in->b_minus_max;
  b.K = in->K;
  b.J = in->J;
  b.C_sigma = in->C_sigma;
  b.c_c = in->c_c;
  b.s_mu = in->s_mu;
  b.s_nu = in->s_nu;
  b.s_mc = in->s_mc;
  b.N = in->N;
  b.kB = in->kB;
  b.xi = in->xi;
  b.tau = in->tau;
  return b;
}

typlab::EnsembleSpec spec_from(const typlab_profile* p, const double* h0_or_null) {
  need(p, "profile");
  std::optional<Eigen::MatrixXcd> H0;
  if (h0_or_null != nullptr) H0 = to_cmat(h0_or_null, p->impl.dim(), p->impl.dim());
  return typlab::EnsembleSpec::make(p->impl, std::move(H0));
}

} // namespace

extern "C" {

const char* typlab_last_error(void) { return g_last_error.c_str(); }

const char* typlab_version(void) { return typlab::runner::version(); }

/* ------------------------------------------------------------------ */

typlab_status typlab_decomposition_create(const int32_t* dims, size_t m,
                                          typlab_decomposition** out) {
  return guarded([&] {
    need(dims, "dims");
    need(out, "out");
    std::vector<int> d(dims, dims + m);
    *out = new typlab_decomposition{typlab::MacroDecomposition(std::move(d))};
  });
}

void typlab_decomposition_free(typlab_decomposition* d) { delete d; }

typlab_status typlab_decomposition_total(const typlab_decomposition* d, int32_t* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(out, "out");
    *out = d->impl.total_dim();
  });
}

typlab_status typlab_decomposition_count(const typlab_decomposition* d, int32_t* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(out, "out");
    *out = d->impl.macro_count();
  });
}

typlab_status typlab_decomposition_dim(const typlab_decomposition* d, int32_t nu, int32_t* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(out, "out");
    *out = d->impl.dim(nu);
  });
}

typlab_status typlab_decomposition_offset(const typlab_decomposition* d, int32_t nu,
                                          int32_t* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(out, "out");
    *out = d->impl.offset(nu);
  });
}

typlab_status typlab_sample_state(const typlab_decomposition* d, int32_t mu, uint64_t seed,
                                  double* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(out, "out");
    from_cvec(typlab::sample_unit_state(d->impl, mu, seed), out);
  });
}

typlab_status typlab_project_weight(const typlab_decomposition* d, const double* psi, int32_t nu,
                                    double* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(psi, "psi");
    need(out, "out");
    *out = typlab::project_weight(to_cvec(psi, d->impl.total_dim()), d->impl, nu);
  });
}

typlab_status typlab_entropy_per_particle(int64_t dim, int64_t N, double kB, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::entropy_per_particle(dim, typlab::EntropyParams{N, kB});
  });
}

typlab_status typlab_boltzmann_entropy(const typlab_decomposition* d, const double* psi, int64_t N,
                                       double kB, double* out) {
  return guarded([&] {
    need(d, "decomposition");
    need(psi, "psi");
    need(out, "out");
    *out = typlab::boltzmann_entropy_expectation(to_cvec(psi, d->impl.total_dim()), d->impl,
                                                 typlab::EntropyParams{N, kB});
  });
}

/* ------------------------------------------------------------------ */

typlab_status typlab_profile_constant(int32_t D, double sigma2, typlab_profile** out) {
  return guarded([&] {
    need(out, "out");
    *out = new typlab_profile{typlab::VarianceProfile::constant(D, sigma2)};
  });
}

typlab_status typlab_profile_exponential_band(int32_t D, double s, typlab_profile** out) {
  return guarded([&] {
    need(out, "out");
    *out = new typlab_profile{typlab::VarianceProfile::exponential_band(D, s)};
  });
}

typlab_status typlab_profile_table(int32_t D, const double* sigma2, typlab_profile** out) {
  return guarded([&] {
    need(sigma2, "sigma2");
    need(out, "out");
    *out = new typlab_profile{typlab::VarianceProfile::custom_table(to_rmat(sigma2, D, D))};
  });
}

typlab_status typlab_profile_from_json(const char* json_text, typlab_profile** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new typlab_profile{typlab::VarianceProfile::from_json(json_text)};
  });
}

typlab_status typlab_profile_to_json(const typlab_profile* p, char** out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    const std::string text = p->impl.to_json();
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void typlab_profile_free(typlab_profile* p) { delete p; }

void typlab_string_free(char* s) { delete[] s; }

typlab_status typlab_profile_dim(const typlab_profile* p, int32_t* out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    *out = p->impl.dim();
  });
}

typlab_status typlab_profile_sigma_range(const typlab_profile* p, double* sigma_min,
                                         double* sigma_max) {
  return guarded([&] {
    need(p, "profile");
    if (sigma_min != nullptr) *sigma_min = p->impl.sigma_min();
    if (sigma_max != nullptr) *sigma_max = p->impl.sigma_max();
  });
}

typlab_status typlab_sample_hamiltonian(const typlab_profile* p, const double* h0, uint64_t seed,
                                        double* out) {
  return guarded([&] {
    need(out, "out");
    from_cmat(typlab::sample_hamiltonian(spec_from(p, h0), seed), out);
  });
}

typlab_status typlab_latala_expression(const typlab_profile* p, double chat, double* out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    *out = typlab::latala_expression(p->impl, chat);
  });
}

typlab_status typlab_density_bound_k(const typlab_profile* p, double* out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    *out = typlab::density_bound_K(p->impl);
  });
}

typlab_status typlab_compute_ch0(const double* h0, int32_t D, double* out) {
  return guarded([&] {
    need(h0, "h0");
    need(out, "out");
    *out = typlab::compute_CH0(to_cmat(h0, D, D));
  });
}

typlab_status typlab_c_sigma(double c_minus, double c_plus, double sigma_minus, double sigma_plus,
                             double ch0, double* out) {
  return guarded([&] {
    need(out, "out");
    typlab::EnsembleConstants k;
    k.c_minus = c_minus;
    k.c_plus = c_plus;
    *out = typlab::compute_C_sigma(k, sigma_minus, sigma_plus, ch0);
  });
}

typlab_status typlab_estimate_j(const typlab_profile* p, const double* h0_or_null, double eta,
                                int32_t n_samples, uint64_t seed, double* quantile, double* J) {
  return guarded([&] {
    const typlab::JEstimate est = typlab::estimate_J(spec_from(p, h0_or_null), eta, n_samples, seed);
    if (quantile != nullptr) *quantile = est.quantile;
    if (J != nullptr) *J = est.J;
  });
}

typlab_status typlab_markov_j(const typlab_profile* p, double ch0, double eta, double chat,
                              double* out) {
  return guarded([&] {
    need(p, "profile");
    need(out, "out");
    *out = typlab::markov_J(p->impl, ch0, eta, chat);
  });
}

typlab_status typlab_boundedness_event(const double* H, int32_t D, double J, int32_t* out) {
  return guarded([&] {
    need(H, "H");
    need(out, "out");
    *out = typlab::boundedness_event(to_cmat(H, D, D), J) ? 1 : 0;
  });
}

typlab_status typlab_solve_eta(double eps_prime, double d_mu, double d_nu, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::solve_eta(eps_prime, d_mu, d_nu);
  });
}

/* ------------------------------------------------------------------ */

typlab_status typlab_spectral_create(const double* H, int32_t D, typlab_spectral** out) {
  return guarded([&] {
    need(H, "H");
    need(out, "out");
    *out = new typlab_spectral{typlab::diagonalize(to_cmat(H, D, D))};
  });
}

void typlab_spectral_free(typlab_spectral* s) { delete s; }

typlab_status typlab_spectral_dim(const typlab_spectral* s, int32_t* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(out, "out");
    *out = s->impl.dim();
  });
}

typlab_status typlab_spectral_eigenvalues(const typlab_spectral* s, double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(out, "out");
    Eigen::Map<Eigen::VectorXd>(out, s->impl.dim()) = s->impl.eigenvalues;
  });
}

typlab_status typlab_spectral_eigenvector(const typlab_spectral* s, int32_t n, double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(out, "out");
    typlab::require(n >= 0 && n < s->impl.dim(), typlab::errc::invalid_argument,
                    "eigenvector index out of range");
    from_cvec(s->impl.eigenvectors.col(n), out);
  });
}

typlab_status typlab_spectral_residual(const typlab_spectral* s, double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(out, "out");
    *out = s->impl.residual;
  });
}

typlab_status typlab_max_degeneracy(const double* evals, int32_t n, double tol, int32_t* out) {
  return guarded([&] {
    need(evals, "evals");
    need(out, "out");
    const Eigen::VectorXd ev = to_rvec(evals, n);
    *out = typlab::max_degeneracy(ev, resolve_tol(ev, tol));
  });
}

typlab_status typlab_gap_count(const double* evals, int32_t n, double kappa, double tol,
                               int64_t* out) {
  return guarded([&] {
    need(evals, "evals");
    need(out, "out");
    const Eigen::VectorXd ev = to_rvec(evals, n);
    *out = typlab::gap_count(ev, kappa, resolve_tol(ev, tol));
  });
}

typlab_status typlab_max_gap_degeneracy(const double* evals, int32_t n, double tol, int32_t* out) {
  return guarded([&] {
    need(evals, "evals");
    need(out, "out");
    const Eigen::VectorXd ev = to_rvec(evals, n);
    *out = typlab::max_gap_degeneracy(ev, resolve_tol(ev, tol));
  });
}

typlab_status typlab_resonance_check(const double* evals, int32_t n, double tol,
                                     int32_t* resonance_free, int32_t* witness) {
  return guarded([&] {
    need(evals, "evals");
    need(resonance_free, "resonance_free");
    const Eigen::VectorXd ev = to_rvec(evals, n);
    const typlab::ResonanceResult res = typlab::resonance_check(ev, resolve_tol(ev, tol));
    *resonance_free = res.resonance_free ? 1 : 0;
    if (witness != nullptr) {
      if (res.witness.has_value()) {
        witness[0] = res.witness->i;
        witness[1] = res.witness->j;
        witness[2] = res.witness->k;
        witness[3] = res.witness->l;
      } else {
        witness[0] = witness[1] = witness[2] = witness[3] = -1;
      }
    }
  });
}

typlab_status typlab_sup_norm(const double* phi, int32_t D, double* out) {
  return guarded([&] {
    need(phi, "phi");
    need(out, "out");
    *out = typlab::sup_norm(to_cvec(phi, D));
  });
}

typlab_status typlab_min_subset_mass(const double* phi, int32_t D, double kappa, double* out) {
  return guarded([&] {
    need(phi, "phi");
    need(out, "out");
    *out = typlab::min_subset_mass(to_cvec(phi, D), kappa);
  });
}

typlab_status typlab_detect_gap_event(const typlab_spectral* s, double kappa, double delta,
                                      int32_t* event, int32_t* worst_index, double* worst_mass) {
  return guarded([&] {
    need(s, "spectral data");
    const typlab::GapEventResult res = typlab::detect_gap_event(s->impl, kappa, delta);
    if (event != nullptr) *event = res.event ? 1 : 0;
    if (worst_index != nullptr) *worst_index = res.worst_index;
    if (worst_mass != nullptr) *worst_mass = res.worst_mass;
  });
}

typlab_status typlab_eth_statistic(const typlab_spectral* s, const double* B, double* stat,
                                   double* hs_traceless) {
  return guarded([&] {
    need(s, "spectral data");
    need(B, "B");
    const typlab::EthStatistic res = typlab::eth_statistic(s->impl, to_cmat(B, s->impl.dim(), s->impl.dim()));
    if (stat != nullptr) *stat = res.stat;
    if (hs_traceless != nullptr) *hs_traceless = res.hs_norm_traceless;
  });
}

typlab_status typlab_solve_dyson(const double* S, int32_t D, double z_re, double z_im, double tol,
                                 int32_t max_iter, double damping, double* m_out,
                                 double* residual_out, int32_t* iterations_out) {
  return guarded([&] {
    need(S, "S");
    need(m_out, "m_out");
    typlab::DysonOptions opts;
    if (tol > 0.0) opts.tol = tol;
    if (max_iter > 0) opts.max_iter = max_iter;
    if (damping > 0.0) opts.damping = damping;
    const typlab::DysonSolution sol =
        typlab::solve_dyson(to_rmat(S, D, D), std::complex<double>(z_re, z_im), opts);
    from_cvec(sol.m, m_out);
    if (residual_out != nullptr) *residual_out = sol.residual;
    if (iterations_out != nullptr) *iterations_out = sol.iterations;
  });
}

typlab_status typlab_uniform_primitivity(const double* S, int32_t D, int32_t L, double p,
                                         int32_t* out) {
  return guarded([&] {
    need(S, "S");
    need(out, "out");
    *out = typlab::uniform_primitivity_check(to_rmat(S, D, D), L, p) ? 1 : 0;
  });
}

/* ------------------------------------------------------------------ */

typlab_status typlab_evolve(const typlab_spectral* s, const double* psi0, double t, double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(psi0, "psi0");
    need(out, "out");
    from_cvec(typlab::evolve(s->impl, to_cvec(psi0, s->impl.dim()), t), out);
  });
}

typlab_status typlab_m_psi_b(const typlab_spectral* s, const double* psi0, const double* B,
                             double* out, int32_t* block_form) {
  return guarded([&] {
    need(s, "spectral data");
    need(psi0, "psi0");
    need(B, "B");
    need(out, "out");
    const int D = s->impl.dim();
    const typlab::ScalarResult res =
        typlab::compute_M_psiB(s->impl, to_cvec(psi0, D), to_cmat(B, D, D));
    *out = res.value;
    if (block_form != nullptr) *block_form = res.block_form ? 1 : 0;
  });
}

typlab_status typlab_m_mu_b(const typlab_spectral* s, const typlab_decomposition* d, int32_t mu,
                            const double* B, double* out, int32_t* block_form) {
  return guarded([&] {
    need(s, "spectral data");
    need(d, "decomposition");
    need(B, "B");
    need(out, "out");
    const int D = s->impl.dim();
    const typlab::ScalarResult res =
        typlab::compute_M_muB(s->impl, d->impl, mu, to_cmat(B, D, D));
    *out = res.value;
    if (block_form != nullptr) *block_form = res.block_form ? 1 : 0;
  });
}

typlab_status typlab_m_matrix(const typlab_spectral* s, const typlab_decomposition* d, double* out,
                              int32_t* block_form) {
  return guarded([&] {
    need(s, "spectral data");
    need(d, "decomposition");
    need(out, "out");
    const typlab::MMatrix M = typlab::compute_M_matrix(s->impl, d->impl);
    const int m = d->impl.macro_count();
    for (int mu = 0; mu < m; ++mu)
      for (int nu = 0; nu < m; ++nu) out[static_cast<std::size_t>(mu) * m + nu] = M.entries(mu, nu);
    if (block_form != nullptr) *block_form = M.block_form ? 1 : 0;
  });
}

typlab_status typlab_w_curve(const typlab_spectral* s, const typlab_decomposition* d, int32_t mu,
                             int32_t nu, const double* times, size_t n_times, double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(d, "decomposition");
    need(times, "times");
    need(out, "out");
    const std::vector<double> ts(times, times + n_times);
    const std::vector<double> w = typlab::ensemble_curve_w(s->impl, d->impl, mu, nu, ts);
    std::memcpy(out, w.data(), w.size() * sizeof(double));
  });
}

typlab_status typlab_trajectory_weights(const typlab_spectral* s, const typlab_decomposition* d,
                                        const double* psi0, const double* times, size_t n_times,
                                        double* out) {
  return guarded([&] {
    need(s, "spectral data");
    need(d, "decomposition");
    need(psi0, "psi0");
    need(times, "times");
    need(out, "out");
    const std::vector<double> ts(times, times + n_times);
    const typlab::Trajectory traj =
        typlab::trajectory(s->impl, d->impl, to_cvec(psi0, s->impl.dim()), ts);
    const int m = d->impl.macro_count();
    for (std::size_t k = 0; k < n_times; ++k)
      for (int nu = 0; nu < m; ++nu)
        out[k * static_cast<std::size_t>(m) + static_cast<std::size_t>(nu)] =
            traj.weights(static_cast<Eigen::Index>(k), nu);
  });
}

typlab_status typlab_most_t_fraction(const double* values, size_t n, double bound, double* out) {
  return guarded([&] {
    need(values, "values");
    need(out, "out");
    *out = typlab::most_t_fraction(std::vector<double>(values, values + n), bound);
  });
}

/* ------------------------------------------------------------------ */

void typlab_bound_inputs_default(typlab_bound_inputs* in) {
  if (in == nullptr) return;
  const typlab::BoundInputs d;
  *in = typlab_bound_inputs{d.eps,        d.delta,      d.eps_prime,  d.kappa,     d.T,
                            d.d_mu,       d.d_nu,       d.D,          d.D_E,       d.D_G,
                            d.G_kappa,    d.norm_B,     d.tr_abs_B,   d.tr_B_plus, d.tr_B_minus,
                            d.b_plus_min, d.b_plus_max, d.b_minus_min, d.b_minus_max,
                            d.K,          d.J,          d.C_sigma,    d.c_c,       d.s_mu,
                            d.s_nu,       d.s_mc,       d.N,          d.kB,        d.xi,
                            d.tau};
}

typlab_status typlab_bound_abs_finite_t(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_abs_finiteT(to_inputs(in));
  });
}

typlab_status typlab_bound_abs_inf_t(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_abs_infT(to_inputs(in));
  });
}

typlab_status typlab_bound_mmunu_lower_rv(const typlab_bound_inputs* in, double* out,
                                          int32_t* precondition_ok) {
  return guarded([&] {
    need(out, "out");
    const typlab::FlaggedBound res = typlab::bound_Mmunu_lower_rv(to_inputs(in));
    *out = res.value;
    if (precondition_ok != nullptr) *precondition_ok = res.precondition_ok ? 1 : 0;
  });
}

typlab_status typlab_bound_mmub_lower(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_MmuB_lower(to_inputs(in));
  });
}

typlab_status typlab_bound_relative_gnt(const typlab_bound_inputs* in, double* dimension_form,
                                        double* entropy_form, double* entropy_form_as_dim) {
  return guarded([&] {
    const typlab::RelativeGntBounds res = typlab::bound_relative_gnt(to_inputs(in));
    if (dimension_form != nullptr) *dimension_form = res.dimension_form;
    if (entropy_form != nullptr) *entropy_form = res.entropy_form;
    if (entropy_form_as_dim != nullptr) *entropy_form_as_dim = res.entropy_form_as_dim;
  });
}

typlab_status typlab_bound_dyntyp_abs(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_dyntyp_abs(to_inputs(in));
  });
}

typlab_status typlab_bound_dyntyp_l2(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_dyntyp_L2(to_inputs(in));
  });
}

typlab_status typlab_bound_comparative(const typlab_bound_inputs* in, double* pointwise_entropy,
                                       double* pointwise_dimension, double* l2_entropy,
                                       double* l2_dimension) {
  return guarded([&] {
    const typlab::ComparativeBounds res = typlab::bound_comparative(to_inputs(in));
    if (pointwise_entropy != nullptr) *pointwise_entropy = res.pointwise_entropy;
    if (pointwise_dimension != nullptr) *pointwise_dimension = res.pointwise_dimension;
    if (l2_entropy != nullptr) *l2_entropy = res.L2_entropy;
    if (l2_dimension != nullptr) *l2_dimension = res.L2_dimension;
  });
}

typlab_status typlab_bound_lb_b_psi(const typlab_bound_inputs* in, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = typlab::bound_LB_B_psi(to_inputs(in));
  });
}

typlab_status typlab_bound_prop54(const typlab_bound_inputs* in, double* b, int32_t* applicable,
                                  double* value) {
  return guarded([&] {
    const typlab::Prop54Bound res = typlab::bound_prop54(to_inputs(in));
    if (b != nullptr) *b = res.b;
    if (applicable != nullptr) *applicable = res.applicable ? 1 : 0;
    if (value != nullptr) *value = res.value;
  });
}

typlab_status typlab_bound_aek(const typlab_bound_inputs* in, double* lb1, double* lb2) {
  return guarded([&] {
    const typlab::AekBounds res = typlab::bound_aek(to_inputs(in));
    if (lb1 != nullptr) *lb1 = res.lb1;
    if (lb2 != nullptr) *lb2 = res.lb2;
  });
}

typlab_status typlab_bound_eth(const typlab_bound_inputs* in, double trace_B, double hs_traceless,
                               double* mmub, double* mmunu, double* relative_entropy,
                               double* relative_dimension) {
  return guarded([&] {
    const typlab::EthBounds res = typlab::bound_eth(to_inputs(in), trace_B, hs_traceless);
    if (mmub != nullptr) *mmub = res.MmuB;
    if (mmunu != nullptr) *mmunu = res.Mmunu;
    if (relative_entropy != nullptr) *relative_entropy = res.relative_entropy;
    if (relative_dimension != nullptr) *relative_dimension = res.relative_dimension;
  });
}

/* ------------------------------------------------------------------ */

typlab_status typlab_run(const char* command, const char* config_json, const char* out_dir,
                         const uint64_t* seed_override, int32_t threads) {
  return guarded([&] {
    need(command, "command");
    need(config_json, "config_json");
    typlab::runner::RunOverrides ov;
    if (out_dir != nullptr) ov.out_dir = std::string(out_dir);
    if (seed_override != nullptr) ov.seed = *seed_override;
    ov.threads = threads;
    typlab::runner::run_command(command, config_json, ov);
  });
}

} /* extern "C" */
