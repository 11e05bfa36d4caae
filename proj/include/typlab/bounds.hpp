#pragma once

// Pure evaluators for every closed-form theoretical bound the laboratory
// compares against. Each function is a deterministic function of its inputs;
// nothing here touches matrices or randomness. Several bounds exist in an
// entropy-exponential form and an equivalent dimension form (related by
// d = exp(sN/kB)); both are returned so reports can show the agreement.
//
// Conventions baked in (recorded in every report):
//   - the eigenspace-count parameter d_E inside the finite-horizon absolute
//     bound is set to D;
//   - log₂ appears in the finite-horizon bound, natural log in the
//     dynamical-typicality tail branch — exactly as the formulas are stated;
//   - bounds are evaluated even when an applicability precondition fails; a flag
//     reports the violation (desk-scale dimensions rarely satisfy the
//     asymptotic preconditions, and the comparison is still informative).

#include <cmath>

namespace typlab {

// Everything any bound evaluator consumes, in one record. Dimensions are kept
// real-valued so entropy round-trips d = exp(sN/kB) are exact.
struct BoundInputs {
  // tolerances / horizon
  double eps = 0.1;        // ε: deviation scale
  double delta = 0.1;      // δ: exceptional-time fraction
  double eps_prime = 0.25; // ε′ ∈ (0, 1/2): exceptional-probability budget
  double kappa = 0.0;      // κ: gap-window length
  double T = 0.0;          // time horizon
  // dimensions
  double d_mu = 0.0;
  double d_nu = 0.0;
  double D = 0.0;
  // spectrum diagnostics
  double D_E = 1.0;
  double D_G = 1.0;
  double G_kappa = 1.0;
  // observable data
  double norm_B = 0.0;      // ‖B‖ (operator norm)
  double tr_abs_B = 0.0;    // tr|B|
  double tr_B_plus = 0.0;   // tr B⁺  (positive part)
  double tr_B_minus = 0.0;  // tr B⁻  (negative part, ≥ 0)
  double b_plus_min = 0.0;  // smallest eigenvalue of B⁺ (0 if B⁺ ≠ full rank)
  double b_plus_max = 0.0;  // largest eigenvalue of B⁺
  double b_minus_min = 0.0; // smallest eigenvalue of B⁻
  double b_minus_max = 0.0; // largest eigenvalue of B⁻
  // ensemble constants
  double K = 1.0;
  double J = 1.0;
  double C_sigma = 1.0;
  double c_c = 1.0;
  // entropy data
  double s_mu = 0.0;
  double s_nu = 0.0;
  double s_mc = 0.0;
  double N = 1.0;
  double kB = 1.0;
  // delocalization exponents
  double xi = 0.0;
  double tau = 0.0;
};

// Finite-horizon absolute-error bound:
//   4·( D_E·G(κ)·‖B‖/(δεd_μ) · (1 + 8·log₂(D)/(κT)) · min{‖B‖, tr|B|/d_μ} )^{1/2}.
double bound_abs_finiteT(const BoundInputs& in);

// Infinite-horizon absolute-error bound for B = P_ν:
//   4·( D_E·D_G/(δεd_μ) · min{1, d_ν/d_μ} )^{1/2}.
double bound_abs_infT(const BoundInputs& in);

// Entropy form of the infinite-horizon bound (for s_ν ≥ s_μ it reads
// 4·sqrt(D_E·D_G/(εδ))·exp(−s_μN/(2kB)); in general min{1, d_ν/d_μ} becomes
// exp(−(N/kB)·max{0, s_μ − s_ν})).
double bound_abs_infT_entropy(const BoundInputs& in);

// Value plus a precondition flag for bounds with stated dimension thresholds.
struct FlaggedBound {
  double value = 0.0;
  bool precondition_ok = true;
};

// Random-ensemble lower bound on M_μν:
//   ( sqrt(ε′·C_σ)·max{d_μ,d_ν}/D )^{16} · min{1, d_ν/d_μ},
// valid (up to probability budget) when d_μ, d_ν > max{166, 4·|log₂(ε′/√2)|};
// the flag reports whether that precondition holds.
FlaggedBound bound_Mmunu_lower_rv(const BoundInputs& in);

// Lower bound on M_μB from no-gaps delocalization:
//   max{ b⁺_min, (d_μ/(4c_c√(KJ)·D))^{16}·tr B⁺/d_μ } − min{ b⁻_max, tr B⁻/d_μ }.
// May be ≤ 0; callers check positivity before dividing by it.
double bound_MmuB_lower(const BoundInputs& in);

// Relative-error bound, three renderings:
//   dimension form:  4/sqrt(εδ·min{d_μ,d_ν}) · (4c_c√(KJ)·D/max{d_μ,d_ν})^{16}
//   entropy form:    4/sqrt(εδ) · (C_σ ε′)^{−8} ·
//                      exp(−(N/2kB)(min{s_μ,s_ν} − 32(s_mc − max{s_μ,s_ν})))
//   entropy form with d = exp(sN/kB) substituted back (pure algebra):
//                    4/sqrt(εδ) · (C_σ ε′)^{−8} · (1/sqrt(min d)) · (D/max d)^{16}
// The last two agree identically; the first matches them exactly when the
// constants satisfy 4c_c√(KJ) = (ε′C_σ)^{−1/2}.
struct RelativeGntBounds {
  double dimension_form = 0.0;      // with the (K, J, c_c) constants
  double entropy_form = 0.0;        // with (C_σ, ε′) and entropies
  double entropy_form_as_dim = 0.0; // entropy form rewritten in dimensions
};
RelativeGntBounds bound_relative_gnt(const BoundInputs& in);

// Dynamical typicality, absolute deviation from the ensemble curve:
//   min{ ‖B‖/sqrt(εd_μ), sqrt(‖B‖·tr|B|/(εd_μ²)), sqrt(18π³·ln(4/ε)/d_μ)·‖B‖ }.
double bound_dyntyp_abs(const BoundInputs& in);

// Mean-square version: ‖B‖²/(ε·d_μ).
double bound_dyntyp_L2(const BoundInputs& in);

// Comparative-error bounds (deviation from the ensemble curve divided by the
// time average M_ψ0ν), pointwise and mean-square, each in entropy and
// dimension form:
//   pointwise (entropy): (1/√ε)(C_σε′)^{−8}·exp(−(N/2kB)(2s_μ − min{s_μ,s_ν} − 32(s_mc − s_ν)))
//   pointwise (dim):     (1/√ε)(C_σε′)^{−8}·sqrt(min{d_μ,d_ν})/d_μ·(D/d_ν)^{16}
//   L2 (entropy):        (1/ε)(C_σε′)^{−16}·exp(−(N/kB)(s_μ − 32(s_mc − s_ν)))
//   L2 (dim):            (1/ε)(C_σε′)^{−16}·(1/d_μ)·(D/d_ν)^{32}
struct ComparativeBounds {
  double pointwise_entropy = 0.0;
  double pointwise_dimension = 0.0;
  double L2_entropy = 0.0;
  double L2_dimension = 0.0;
};
ComparativeBounds bound_comparative(const BoundInputs& in);

// Guaranteed floor for weights along typical trajectories:
//   bound_MmuB_lower − √2·( ‖B‖/(εd_μ)·min{‖B‖, tr|B|/d_μ} )^{1/2}.
// Never exceeds bound_MmuB_lower.
double bound_LB_B_psi(const BoundInputs& in);

// Strict-sign observable gap b = max{b⁺_min − b⁻_max, b⁻_min − b⁺_max} and
// the relative dynamical-typicality bound bound_dyntyp_abs/b it enables.
// Inapplicable when b ≤ 0 (projectors onto proper subspaces give b = 0).
struct Prop54Bound {
  double b = 0.0;
  bool applicable = false;
  double value = 0.0; // bound_dyntyp_abs(in)/b when applicable
};
Prop54Bound bound_prop54(const BoundInputs& in);

// Lower bounds on M_μν from complete eigenvector delocalization at
// exponent τ:
//   lb1 = (d_ν/d_μ)·(1 − (D−d_μ)/D^{1−2τ}),   lb2 = 1 − (D−d_ν)/D^{1−2τ}.
// Either may be negative (useless regime); both reported.
struct AekBounds {
  double lb1 = 0.0;
  double lb2 = 0.0;
};
AekBounds bound_aek(const BoundInputs& in);

// Bounds under the eigenbasis matrix-element hypothesis at exponent ξ:
//   MmuB:  |tr B|/D − (D^ξ/D)·(tr|B̊|²)^{1/2}      (B̊ = traceless part)
//   Mmunu: (d_ν/D)·(1 − D^ξ/√d_ν)
//   relative-error bound (entropy form):
//          (8/sqrt(εδ))·exp(−(N/kB)(max{s_μ,s_ν} − s_mc + min{s_μ,s_ν}/2))
//   same in dimension form: (8/sqrt(εδ))·D/(max d·sqrt(min d)).
// trace_B and hs_traceless = (tr|B̊|²)^{1/2} are passed explicitly since they
// are signed/derived quantities not covered by the BoundInputs fields.
struct EthBounds {
  double MmuB = 0.0;
  double Mmunu = 0.0;
  double relative_entropy = 0.0;
  double relative_dimension = 0.0;
};
EthBounds bound_eth(const BoundInputs& in, double trace_B, double hs_traceless);

// Entropy per particle from a real-valued dimension: s = kB·ln(d)/N.
// (Bound algebra needs the real-valued version; integer dimensions live in
// the hilbert module.)
inline double entropy_of_dim(double d, double N, double kB) { return kB * std::log(d) / N; }

} // namespace typlab
