#include "typlab/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "typlab/common.hpp"

namespace typlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_tolerances(const BoundInputs& in, bool need_delta = true) {
  require(in.eps > 0.0, errc::invalid_argument, "eps must be positive");
  if (need_delta) require(in.delta > 0.0, errc::invalid_argument, "delta must be positive");
}

void check_dims(const BoundInputs& in, bool need_nu = false, bool need_D = false) {
  require(in.d_mu > 0.0, errc::invalid_argument, "d_mu must be positive");
  if (need_nu) require(in.d_nu > 0.0, errc::invalid_argument, "d_nu must be positive");
  if (need_D) require(in.D > 0.0, errc::invalid_argument, "D must be positive");
}

void check_entropy(const BoundInputs& in) {
  require(in.N >= 1.0, errc::invalid_argument, "N must be >= 1");
  require(in.kB > 0.0, errc::invalid_argument, "kB must be positive");
}

// The delocalization coupling 4·c_c·sqrt(K·J) that converts macro dimensions
// into no-gaps mass estimates.
double coupling(const BoundInputs& in) {
  require(in.K > 0.0 && in.J > 0.0, errc::invalid_argument, "K and J must be positive");
  require(in.c_c > 0.0, errc::invalid_argument, "c_c must be positive");
  return 4.0 * in.c_c * std::sqrt(in.K * in.J);
}

} // namespace

double bound_abs_finiteT(const BoundInputs& in) {
  check_tolerances(in);
  check_dims(in, false, true);
  require(in.kappa > 0.0, errc::invalid_argument, "kappa must be positive");
  require(in.T > 0.0, errc::invalid_argument, "T must be positive");
  require(in.norm_B >= 0.0 && in.tr_abs_B >= 0.0, errc::invalid_argument,
          "observable norms must be >= 0");
  const double horizon = 1.0 + 8.0 * std::log2(in.D) / (in.kappa * in.T);
  const double small = std::min(in.norm_B, in.tr_abs_B / in.d_mu);
  const double inner =
      in.D_E * in.G_kappa * in.norm_B / (in.delta * in.eps * in.d_mu) * horizon * small;
  return 4.0 * std::sqrt(inner);
}

double bound_abs_infT(const BoundInputs& in) {
  check_tolerances(in);
  check_dims(in, true);
  const double inner =
      in.D_E * in.D_G / (in.delta * in.eps * in.d_mu) * std::min(1.0, in.d_nu / in.d_mu);
  return 4.0 * std::sqrt(inner);
}

double bound_abs_infT_entropy(const BoundInputs& in) {
  check_tolerances(in);
  check_entropy(in);
  // 1/d_μ = e^{−s_μN/kB} and min{1, d_ν/d_μ} = e^{−(N/kB)max{0, s_μ−s_ν}}.
  const double exponent = in.s_mu + std::max(0.0, in.s_mu - in.s_nu);
  return 4.0 * std::sqrt(in.D_E * in.D_G / (in.eps * in.delta)) *
         std::exp(-exponent * in.N / (2.0 * in.kB));
}

FlaggedBound bound_Mmunu_lower_rv(const BoundInputs& in) {
  check_dims(in, true, true);
  require(in.eps_prime > 0.0 && in.eps_prime < 0.5, errc::invalid_argument,
          "eps_prime must lie in (0, 1/2)");
  require(in.C_sigma > 0.0, errc::invalid_argument, "C_sigma must be positive");
  FlaggedBound out;
  const double dmax = std::max(in.d_mu, in.d_nu);
  out.value = std::pow(std::sqrt(in.eps_prime * in.C_sigma) * dmax / in.D, 16.0) *
              std::min(1.0, in.d_nu / in.d_mu);
  const double floor = std::max(166.0, 4.0 * std::abs(std::log2(in.eps_prime / std::sqrt(2.0))));
  out.precondition_ok = (in.d_mu > floor) && (in.d_nu > floor);
  return out;
}

double bound_MmuB_lower(const BoundInputs& in) {
  check_dims(in, false, true);
  require(in.tr_B_plus >= 0.0 && in.tr_B_minus >= 0.0, errc::invalid_argument,
          "traces of the positive/negative parts must be >= 0");
  const double mass = std::pow(in.d_mu / (coupling(in) * in.D), 16.0);
  const double gain = std::max(in.b_plus_min, mass * in.tr_B_plus / in.d_mu);
  const double loss = std::min(in.b_minus_max, in.tr_B_minus / in.d_mu);
  return gain - loss;
}

RelativeGntBounds bound_relative_gnt(const BoundInputs& in) {
  check_tolerances(in);
  check_dims(in, true, true);
  check_entropy(in);
  require(in.eps_prime > 0.0 && in.C_sigma > 0.0, errc::invalid_argument,
          "eps_prime and C_sigma must be positive");
  const double dmin = std::min(in.d_mu, in.d_nu);
  const double dmax = std::max(in.d_mu, in.d_nu);
  RelativeGntBounds out;
  out.dimension_form = 4.0 / std::sqrt(in.eps * in.delta * dmin) *
                       std::pow(coupling(in) * in.D / dmax, 16.0);
  const double smin = std::min(in.s_mu, in.s_nu);
  const double smax = std::max(in.s_mu, in.s_nu);
  const double cpref = 4.0 / std::sqrt(in.eps * in.delta) * std::pow(in.C_sigma * in.eps_prime, -8.0);
  out.entropy_form =
      cpref * std::exp(-(in.N / (2.0 * in.kB)) * (smin - 32.0 * (in.s_mc - smax)));
  out.entropy_form_as_dim = cpref / std::sqrt(dmin) * std::pow(in.D / dmax, 16.0);
  return out;
}

double bound_dyntyp_abs(const BoundInputs& in) {
  check_tolerances(in, false);
  check_dims(in);
  require(in.norm_B >= 0.0 && in.tr_abs_B >= 0.0, errc::invalid_argument,
          "observable norms must be >= 0");
  const double a = in.norm_B / std::sqrt(in.eps * in.d_mu);
  const double b = std::sqrt(in.norm_B * in.tr_abs_B / (in.eps * in.d_mu * in.d_mu));
  const double c =
      std::sqrt(18.0 * kPi * kPi * kPi * std::log(4.0 / in.eps) / in.d_mu) * in.norm_B;
  return std::min({a, b, c});
}

double bound_dyntyp_L2(const BoundInputs& in) {
  check_tolerances(in, false);
  check_dims(in);
  return in.norm_B * in.norm_B / (in.eps * in.d_mu);
}

ComparativeBounds bound_comparative(const BoundInputs& in) {
  check_tolerances(in, false);
  check_dims(in, true, true);
  check_entropy(in);
  require(in.eps_prime > 0.0 && in.C_sigma > 0.0, errc::invalid_argument,
          "eps_prime and C_sigma must be positive");
  ComparativeBounds out;
  const double smin = std::min(in.s_mu, in.s_nu);
  const double dmin = std::min(in.d_mu, in.d_nu);
  const double p8 = std::pow(in.C_sigma * in.eps_prime, -8.0);
  const double p16 = p8 * p8;
  out.pointwise_entropy =
      (1.0 / std::sqrt(in.eps)) * p8 *
      std::exp(-(in.N / (2.0 * in.kB)) * (2.0 * in.s_mu - smin - 32.0 * (in.s_mc - in.s_nu)));
  out.pointwise_dimension =
      (1.0 / std::sqrt(in.eps)) * p8 * std::sqrt(dmin) / in.d_mu * std::pow(in.D / in.d_nu, 16.0);
  out.L2_entropy = (1.0 / in.eps) * p16 *
                   std::exp(-(in.N / in.kB) * (in.s_mu - 32.0 * (in.s_mc - in.s_nu)));
  out.L2_dimension = (1.0 / in.eps) * p16 / in.d_mu * std::pow(in.D / in.d_nu, 32.0);
  return out;
}

double bound_LB_B_psi(const BoundInputs& in) {
  const double floor = bound_MmuB_lower(in);
  check_tolerances(in, false);
  const double spread =
      std::sqrt(2.0) *
      std::sqrt(in.norm_B / (in.eps * in.d_mu) * std::min(in.norm_B, in.tr_abs_B / in.d_mu));
  return floor - spread;
}

Prop54Bound bound_prop54(const BoundInputs& in) {
  Prop54Bound out;
  out.b = std::max(in.b_plus_min - in.b_minus_max, in.b_minus_min - in.b_plus_max);
  out.applicable = out.b > 0.0;
  if (out.applicable) out.value = bound_dyntyp_abs(in) / out.b;
  return out;
}

AekBounds bound_aek(const BoundInputs& in) {
  check_dims(in, true, true);
  require(in.tau >= 0.0 && in.tau < 0.5, errc::invalid_argument, "tau must lie in [0, 1/2)");
  AekBounds out;
  const double spread = std::pow(in.D, 1.0 - 2.0 * in.tau);
  out.lb1 = (in.d_nu / in.d_mu) * (1.0 - (in.D - in.d_mu) / spread);
  out.lb2 = 1.0 - (in.D - in.d_nu) / spread;
  return out;
}

EthBounds bound_eth(const BoundInputs& in, double trace_B, double hs_traceless) {
  check_dims(in, true, true);
  check_entropy(in);
  check_tolerances(in);
  require(hs_traceless >= 0.0, errc::invalid_argument, "hs_traceless must be >= 0");
  EthBounds out;
  const double dxi = std::pow(in.D, in.xi);
  out.MmuB = std::abs(trace_B) / in.D - dxi / in.D * hs_traceless;
  out.Mmunu = in.d_nu / in.D * (1.0 - dxi / std::sqrt(in.d_nu));
  const double pref = 8.0 / std::sqrt(in.eps * in.delta);
  const double smin = std::min(in.s_mu, in.s_nu);
  const double smax = std::max(in.s_mu, in.s_nu);
  out.relative_entropy =
      pref * std::exp(-(in.N / in.kB) * (smax - in.s_mc + 0.5 * smin));
  const double dmin = std::min(in.d_mu, in.d_nu);
  const double dmax = std::max(in.d_mu, in.d_nu);
  out.relative_dimension = pref * in.D / (dmax * std::sqrt(dmin));
  return out;
}

} // namespace typlab
