#include "typlab/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "typlab/spectral.hpp"

namespace typlab {

using nlohmann::json;

// ---------------------------------------------------------------- profiles

VarianceProfile VarianceProfile::constant(int D, double sigma2) {
  require(D >= 0, errc::invalid_argument, "profile dimension must be >= 0");
  require(sigma2 >= 0.0, errc::invalid_argument, "variance must be >= 0");
  VarianceProfile p;
  p.kind_ = ProfileKind::constant;
  p.D_ = D;
  p.scalar_sigma2_ = sigma2;
  return p;
}

VarianceProfile VarianceProfile::exponential_band(int D, double s) {
  require(D >= 1, errc::invalid_argument, "profile dimension must be >= 1");
  require(s >= 0.0, errc::invalid_argument, "band decay rate must be >= 0");
  VarianceProfile p;
  p.kind_ = ProfileKind::exponential_band;
  p.D_ = D;
  p.s_ = s;
  return p;
}

VarianceProfile VarianceProfile::custom_table(Eigen::MatrixXd sigma2) {
  require(sigma2.rows() == sigma2.cols(), errc::dimension_mismatch,
          "variance table must be square");
  for (Eigen::Index i = 0; i < sigma2.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      require(sigma2(i, j) >= 0.0, errc::invalid_argument, "variances must be >= 0");
      require(sigma2(i, j) == sigma2(j, i), errc::invalid_argument,
              "variance table must be exactly symmetric");
    }
  VarianceProfile p;
  p.kind_ = ProfileKind::custom_table;
  p.D_ = static_cast<int>(sigma2.rows());
  p.table_ = std::move(sigma2);
  return p;
}

double VarianceProfile::sigma2(int i, int j) const {
  require(i >= 0 && i < D_ && j >= 0 && j < D_, errc::invalid_argument,
          "profile index out of range");
  switch (kind_) {
    case ProfileKind::constant: return scalar_sigma2_;
    case ProfileKind::exponential_band: return std::exp(-s_ * std::abs(i - j));
    case ProfileKind::custom_table: return table_(i, j);
  }
  return 0.0;
}

double VarianceProfile::sigma(int i, int j) const { return std::sqrt(sigma2(i, j)); }

double VarianceProfile::sigma_min() const {
  switch (kind_) {
    case ProfileKind::constant: return std::sqrt(scalar_sigma2_);
    case ProfileKind::exponential_band:
      // exp(−s|i−j|) is smallest at the far corner |i−j| = D−1.
      return std::exp(-s_ * (D_ - 1) / 2.0);
    case ProfileKind::custom_table:
      return std::sqrt(table_.minCoeff());
  }
  return 0.0;
}

double VarianceProfile::sigma_max() const {
  switch (kind_) {
    case ProfileKind::constant: return std::sqrt(scalar_sigma2_);
    case ProfileKind::exponential_band: return 1.0; // diagonal: exp(0)
    case ProfileKind::custom_table: return std::sqrt(table_.maxCoeff());
  }
  return 0.0;
}

Eigen::MatrixXd VarianceProfile::dense_sigma2() const {
  Eigen::MatrixXd S(D_, D_);
  for (int i = 0; i < D_; ++i)
    for (int j = 0; j < D_; ++j) S(i, j) = sigma2(i, j);
  return S;
}

std::string VarianceProfile::to_json() const {
  json j;
  switch (kind_) {
    case ProfileKind::constant:
      j = json{{"kind", "constant"}, {"sigma2", scalar_sigma2_}};
      break;
    case ProfileKind::exponential_band:
      j = json{{"kind", "exponential-band"}, {"s", s_}};
      break;
    case ProfileKind::custom_table: {
      std::vector<std::vector<double>> rows(static_cast<std::size_t>(D_));
      for (int i = 0; i < D_; ++i) {
        rows[static_cast<std::size_t>(i)].assign(table_.row(i).begin(), table_.row(i).end());
      }
      j = json{{"kind", "table"}, {"sigma2", rows}};
      break;
    }
  }
  // Keep round trips lossless: a profile that knows its dimension says so.
  // Config files omit "dim" (the decomposition supplies it via with_dim);
  // tables already carry theirs in the row count.
  if (kind_ != ProfileKind::custom_table && D_ >= 1) j["dim"] = D_;
  return j.dump();
}

VarianceProfile VarianceProfile::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(errc::config, std::string("profile JSON parse error: ") + e.what());
  }
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), errc::config,
          "profile JSON needs a string \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant") {
    const double sigma2 = j.value("sigma2", 1.0);
    // Dimension is supplied by the surrounding config; a placeholder of 0
    // here is resized by the caller. Accept an explicit "dim" for
    // stand-alone use.
    const int D = j.value("dim", 0);
    return VarianceProfile::constant(D, sigma2);
  }
  if (kind == "exponential-band") {
    require(j.contains("s") && j["s"].is_number(), errc::config,
            "exponential-band profile needs numeric \"s\"");
    const int D = j.value("dim", 1);
    return VarianceProfile::exponential_band(std::max(D, 1), j["s"].get<double>());
  }
  if (kind == "table") {
    require(j.contains("sigma2") && j["sigma2"].is_array(), errc::config,
            "table profile needs \"sigma2\" as an array of rows");
    const auto& rows = j["sigma2"];
    const int n = static_cast<int>(rows.size());
    require(n >= 1, errc::config, "variance table must be nonempty");
    Eigen::MatrixXd S(n, n);
    for (int i = 0; i < n; ++i) {
      require(rows[i].is_array() && static_cast<int>(rows[i].size()) == n, errc::config,
              "variance table must be square");
      for (int jj = 0; jj < n; ++jj) {
        require(rows[i][jj].is_number(), errc::config, "variance table entries must be numbers");
        S(i, jj) = rows[i][jj].get<double>();
      }
    }
    return VarianceProfile::custom_table(std::move(S));
  }
  fail(errc::config, "unknown profile kind: " + kind);
}

VarianceProfile VarianceProfile::with_dim(int D) const {
  require(D >= 1, errc::invalid_argument, "profile dimension must be >= 1");
  switch (kind_) {
    case ProfileKind::constant: return VarianceProfile::constant(D, scalar_sigma2_);
    case ProfileKind::exponential_band: return VarianceProfile::exponential_band(D, s_);
    case ProfileKind::custom_table:
      require(D_ == D, errc::config, "variance table dimension does not match the decomposition");
      return *this;
  }
  fail(errc::invalid_argument, "corrupt profile kind");
}

// ----------------------------------------------------------- ensemble spec

EnsembleSpec EnsembleSpec::make(VarianceProfile profile, std::optional<Eigen::MatrixXcd> H0) {
  EnsembleSpec spec;
  spec.D = profile.dim();
  spec.profile = std::move(profile);
  if (H0) {
    require(H0->rows() == H0->cols(), errc::dimension_mismatch, "H0 must be square");
    require(static_cast<int>(H0->rows()) == spec.D, errc::dimension_mismatch,
            "H0 dimension does not match the profile");
    const double scale = std::max(1.0, H0->cwiseAbs().maxCoeff());
    const double herm = (*H0 - H0->adjoint()).cwiseAbs().maxCoeff();
    require(herm <= 1e-12 * scale, errc::invalid_argument, "H0 must be Hermitian within 1e-12");
    spec.H0 = std::move(H0);
  }
  return spec;
}

Eigen::MatrixXcd sample_hamiltonian(const EnsembleSpec& spec, std::uint64_t seed) {
  const int D = spec.D;
  require(D >= 1, errc::invalid_argument, "ensemble dimension must be >= 1");
  require(spec.profile.dim() == D, errc::dimension_mismatch,
          "profile dimension does not match the ensemble dimension");

  Rng rng(seed);
  Eigen::MatrixXcd H(D, D);
  // Draw the upper triangle and mirror; this keeps h_ji = conj(h_ij) exact in
  // floating point and diagonal imaginary parts identically zero. The row-major
  // draw order is part of the determinism contract.
  for (int i = 0; i < D; ++i) {
    // Diagonal: real N(0, σ_ii²).
    const double sd_diag = spec.profile.sigma(i, i);
    H(i, i) = std::complex<double>(sd_diag * rng.normal(), 0.0);
    for (int j = i + 1; j < D; ++j) {
      // Off-diagonal: Re and Im each N(0, σ_ij²/2).
      const double sd = spec.profile.sigma(i, j) / std::sqrt(2.0);
      const std::complex<double> v(sd * rng.normal(), sd * rng.normal());
      H(i, j) = v;
      H(j, i) = std::conj(v);
    }
  }
  if (spec.H0) {
    H += *spec.H0;
    // Re-pin exact Hermiticity against rounding in the addition: mirroring the
    // upper triangle of a Hermitian sum is still the same sum.
    for (int i = 0; i < D; ++i) {
      H(i, i) = std::complex<double>(H(i, i).real(), 0.0);
      for (int j = i + 1; j < D; ++j) H(j, i) = std::conj(H(i, j));
    }
  }
  return H;
}

// ------------------------------------------------------ ensemble constants

double latala_expression(const VarianceProfile& profile, double chat) {
  // Gaussian fourth moments: E x⁴ = 3 (E x²)².
  const int D = profile.dim();
  Eigen::MatrixXd fourth(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const double v = profile.sigma2(i, j);
      fourth(i, j) = 3.0 * v * v;
    }
  return latala_expression(profile, fourth, chat);
}

double latala_expression(const VarianceProfile& profile, const Eigen::MatrixXd& fourth_moments,
                         double chat) {
  const int D = profile.dim();
  require(fourth_moments.rows() == D && fourth_moments.cols() == D, errc::dimension_mismatch,
          "fourth-moment table dimension mismatch");
  double max_row = 0.0, max_col = 0.0, sum4 = 0.0;
  for (int i = 0; i < D; ++i) {
    double row = 0.0;
    for (int j = 0; j < D; ++j) row += profile.sigma2(i, j);
    max_row = std::max(max_row, row);
  }
  for (int j = 0; j < D; ++j) {
    double col = 0.0;
    for (int i = 0; i < D; ++i) col += profile.sigma2(i, j);
    max_col = std::max(max_col, col);
  }
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      require(fourth_moments(i, j) >= 0.0, errc::invalid_argument,
              "fourth moments must be >= 0");
      sum4 += fourth_moments(i, j);
    }
  return chat * (std::sqrt(max_row) + std::sqrt(max_col) + std::pow(sum4, 0.25));
}

double compute_CH0(const Eigen::MatrixXcd& H0) {
  if (H0.size() == 0) return 0.0;
  require(H0.rows() == H0.cols(), errc::dimension_mismatch, "H0 must be square");
  const double D = static_cast<double>(H0.rows());
  const Eigen::MatrixXd re = H0.real();
  const Eigen::MatrixXd im = H0.imag();
  return std::max(operator_norm(re), operator_norm(im)) / std::sqrt(D);
}

bool boundedness_event(const Eigen::MatrixXcd& H, double J) {
  require(H.rows() == H.cols(), errc::dimension_mismatch, "H must be square");
  require(J >= 0.0, errc::invalid_argument, "J must be >= 0");
  const double D = static_cast<double>(H.rows());
  const double norm = operator_norm(H);
  // 1e−10 relative slack absorbs eigensolver rounding at the threshold.
  return norm <= J * std::sqrt(D) * (1.0 + 1e-10);
}

JEstimate estimate_J(const EnsembleSpec& spec, double eta, int n_samples, std::uint64_t seed) {
  require(eta > 0.0 && eta < 0.5, errc::invalid_argument, "eta must lie in (0, 1/2)");
  require(n_samples >= 20, errc::invalid_argument,
          "quantile estimation needs at least 20 samples");
  const double sqrtD = std::sqrt(static_cast<double>(spec.D));
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) {
    const Eigen::MatrixXcd H = sample_hamiltonian(spec, derive_seed(seed, static_cast<std::uint64_t>(k)));
    const double nre = operator_norm(Eigen::MatrixXd(H.real()));
    const double nim = operator_norm(Eigen::MatrixXd(H.imag()));
    vals.push_back(std::max(nre, nim) / sqrtD);
  }
  std::sort(vals.begin(), vals.end());
  // Order-statistic quantile: the ⌈(1−η)n⌉-th smallest value. Monotone in η.
  const auto rank = static_cast<std::size_t>(
      std::min<double>(std::ceil((1.0 - eta) * n_samples), n_samples));
  JEstimate est;
  est.quantile = vals[rank - 1];
  double k_inv = 0.0;
  const double sig_min = spec.profile.sigma_min();
  if (sig_min > 0.0) k_inv = 1.0 / density_bound_K(spec.profile);
  est.J = std::max(est.quantile, k_inv);
  return est;
}

double markov_J(const VarianceProfile& profile, double C_H0, double eta, double chat) {
  require(eta > 0.0 && eta < 1.0, errc::invalid_argument, "eta must lie in (0, 1)");
  require(C_H0 >= 0.0, errc::invalid_argument, "C_H0 must be >= 0");
  return (4.0 * chat * profile.sigma_max() + C_H0) / eta;
}

double density_bound_K(const VarianceProfile& profile) {
  const double sig_min = profile.sigma_min();
  require(sig_min > 0.0, errc::invalid_argument,
          "profile has a zero standard deviation: diagonal density is unbounded");
  return 1.0 / (std::sqrt(2.0 * M_PI) * sig_min);
}

double compute_C_sigma(const EnsembleConstants& constants, double sigma_minus, double sigma_plus,
                       double C_H0) {
  const double denom = constants.c_plus * sigma_plus + C_H0;
  require(denom > 0.0, errc::invalid_argument, "C_sigma denominator must be positive");
  return constants.c_minus * sigma_minus / denom;
}

double solve_eta(double eps_prime, double d_mu, double d_nu) {
  require(eps_prime > 0.0 && eps_prime < 0.5, errc::invalid_argument,
          "eps_prime must lie in (0, 1/2)");
  const double budget = 1.0 - std::exp2(-d_mu / 2.0) - std::exp2(-d_nu / 2.0);
  require(budget > 0.0 && 1.0 - eps_prime < budget, errc::invalid_argument,
          "probability budget too small for the requested eps_prime");
  return 1.0 - std::pow((1.0 - eps_prime) / budget, 0.25);
}

double solve_eta(double eps_prime, double d_mu) {
  require(eps_prime > 0.0 && eps_prime < 0.5, errc::invalid_argument,
          "eps_prime must lie in (0, 1/2)");
  const double budget = 1.0 - std::exp2(-d_mu / 2.0);
  require(budget > 0.0 && 1.0 - eps_prime < budget, errc::invalid_argument,
          "probability budget too small for the requested eps_prime");
  return 1.0 - std::pow((1.0 - eps_prime) / budget, 0.25);
}

} // namespace typlab
