#include <doctest/doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "typlab/common.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/spectral.hpp"

using namespace typlab;

namespace {

SpectralData random_spectral(int D, std::uint64_t seed, double band_s = 0.0) {
  const auto profile =
      band_s > 0.0 ? VarianceProfile::exponential_band(D, band_s) : VarianceProfile::constant(D, 1.0);
  return diagonalize(sample_hamiltonian(EnsembleSpec::make(profile), seed));
}

Eigen::VectorXcd random_unit_vector(int D, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd v(D);
  for (int j = 0; j < D; ++j) v(j) = std::complex<double>(normal(gen), normal(gen));
  return v / v.norm();
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("diagonalize: known 2x2 and validation") {
  Eigen::MatrixXcd H(2, 2);
  H << 1.0, std::complex<double>(0.0, -1.0), std::complex<double>(0.0, 1.0), -1.0;
  // Pauli-like: eigenvalues ±sqrt(2).
  const SpectralData sd = diagonalize(H);
  CHECK(sd.eigenvalues(0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sd.eigenvalues(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sd.residual < 1e-12);
  CHECK(sd.spectral_range() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(sd.mean_gap() == doctest::Approx(2.0 * std::sqrt(2.0)));

  Eigen::MatrixXcd notherm(2, 2);
  notherm << 1.0, 2.0, 3.0, 1.0;
  CHECK_THROWS_AS(diagonalize(notherm), Error);
  CHECK_THROWS_AS(diagonalize(Eigen::MatrixXcd::Zero(2, 3)), Error);
}

TEST_CASE("diagonalize: reconstruction and orthonormality on a random sample") {
  const auto spec = EnsembleSpec::make(VarianceProfile::constant(40, 1.0));
  const Eigen::MatrixXcd H = sample_hamiltonian(spec, 11);
  const SpectralData sd = diagonalize(H);
  const Eigen::MatrixXcd R =
      H - sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.adjoint();
  CHECK(R.cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXcd G = sd.eigenvectors.adjoint() * sd.eigenvectors;
  CHECK((G - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-12);
  for (int n = 1; n < 40; ++n) CHECK(sd.eigenvalues(n) >= sd.eigenvalues(n - 1));
}

TEST_CASE("operator_norm: largest singular value") {
  Eigen::MatrixXd A(2, 2);
  A << 3.0, 0.0, 0.0, -7.0;
  CHECK(operator_norm(A) == doctest::Approx(7.0).epsilon(1e-12));
  Eigen::MatrixXcd B(1, 2);
  B << std::complex<double>(3.0, 4.0), 0.0;
  CHECK(operator_norm(B) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("eigenvalue clusters and max degeneracy on planted spectra") {
  Eigen::VectorXd ev(6);
  ev << 0.0, 0.0, 0.0, 1.0, 2.0, 2.0;
  const auto clusters = eigenvalue_clusters(ev, 1e-9);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0] == std::pair<int, int>{0, 3});
  CHECK(clusters[1] == std::pair<int, int>{3, 4});
  CHECK(clusters[2] == std::pair<int, int>{4, 6});
  CHECK(max_degeneracy(ev, 1e-9) == 3);
  CHECK(max_degeneracy(ev, 10.0) == 6); // everything chains together
  CHECK(max_degeneracy(ev, 1e-9) == oracles::brute_max_degeneracy(ev, 1e-9));
}

TEST_CASE("gap_count matches brute force on 100 random spectra up to D=30") {
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  std::uniform_int_distribution<int> dims(2, 30);
  for (int trial = 0; trial < 100; ++trial) {
    const int D = dims(gen);
    Eigen::VectorXd ev(D);
    for (int i = 0; i < D; ++i) ev(i) = unif(gen);
    std::sort(ev.data(), ev.data() + D);
    // Occasionally plant an exact degeneracy.
    if (trial % 7 == 0 && D >= 3) ev(2) = ev(1);
    const double tol = 1e-12;
    for (double kappa : {0.05, 0.5, 1.7, 12.0}) {
      CHECK(gap_count(ev, kappa, tol) == oracles::brute_gap_count(ev, kappa, tol));
    }
  }
}

TEST_CASE("gap_count hand case and monotonicity in kappa") {
  Eigen::VectorXd ev(3);
  ev << 0.0, 1.0, 3.0;
  // Signed differences: ±1, ±2, ±3.
  CHECK(gap_count(ev, 0.5, 1e-12) == 1);
  CHECK(gap_count(ev, 1.5, 1e-12) == 2);  // window [1, 2.5) holds {1, 2}
  CHECK(gap_count(ev, 2.5, 1e-12) == 3);  // window [1, 3.5) holds {1, 2, 3}
  CHECK(gap_count(ev, 100.0, 1e-12) == 6);
  long prev = 0;
  for (double kappa = 0.1; kappa < 8.0; kappa += 0.3) {
    const long g = gap_count(ev, kappa, 1e-12);
    CHECK(g >= prev);
    prev = g;
  }
}

TEST_CASE("max_gap_degeneracy: arithmetic progressions have massive gap degeneracy") {
  Eigen::VectorXd ap(5);
  ap << 0.0, 1.0, 2.0, 3.0, 4.0;
  // Difference 1 appears 4 times.
  CHECK(max_gap_degeneracy(ap, 1e-12) == 4);
  Eigen::VectorXd generic(4);
  generic << 0.0, 1.0, 2.718281828, 5.1234567;
  CHECK(max_gap_degeneracy(generic, 1e-12) == 1);
  Eigen::VectorXd single(1);
  single << 2.0;
  CHECK(max_gap_degeneracy(single, 1e-12) == 1);
}

TEST_CASE("resonance_check matches brute force on random and planted spectra") {
  std::mt19937_64 gen(777);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int D = 3 + static_cast<int>(gen() % 10);
    Eigen::VectorXd ev(D);
    for (int i = 0; i < D; ++i) ev(i) = unif(gen);
    std::sort(ev.data(), ev.data() + D);
    switch (trial % 4) {
      case 1: // plant a degeneracy
        ev(1) = ev(0);
        std::sort(ev.data(), ev.data() + D);
        break;
      case 2: // plant an arithmetic progression (λ2−λ1 = λ1−λ0)
        ev(2) = 2.0 * ev(1) - ev(0);
        std::sort(ev.data(), ev.data() + D);
        break;
      default: break;
    }
    const double tol = 1e-10;
    const ResonanceResult res = resonance_check(ev, tol);
    CHECK(res.resonance_free == oracles::brute_resonance_free(ev, tol));
    if (!res.resonance_free) {
      REQUIRE(res.witness.has_value());
      const auto& w = *res.witness;
      // The witness indices really do exhibit the near-equality.
      CHECK(std::abs((ev(w.i) - ev(w.j)) - (ev(w.k) - ev(w.l))) <= 2.0 * tol);
      CHECK_FALSE((w.i == w.k && w.j == w.l));
    }
  }
}

TEST_CASE("spectrum_diagnostics bundles the scalars consistently") {
  const SpectralData sd = random_spectral(30, 21);
  const double tol = default_spectral_tol(sd.eigenvalues);
  const SpectrumDiagnostics diag = spectrum_diagnostics(sd.eigenvalues, tol);
  CHECK(diag.D_E == max_degeneracy(sd.eigenvalues, tol));
  CHECK(diag.D_G == max_gap_degeneracy(sd.eigenvalues, tol));
  CHECK(diag.resonance_free == resonance_check(sd.eigenvalues, tol).resonance_free);
  CHECK(diag.min_gap > 0.0);
}

TEST_CASE("sup_norm: basis vector 1, flat vector D^{-1/2}") {
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(16);
  e(3) = 1.0;
  CHECK(sup_norm(e) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::VectorXcd flat = Eigen::VectorXcd::Constant(16, std::complex<double>(0.25, 0.0));
  CHECK(sup_norm(flat) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("min_subset_mass matches exhaustive enumeration at D=8, all kappa") {
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::VectorXcd phi = random_unit_vector(8, 3000 + static_cast<std::uint64_t>(rep));
    for (int num = 1; num <= 8; ++num) {
      const double kappa = num / 8.0;
      const double fast = min_subset_mass(phi, kappa);
      const double slow = oracles::exhaustive_min_subset_mass(phi, kappa);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
    }
  }
  // κ = 1 must return everything (mass 1 for a unit vector).
  const Eigen::VectorXcd phi = random_unit_vector(8, 1);
  CHECK(min_subset_mass(phi, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(min_subset_mass(phi, 0.0), Error);
  CHECK_THROWS_AS(min_subset_mass(phi, 1.5), Error);
}

TEST_CASE("min_subset_mass on the flat vector equals k/D") {
  const int D = 10;
  Eigen::VectorXcd flat = Eigen::VectorXcd::Constant(D, std::complex<double>(1.0 / std::sqrt(D), 0.0));
  CHECK(min_subset_mass(flat, 0.3) == doctest::Approx(3.0 / D).epsilon(1e-12));
  // ⌈0.25·10⌉ = 3 — ceiling, not rounding.
  CHECK(min_subset_mass(flat, 0.25) == doctest::Approx(3.0 / D).epsilon(1e-12));
}

TEST_CASE("detect_gap_event: localized eigenvector triggers, delocalized does not") {
  // Diagonal Hamiltonian: eigenvectors are basis vectors — maximally localized.
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(8, 8);
  for (int i = 0; i < 8; ++i) H(i, i) = static_cast<double>(i);
  const SpectralData sd = diagonalize(H);
  const GapEventResult ev = detect_gap_event(sd, 0.5, 1e-4);
  CHECK(ev.event); // half the entries of a basis vector carry zero mass
  CHECK(ev.worst_mass == doctest::Approx(0.0));
  CHECK(ev.worst_index >= 0);

  // Wigner eigenvectors are flat: no gap events at small delta.
  const SpectralData wd = random_spectral(60, 5);
  const GapEventResult ok = detect_gap_event(wd, 0.25, 1e-8);
  CHECK_FALSE(ok.event);
  CHECK(ok.worst_mass > 1e-16);
  CHECK_THROWS_AS(detect_gap_event(wd, 0.0, 0.1), Error);
  CHECK_THROWS_AS(detect_gap_event(wd, 0.5, 0.0), Error);
}

TEST_CASE("eth_statistic: diagonal H with a rank-1 block projector gives 0.75") {
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) H(i, i) = static_cast<double>(i);
  const SpectralData sd = diagonalize(H);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(4, 4);
  B(0, 0) = 1.0; // projector onto the first basis vector, d_ν = 1
  const EthStatistic s = eth_statistic(sd, B);
  CHECK(s.stat == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.trace_B == doctest::Approx(1.0));
  // hs² = (1 − 1/4)² + 3·(1/4)² = 0.75
  CHECK(s.hs_norm_traceless == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
  // threshold(ξ) = D^ξ/D · hs
  CHECK(s.threshold(0.5) == doctest::Approx(2.0 / 4.0 * std::sqrt(0.75)).epsilon(1e-12));
}

TEST_CASE("eth_statistic: multiples of the identity give zero") {
  const SpectralData sd = random_spectral(12, 9);
  const Eigen::MatrixXcd B = 3.7 * Eigen::MatrixXcd::Identity(12, 12);
  const EthStatistic s = eth_statistic(sd, B);
  CHECK(s.stat < 1e-12);
  CHECK(s.hs_norm_traceless < 1e-12);
}

TEST_CASE("eth_statistic is invariant under B -> B + cI") {
  const SpectralData sd = random_spectral(10, 31);
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(10, 10);
  for (int i = 0; i < 5; ++i) B(i, i) = 1.0;
  const EthStatistic a = eth_statistic(sd, B);
  const EthStatistic b = eth_statistic(sd, B + 2.5 * Eigen::MatrixXcd::Identity(10, 10));
  CHECK(a.stat == doctest::Approx(b.stat).epsilon(1e-10));
  CHECK(a.hs_norm_traceless == doctest::Approx(b.hs_norm_traceless).epsilon(1e-10));
}

TEST_CASE("solve_dyson: flat profile reproduces the semicircle at several z") {
  const int D = 50;
  const Eigen::MatrixXd S = Eigen::MatrixXd::Constant(D, D, 1.0 / D);
  for (const std::complex<double> z :
       {std::complex<double>(0.0, 1.0), std::complex<double>(1.3, 0.2),
        std::complex<double>(-2.5, 0.7), std::complex<double>(3.1, 0.05)}) {
    const DysonSolution sol = solve_dyson(S, z);
    const std::complex<double> ref = oracles::semicircle_m(z);
    for (int i = 0; i < D; ++i) {
      CHECK(std::abs(sol.m(i) - ref) < 1e-8);
      CHECK(sol.m(i).imag() > 0.0); // Stieltjes transform of a measure
    }
    CHECK(sol.residual <= 1e-10);
  }
}

TEST_CASE("solve_dyson: zero coupling gives m = -1/z exactly") {
  const Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
  const std::complex<double> z(0.7, 0.9);
  const DysonSolution sol = solve_dyson(S, z);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(sol.m(i) + 1.0 / z) < 1e-12);
}

TEST_CASE("solve_dyson: input validation") {
  const Eigen::MatrixXd S = Eigen::MatrixXd::Constant(3, 3, 0.5);
  CHECK_THROWS_AS(solve_dyson(S, std::complex<double>(1.0, 0.0)), Error);  // Im z = 0
  CHECK_THROWS_AS(solve_dyson(S, std::complex<double>(1.0, -1.0)), Error); // lower half-plane
  Eigen::MatrixXd neg = S;
  neg(0, 1) = -0.1;
  CHECK_THROWS_AS(solve_dyson(neg, std::complex<double>(0.0, 1.0)), Error);
  DysonOptions opts;
  opts.max_iter = 1; // cannot converge
  CHECK_THROWS_AS(solve_dyson(S, std::complex<double>(0.0, 0.001), opts), Error);
}

TEST_CASE("uniform primitivity check") {
  const int D = 6;
  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(D, D, 1.0 / D);
  CHECK(uniform_primitivity_check(flat, 1, 1.0));      // entries exactly 1/D
  CHECK_FALSE(uniform_primitivity_check(flat, 1, 2.0)); // too demanding
  // Nearest-neighbor chain: needs several steps to connect everything.
  Eigen::MatrixXd chain = Eigen::MatrixXd::Zero(D, D);
  for (int i = 0; i < D; ++i) {
    chain(i, i) = 1.0;
    if (i + 1 < D) chain(i, i + 1) = chain(i + 1, i) = 1.0;
  }
  CHECK_FALSE(uniform_primitivity_check(chain, 1, 1e-6));
  CHECK(uniform_primitivity_check(chain, D, 1e-6));
}

TEST_CASE("default_spectral_tol is 1e-10 of the range") {
  Eigen::VectorXd ev(3);
  ev << -2.0, 0.0, 8.0;
  CHECK(default_spectral_tol(ev) == doctest::Approx(1e-9).epsilon(1e-12));
  Eigen::VectorXd one(1);
  one << 5.0;
  CHECK(default_spectral_tol(one) == 0.0);
}

} // TEST_SUITE
