#include <doctest/doctest.h>

#include <cmath>

#include "typlab/common.hpp"
#include "typlab/hilbert.hpp"

using namespace typlab;

TEST_SUITE("hilbert") {

TEST_CASE("decomposition bookkeeping") {
  MacroDecomposition d({2, 5, 3});
  CHECK(d.macro_count() == 3);
  CHECK(d.total_dim() == 10);
  CHECK(d.dim(0) == 2);
  CHECK(d.dim(1) == 5);
  CHECK(d.dim(2) == 3);
  CHECK(d.offset(0) == 0);
  CHECK(d.offset(1) == 2);
  CHECK(d.offset(2) == 7);
  CHECK(d.block_of(0) == 0);
  CHECK(d.block_of(1) == 0);
  CHECK(d.block_of(2) == 1);
  CHECK(d.block_of(6) == 1);
  CHECK(d.block_of(7) == 2);
  CHECK(d.block_of(9) == 2);
  CHECK(d.dims() == std::vector<int>{2, 5, 3});
}

TEST_CASE("decomposition rejects bad input") {
  CHECK_THROWS_AS(MacroDecomposition({}), Error);
  CHECK_THROWS_AS(MacroDecomposition({3, 0, 2}), Error);
  CHECK_THROWS_AS(MacroDecomposition({-1}), Error);
  MacroDecomposition d({2, 3});
  CHECK_THROWS_AS(d.dim(-1), Error);
  CHECK_THROWS_AS(d.dim(2), Error);
  CHECK_THROWS_AS(d.offset(5), Error);
  CHECK_THROWS_AS(d.block_of(5), Error);
  CHECK_THROWS_AS(d.block_of(-1), Error);
}

TEST_CASE("sampled states are unit vectors supported on their block") {
  MacroDecomposition d({3, 4, 2});
  for (std::uint64_t seed : {1ULL, 17ULL, 991ULL}) {
    for (int mu = 0; mu < 3; ++mu) {
      const State psi = sample_unit_state(d, mu, seed);
      CHECK(psi.size() == 9);
      CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
      for (int j = 0; j < 9; ++j) {
        if (d.block_of(j) != mu) CHECK(psi(j) == std::complex<double>(0.0, 0.0));
      }
      CHECK(project_weight(psi, d, mu) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("sampling is deterministic in the seed, distinct across seeds") {
  MacroDecomposition d({5, 5});
  const State a = sample_unit_state(d, 0, 123);
  const State b = sample_unit_state(d, 0, 123);
  const State c = sample_unit_state(d, 0, 124);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 1e-3);
}

// Exact sphere moment: E|ψ(j)|² = 1/d_μ for every fixed j in the block.
TEST_CASE("sphere moment: mean |psi(j)|^2 = 1/d within 4 SE at 1e4 samples") {
  const int d_mu = 20;
  MacroDecomposition d({d_mu, 7});
  const int n = 10000;
  const int j = 3; // fixed coordinate inside block 0
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = std::norm(sample_unit_state(d, 0, 1000 + static_cast<std::uint64_t>(k))(j));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double se = std::sqrt(var / n);
  CHECK(std::abs(mean - 1.0 / d_mu) <= 4.0 * se);
}

// Rotation invariance proxy: (Re ψ(j), Im ψ(j)) has isotropic covariance.
TEST_CASE("sphere isotropy: Re/Im covariance isotropic within 5 SE") {
  const int d_mu = 6;
  MacroDecomposition d({d_mu});
  const int n = 10000;
  const int j = 2;
  double sr = 0, si = 0, srr = 0, sii = 0, sri = 0;
  for (int k = 0; k < n; ++k) {
    const std::complex<double> z = sample_unit_state(d, 0, 77 + static_cast<std::uint64_t>(k))(j);
    sr += z.real();
    si += z.imag();
    srr += z.real() * z.real();
    sii += z.imag() * z.imag();
    sri += z.real() * z.imag();
  }
  const double mr = sr / n, mi = si / n;
  const double vrr = srr / n - mr * mr;
  const double vii = sii / n - mi * mi;
  const double vri = sri / n - mr * mi;
  // Var(Re) = Var(Im) = 1/(2d); Cov = 0. SE of a variance estimate is about
  // var·sqrt(2/n); of the cross term about var/sqrt(n).
  const double v0 = 1.0 / (2.0 * d_mu);
  const double se_var = v0 * std::sqrt(2.0 / n);
  const double se_cov = v0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(vrr - v0) <= 5.0 * se_var);
  CHECK(std::abs(vii - v0) <= 5.0 * se_var);
  CHECK(std::abs(vri) <= 5.0 * se_cov);
}

TEST_CASE("project_weight partitions the norm") {
  MacroDecomposition d({2, 3, 4});
  State psi = State::Zero(9);
  for (int j = 0; j < 9; ++j) psi(j) = std::complex<double>(j + 1, -j);
  psi /= psi.norm();
  double total = 0.0;
  for (int nu = 0; nu < 3; ++nu) total += project_weight(psi, d, nu);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(project_weight(State::Zero(5), d, 0), Error);
}

TEST_CASE("entropy per particle: d=2000, N=10, kB=1 gives 0.76009") {
  EntropyParams p;
  p.N = 10;
  p.kB = 1.0;
  CHECK(entropy_per_particle(2000, p) == doctest::Approx(0.76009).epsilon(1e-4));
  CHECK(entropy_per_particle(1, p) == 0.0);
  CHECK_THROWS_AS(entropy_per_particle(0, p), Error);
}

TEST_CASE("boltzmann entropy expectation is the weighted block entropy") {
  MacroDecomposition d({1, 3});
  EntropyParams p; // N=1, kB=1
  State psi = State::Zero(4);
  psi(0) = std::sqrt(0.25);
  psi(1) = std::sqrt(0.75);
  const double expected = 0.25 * std::log(1.0) + 0.75 * std::log(3.0);
  CHECK(boltzmann_entropy_expectation(psi, d, p) == doctest::Approx(expected).epsilon(1e-12));
}

} // TEST_SUITE
