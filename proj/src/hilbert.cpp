#include "typlab/hilbert.hpp"

#include <cmath>
#include <complex>

namespace typlab {

MacroDecomposition::MacroDecomposition(std::vector<int> dims) : dims_(std::move(dims)) {
  require(!dims_.empty(), errc::invalid_argument, "decomposition needs at least one macro space");
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    require(d >= 1, errc::invalid_argument, "macro-space dimensions must be >= 1");
    offsets_.push_back(total_);
    total_ += d;
  }
}

int MacroDecomposition::dim(int nu) const {
  require(nu >= 0 && nu < macro_count(), errc::invalid_argument, "macro index out of range");
  return dims_[static_cast<std::size_t>(nu)];
}

int MacroDecomposition::offset(int nu) const {
  require(nu >= 0 && nu < macro_count(), errc::invalid_argument, "macro index out of range");
  return offsets_[static_cast<std::size_t>(nu)];
}

int MacroDecomposition::block_of(int j) const {
  require(j >= 0 && j < total_, errc::invalid_argument, "basis index out of range");
  int nu = 0;
  while (nu + 1 < macro_count() && offsets_[static_cast<std::size_t>(nu + 1)] <= j) ++nu;
  return nu;
}

State sample_unit_state(const MacroDecomposition& decomp, int mu, std::uint64_t seed) {
  const int d = decomp.dim(mu);
  const int off = decomp.offset(mu);
  Rng rng(seed);
  State psi = State::Zero(decomp.total_dim());
  for (int k = 0; k < d; ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    psi(off + k) = std::complex<double>(re, im);
  }
  const double norm = psi.norm();
  // 2d independent Gaussians are all zero with probability 0; guard anyway.
  require(norm > 0.0, errc::numeric, "degenerate Gaussian draw while sampling a unit state");
  psi /= norm;
  return psi;
}

double project_weight(const State& psi, const MacroDecomposition& decomp, int nu) {
  require(psi.size() == decomp.total_dim(), errc::dimension_mismatch,
          "state length does not match the decomposition");
  const int d = decomp.dim(nu);
  const int off = decomp.offset(nu);
  return psi.segment(off, d).squaredNorm();
}

double entropy_per_particle(long long d, const EntropyParams& p) {
  require(d >= 1, errc::invalid_argument, "dimension must be >= 1");
  require(p.N >= 1, errc::invalid_argument, "particle count must be >= 1");
  require(p.kB > 0.0, errc::invalid_argument, "kB must be positive");
  return p.kB * std::log(static_cast<double>(d)) / static_cast<double>(p.N);
}

double boltzmann_entropy_expectation(const State& psi, const MacroDecomposition& decomp,
                                     const EntropyParams& p) {
  double acc = 0.0;
  for (int nu = 0; nu < decomp.macro_count(); ++nu) {
    const double S_nu = p.kB * std::log(static_cast<double>(decomp.dim(nu)));
    acc += S_nu * project_weight(psi, decomp, nu);
  }
  return acc;
}

} // namespace typlab
