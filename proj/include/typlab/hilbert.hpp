#pragma once

// Macro-space decomposition of a finite-dimensional Hilbert space,
// uniform state sampling on macro-space spheres, projection weights,
// and entropy bookkeeping.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "typlab/common.hpp"

namespace typlab {

using State = Eigen::VectorXcd;

// An orthogonal decomposition C^D = ⊕_ν H_ν into "macro spaces".
// Each H_ν is spanned by a contiguous block I_ν of computational basis
// vectors, in declaration order; blocks partition {0, …, D−1}. Contiguity is
// deliberate: it makes band-structured Hamiltonians act like short-range
// couplings between adjacent macro spaces.
class MacroDecomposition {
public:
  // dims must be nonempty with every entry >= 1.
  explicit MacroDecomposition(std::vector<int> dims);

  int macro_count() const { return static_cast<int>(dims_.size()); }
  int total_dim() const { return total_; }
  int dim(int nu) const;
  // First index of block I_ν; the block is [offset, offset + dim).
  int offset(int nu) const;
  const std::vector<int>& dims() const { return dims_; }
  // Macro index owning computational basis index j.
  int block_of(int j) const;

private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Uniform random unit vector supported on H_μ: fill I_μ with independent
// standard complex Gaussians and normalize. Rotation invariance of the
// Gaussian makes the law exactly the uniform measure on the unit sphere of
// H_μ. Deterministic given the seed.
State sample_unit_state(const MacroDecomposition& decomp, int mu, std::uint64_t seed);

// ‖P_ν ψ‖² = Σ_{j∈I_ν} |ψ_j|², the superposition weight of macro space ν.
double project_weight(const State& psi, const MacroDecomposition& decomp, int nu);

// Units for entropy-per-particle conversions. kB defaults to 1 (simulation
// units); N is the particle count the dimensions are imagined to encode.
struct EntropyParams {
  long long N = 1;
  double kB = 1.0;
};

// s(d) = kB·ln(d)/N, the entropy per particle of a macro space of dimension d.
double entropy_per_particle(long long d, const EntropyParams& p);

// Expectation of the Boltzmann-entropy observable Σ_ν S(ν) P_ν in state ψ,
// with S(ν) = kB·ln(d_ν): Σ_ν S(ν)·‖P_ν ψ‖².
double boltzmann_entropy_expectation(const State& psi, const MacroDecomposition& decomp,
                                     const EntropyParams& p);

} // namespace typlab
