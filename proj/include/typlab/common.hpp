#pragma once

// Shared plumbing: typed errors and deterministic seed derivation.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace typlab {

// Error taxonomy. The CLI maps these onto process exit codes
// (config/usage problems -> 2, numerical failures -> 3).
enum class errc {
  ok = 0,
  invalid_argument,   // bad parameter to a library call
  dimension_mismatch, // incompatible array/matrix shapes
  config,             // malformed or inconsistent experiment config
  io,                 // file read/write failure
  numeric,            // eigensolver failure, invalid floating-point state
  not_converged,      // iterative solver hit its iteration cap
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

// SplitMix64 step; the de-facto standard 64-bit seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2fa0f6394b2ULL;
  return z ^ (z >> 31);
}

// Deterministic per-stream sub-seed: hash (master, stream) so that parallel
// trials draw from independent, reproducible streams regardless of how work
// is scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b >> 1);
}

// Seeded normal generator. A fresh instance per logical stream keeps results
// independent of evaluation order (std::normal_distribution caches a spare
// deviate, so instances must not be shared across streams).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace typlab
