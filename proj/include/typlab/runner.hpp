#pragma once

// Experiment runner: JSON config in, CSV series + JSON reports out.
//
// Commands (mirroring the CLI subcommands):
//   simulate  trajectory weight series per trial (+ optional reference curves)
//   mmatrix   macro-transition matrix and its deviation from d_ν/D
//   deloc     per-eigenvector delocalization table and gap-event report
//   bounds    empirical errors juxtaposed with every applicable bound
//   dyson     vector Dyson equation solutions on a z-grid
//   eth       eigenbasis matrix-element statistic vs thresholds, per seed
//
// Determinism contract: identical (config, master seed) produce byte-identical
// CSV/JSON output on one platform, independent of the thread count. Per-trial
// randomness is derived from (master seed, trial index); workers fill
// preallocated slots and a single collector writes files in order.

#include <cstdint>
#include <optional>
#include <string>

namespace typlab::runner {

struct RunOverrides {
  std::optional<std::string> out_dir;   // overrides config "output_dir"
  std::optional<std::uint64_t> seed;    // overrides config "seed"
  int threads = 0;                      // 0 = TYPLAB_THREADS env or 1
};

// Parse the JSON config text, execute `command`, and write artifacts into the
// output directory (created if missing). Throws typlab::Error with
// errc::config for schema violations and errc::numeric/not_converged for
// numerical failures. Returns the output directory used.
std::string run_command(const std::string& command, const std::string& config_json,
                        const RunOverrides& overrides = {});

// Schema-subset validator for the emitted reports (type/properties/required/
// items/enum/const). Returns an empty string when `instance` conforms to
// `schema`, else a human-readable path + reason.
std::string validate_against_schema(const std::string& instance_json,
                                    const std::string& schema_json);

// Library version string.
const char* version();

} // namespace typlab::runner
