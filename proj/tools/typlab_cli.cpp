// typlab — command-line front end. Deliberately thin: parse arguments, read
// the config file, call the C ABI, map status codes onto process exit codes.
// This translation unit includes only the public C header, so it doubles as a
// compile-time check that the ABI is usable without any library internals.
//
// Exit codes: 0 success; 2 usage/config/IO problem; 3 numerical failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "typlab/typlab.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(typlab_status st) {
  switch (st) {
    case TYPLAB_OK:
      return 0;
    case TYPLAB_ERR_INVALID_ARGUMENT:
    case TYPLAB_ERR_DIMENSION_MISMATCH:
    case TYPLAB_ERR_CONFIG:
    case TYPLAB_ERR_IO:
      return kExitUsage;
    case TYPLAB_ERR_NUMERIC:
    case TYPLAB_ERR_NOT_CONVERGED:
    case TYPLAB_ERR_INTERNAL:
    default:
      return kExitNumeric;
  }
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory (overrides config \"output_dir\")");
  cmd->add_option("--seed", args.seed, "Master seed (overrides config \"seed\")")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "Worker threads (default: TYPLAB_THREADS or 1)")
      ->check(CLI::Range(1, 4096));
}

int run(const std::string& command, const CommonArgs& args) {
  std::ifstream in(args.config_path, std::ios::binary);
  if (!in.good()) {
    std::fprintf(stderr, "typlab: cannot read config file %s\n", args.config_path.c_str());
    return kExitUsage;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string config = buf.str();

  const typlab_status st =
      typlab_run(command.c_str(), config.c_str(), args.out_dir.empty() ? nullptr : args.out_dir.c_str(),
                 args.seed_set ? &args.seed : nullptr, args.threads);
  if (st != TYPLAB_OK) {
    std::fprintf(stderr, "typlab %s: %s\n", command.c_str(), typlab_last_error());
    return exit_code_for(st);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"typlab — random Hermitian Hamiltonians: dynamics, typicality "
               "statistics, delocalization diagnostics, and theoretical bounds"};
  app.set_version_flag("--version", std::string(typlab_version()));
  app.require_subcommand(1);

  static const struct {
    const char* name;
    const char* help;
  } kCommands[] = {
      {"simulate", "Evolve random initial states and record macro-weight trajectories"},
      {"mmatrix", "Macro-transition matrix and its deviation from the uniform profile"},
      {"deloc", "Per-eigenvector delocalization table and gap-event report"},
      {"bounds", "Empirical error series side by side with every applicable bound"},
      {"dyson", "Solve the vector Dyson equation on a z-grid"},
      {"eth", "Eigenbasis matrix-element statistic vs threshold, per seed"},
  };

  CommonArgs args[std::size(kCommands)];
  for (std::size_t i = 0; i < std::size(kCommands); ++i)
    add_common(app.add_subcommand(kCommands[i].name, kCommands[i].help), args[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e); // prints the message; the code is ours to choose
    return kExitUsage;
  }

  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    if (app.got_subcommand(kCommands[i].name)) return run(kCommands[i].name, args[i]);
  }
  std::fprintf(stderr, "typlab: no command given\n");
  return kExitUsage;
}
