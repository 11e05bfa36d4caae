// Experiment runner: JSON config in, CSV series + JSON reports out.
//
// Determinism: all floating-point text is produced with "%.17g" (CSV) or
// nlohmann's shortest-round-trip serializer (JSON); object keys serialize in
// sorted order; trials are computed by a worker pool into preallocated slots
// and written by the calling thread in trial order. manifest.json and
// report.json are therefore byte-identical for identical (config, seed);
// timings.json is the one deliberately non-deterministic artifact.

#include "typlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "typlab/bounds.hpp"
#include "typlab/common.hpp"
#include "typlab/ensembles.hpp"
#include "typlab/hilbert.hpp"
#include "typlab/spectral.hpp"
#include "typlab/typicality.hpp"

#ifndef TYPLAB_VERSION_STRING
#define TYPLAB_VERSION_STRING "0.0.0"
#endif

namespace typlab::runner {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ------------------------------------------------------------- formatting

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) == 1, errc::numeric,
          "SHA-256 computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::vector<double> linspace(double a, double b, int steps) {
  require(steps >= 2, errc::config, "time grid needs at least 2 steps");
  std::vector<double> t(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    t[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (steps - 1);
  return t;
}

// ------------------------------------------------------------ json access

const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  require(it != j.end(), errc::config, std::string("config: missing required key \"") + key + "\"");
  return *it;
}

double num_or(const json& j, const char* key, double def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_number(), errc::config, std::string("config: \"") + key + "\" must be a number");
  return it->get<double>();
}

long long int_or(const json& j, const char* key, long long def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_number_integer(), errc::config,
          std::string("config: \"") + key + "\" must be an integer");
  return it->get<long long>();
}

bool bool_or(const json& j, const char* key, bool def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_boolean(), errc::config, std::string("config: \"") + key + "\" must be a boolean");
  return it->get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  require(it->is_string(), errc::config, std::string("config: \"") + key + "\" must be a string");
  return it->get<std::string>();
}

// ---------------------------------------------------------------- file IO

Eigen::MatrixXcd read_complex_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open matrix file: " + path);
  std::vector<std::vector<std::complex<double>>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::complex<double>> row;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) {
      try {
        nums.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(errc::config, "matrix file " + path + ": bad number \"" + cell + "\"");
      }
    }
    require(nums.size() % 2 == 0, errc::config,
            "matrix file " + path + ": rows need interleaved (re, im) column pairs");
    for (std::size_t c = 0; c + 1 < nums.size(); c += 2)
      row.emplace_back(nums[c], nums[c + 1]);
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), errc::config, "matrix file " + path + " is empty");
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXcd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == cols, errc::config,
            "matrix file " + path + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  }
  return M;
}

// ------------------------------------------------------------- threading

int resolve_threads(int override_) {
  if (override_ > 0) return override_;
  if (const char* env = std::getenv("TYPLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    require(end != env && *end == '\0' && v >= 1 && v <= 4096, errc::config,
            "TYPLAB_THREADS must be an integer in [1, 4096]");
    return static_cast<int>(v);
  }
  return 1;
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (n <= 0) return;
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------------------------------------- experiment

struct NamedFile {
  std::string name;
  std::string content;
};

struct Experiment {
  json cfg;
  std::string command;
  std::uint64_t master_seed = 1;
  int threads = 1;
  int trials = 1;
  int D = 0;
  std::vector<int> dims;
  VarianceProfile profile = VarianceProfile::constant(0, 1.0);
  std::optional<Eigen::MatrixXcd> H0;

  // common parameters
  double eps = 0.1, delta = 0.1, eps_prime = 0.25;
  double kappa = 0.25, xi = 0.3, tau = 0.1, gap_delta = 1e-8;
  double spectral_tol = -1.0; // -1: default rule
  EntropyParams entropy;
  int initial_macro = 0;    // 0-based
  int observable_macro = -1; // 0-based; -1 when the observable comes from a file
  std::optional<Eigen::MatrixXcd> B_file;
  int initial_states = 1;
  bool reference_curve = false;

  // ensemble constants configuration
  double c_minus = 1.0, c_plus = 1.0, c_c = 1.0, chat = 1.0;
  std::string j_method = "quantile";
  double j_eta = 0.1;
  int j_samples = 40;

  MacroDecomposition decomposition() const { return MacroDecomposition(dims); }
  EnsembleSpec ensemble() const { return EnsembleSpec::make(profile, H0); }
  std::uint64_t hamiltonian_seed(int trial) const {
    return derive_seed(master_seed, 2ULL * static_cast<std::uint64_t>(trial));
  }
  std::uint64_t state_seed(int trial, int state) const {
    const std::uint64_t base =
        derive_seed(master_seed, 2ULL * static_cast<std::uint64_t>(trial) + 1ULL);
    return derive_seed(base, static_cast<std::uint64_t>(state));
  }
  std::uint64_t constants_seed() const { return derive_seed(master_seed, 1ULL << 62); }
};

Experiment build_experiment(const std::string& command, const std::string& config_json,
                            const RunOverrides& overrides) {
  Experiment ex;
  ex.command = command;
  try {
    ex.cfg = json::parse(config_json);
  } catch (const json::parse_error& e) {
    fail(errc::config, std::string("config JSON parse error: ") + e.what());
  }
  require(ex.cfg.is_object(), errc::config, "config must be a JSON object");

  // dimensions
  if (ex.cfg.contains("dims")) {
    const json& jd = ex.cfg["dims"];
    require(jd.is_array() && !jd.empty(), errc::config,
            "config: \"dims\" must be a nonempty array of positive integers");
    for (const auto& v : jd) {
      require(v.is_number_integer() && v.get<long long>() >= 1, errc::config,
              "config: \"dims\" must be a nonempty array of positive integers");
      ex.dims.push_back(static_cast<int>(v.get<long long>()));
    }
    long long total = 0;
    for (int d : ex.dims) total += d;
    require(total <= 100000, errc::config, "config: total dimension too large");
    ex.D = static_cast<int>(total);
  } else if (ex.cfg.contains("dim")) {
    const long long d = int_or(ex.cfg, "dim", 0);
    require(d >= 1 && d <= 100000, errc::config, "config: \"dim\" must be in [1, 100000]");
    ex.D = static_cast<int>(d);
    ex.dims = {ex.D};
  } else {
    fail(errc::config, "config: need \"dims\" (macro dimensions) or \"dim\"");
  }

  // profile
  require(ex.cfg.contains("profile"), errc::config, "config: missing required key \"profile\"");
  ex.profile = VarianceProfile::from_json(member(ex.cfg, "profile").dump()).with_dim(ex.D);

  // deterministic part
  const std::string h0_path = str_or(ex.cfg, "h0_csv", "");
  if (!h0_path.empty()) {
    Eigen::MatrixXcd H0 = read_complex_csv(h0_path);
    require(H0.rows() == ex.D && H0.cols() == ex.D, errc::config,
            "config: H0 must be " + std::to_string(ex.D) + "x" + std::to_string(ex.D));
    ex.H0 = std::move(H0);
  }

  // seeds / trials / threads
  {
    auto it = ex.cfg.find("seed");
    if (it != ex.cfg.end()) {
      require(it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0),
              errc::config, "config: \"seed\" must be a nonnegative integer");
      ex.master_seed = it->get<std::uint64_t>();
    }
  }
  if (overrides.seed) ex.master_seed = *overrides.seed;
  const long long trials = int_or(ex.cfg, "trials", 1);
  require(trials >= 1 && trials <= 1000000, errc::config,
          "config: \"trials\" must be in [1, 1000000]");
  ex.trials = static_cast<int>(trials);
  ex.threads = resolve_threads(overrides.threads);

  // tolerances and exponents
  ex.eps = num_or(ex.cfg, "eps", 0.1);
  ex.delta = num_or(ex.cfg, "delta", 0.1);
  ex.eps_prime = num_or(ex.cfg, "eps_prime", 0.25);
  ex.kappa = num_or(ex.cfg, "kappa", 0.25);
  ex.xi = num_or(ex.cfg, "xi", 0.3);
  ex.tau = num_or(ex.cfg, "tau", 0.1);
  ex.gap_delta = num_or(ex.cfg, "gap_delta", 1e-8);
  ex.spectral_tol = num_or(ex.cfg, "spectral_tol", -1.0);

  // entropy units
  if (ex.cfg.contains("entropy")) {
    const json& je = ex.cfg["entropy"];
    require(je.is_object(), errc::config, "config: \"entropy\" must be an object");
    ex.entropy.N = int_or(je, "N", 1);
    ex.entropy.kB = num_or(je, "kB", 1.0);
    require(ex.entropy.N >= 1, errc::config, "config: entropy N must be >= 1");
    require(ex.entropy.kB > 0.0, errc::config, "config: entropy kB must be positive");
  }

  // macro selections (config uses 1-based labels, matching CSV headers)
  const int m = static_cast<int>(ex.dims.size());
  const long long mu1 = int_or(ex.cfg, "initial_macro", 1);
  require(mu1 >= 1 && mu1 <= m, errc::config, "config: \"initial_macro\" out of range");
  ex.initial_macro = static_cast<int>(mu1 - 1);

  if (ex.cfg.contains("observable") && ex.cfg["observable"].is_object() &&
      ex.cfg["observable"].contains("file")) {
    const std::string path = str_or(ex.cfg["observable"], "file", "");
    Eigen::MatrixXcd B = read_complex_csv(path);
    require(B.rows() == ex.D && B.cols() == ex.D, errc::config,
            "config: observable must be " + std::to_string(ex.D) + "x" + std::to_string(ex.D));
    ex.B_file = std::move(B);
    ex.observable_macro = -1;
  } else {
    const long long nu1 = int_or(ex.cfg, "observable_macro", m);
    require(nu1 >= 1 && nu1 <= m, errc::config, "config: \"observable_macro\" out of range");
    ex.observable_macro = static_cast<int>(nu1 - 1);
  }

  const long long states = int_or(ex.cfg, "initial_states", 1);
  require(states >= 1 && states <= 100000, errc::config,
          "config: \"initial_states\" must be in [1, 100000]");
  ex.initial_states = static_cast<int>(states);
  ex.reference_curve = bool_or(ex.cfg, "reference_curve", false);

  // ensemble constants
  if (ex.cfg.contains("constants")) {
    const json& jc = ex.cfg["constants"];
    require(jc.is_object(), errc::config, "config: \"constants\" must be an object");
    ex.c_minus = num_or(jc, "c_minus", 1.0);
    ex.c_plus = num_or(jc, "c_plus", 1.0);
    ex.c_c = num_or(jc, "c_c", 1.0);
    ex.chat = num_or(jc, "chat", 1.0);
  }
  if (ex.cfg.contains("j_estimate")) {
    const json& jj = ex.cfg["j_estimate"];
    require(jj.is_object(), errc::config, "config: \"j_estimate\" must be an object");
    ex.j_method = str_or(jj, "method", "quantile");
    require(ex.j_method == "quantile" || ex.j_method == "markov", errc::config,
            "config: j_estimate method must be \"quantile\" or \"markov\"");
    ex.j_eta = num_or(jj, "eta", 0.1);
    ex.j_samples = static_cast<int>(int_or(jj, "samples", 40));
  }
  return ex;
}

double resolved_tol(const Experiment& ex, const SpectralData& sd) {
  return ex.spectral_tol < 0.0 ? default_spectral_tol(sd.eigenvalues) : ex.spectral_tol;
}

// Time grid: {"window": "early" | "late" | [a, b], "steps": N}. "early" is
// [0, 50/mean-gap] (relaxation scale); "late" is [T0, 2·T0] with
// T0 = 1000/mean-gap (pre-equilibrated scale).
std::vector<double> resolve_times(const Experiment& ex, const SpectralData& sd,
                                  const std::string& default_window) {
  json tg = json::object();
  if (ex.cfg.contains("time_grid")) {
    tg = ex.cfg["time_grid"];
    require(tg.is_object(), errc::config, "config: \"time_grid\" must be an object");
  }
  const long long steps = int_or(tg, "steps", 2000);
  require(steps >= 2 && steps <= 10000000, errc::config,
          "config: time_grid steps must be in [2, 1e7]");
  json w = tg.contains("window") ? tg["window"] : json(default_window);
  double a = 0.0, b = 0.0;
  if (w.is_string()) {
    const double mg = sd.mean_gap();
    require(mg > 0.0, errc::numeric, "mean level spacing is zero; named time windows undefined");
    const std::string name = w.get<std::string>();
    if (name == "early") {
      a = 0.0;
      b = 50.0 / mg;
    } else if (name == "late") {
      const double T0 = 1000.0 / mg;
      a = T0;
      b = 2.0 * T0;
    } else {
      fail(errc::config, "config: unknown time window \"" + name + "\"");
    }
  } else if (w.is_array() && w.size() == 2 && w[0].is_number() && w[1].is_number()) {
    a = w[0].get<double>();
    b = w[1].get<double>();
    require(b > a, errc::config, "config: time window must satisfy t1 > t0");
  } else {
    fail(errc::config, "config: time_grid window must be \"early\", \"late\" or [t0, t1]");
  }
  return linspace(a, b, static_cast<int>(steps));
}

// --------------------------------------------------------------- constants

struct ConstantsReport {
  bool available = false; // K/J/C_sigma computable (needs sigma_min > 0)
  double K = 0.0, J = 0.0, J_quantile = 0.0, C_H0 = 0.0, C_sigma = 0.0;
  double latala = 0.0;
  double eta = -1.0; // negative: undefined (probability budget exhausted)

  json to_json() const {
    if (!available) return json(nullptr);
    return json{{"K", K},           {"J", J},
                {"J_quantile", J_quantile}, {"C_H0", C_H0},
                {"C_sigma", C_sigma},       {"latala", latala},
                {"eta", eta >= 0.0 ? json(eta) : json(nullptr)}};
  }
};

ConstantsReport compute_constants(const Experiment& ex, double d_mu, double d_nu) {
  ConstantsReport c;
  if (ex.profile.sigma_min() <= 0.0) return c; // K and C_sigma undefined
  c.available = true;
  c.K = density_bound_K(ex.profile);
  c.C_H0 = ex.H0 ? compute_CH0(*ex.H0) : 0.0;
  c.latala = latala_expression(ex.profile, ex.chat);
  EnsembleConstants base;
  base.c_minus = ex.c_minus;
  base.c_plus = ex.c_plus;
  c.C_sigma = compute_C_sigma(base, ex.profile.sigma_min(), ex.profile.sigma_max(), c.C_H0);
  if (ex.j_method == "markov") {
    c.J = markov_J(ex.profile, c.C_H0, ex.j_eta, ex.chat);
    c.J_quantile = 0.0;
  } else {
    const JEstimate est = estimate_J(ex.ensemble(), ex.j_eta, ex.j_samples, ex.constants_seed());
    c.J = est.J;
    c.J_quantile = est.quantile;
  }
  try {
    c.eta = d_nu > 0.0 ? solve_eta(ex.eps_prime, d_mu, d_nu) : solve_eta(ex.eps_prime, d_mu);
  } catch (const Error&) {
    c.eta = -1.0; // budget exhausted at tiny block dimensions; reported as null
  }
  return c;
}

// ------------------------------------------------------------- observable

// Scalar data of the observable entering the bound evaluators. For projector
// observables everything is closed-form; matrices from files are
// eigendecomposed once.
struct ObservableData {
  bool projector = true;
  int nu = -1; // 0-based macro index when projector
  double norm_B = 0.0, tr_abs_B = 0.0, trace_B = 0.0;
  double tr_B_plus = 0.0, tr_B_minus = 0.0;
  double b_plus_min = 0.0, b_plus_max = 0.0, b_minus_min = 0.0, b_minus_max = 0.0;
  double hs_traceless = 0.0;

  json to_json() const {
    json j{{"norm_B", norm_B},
           {"tr_abs_B", tr_abs_B},
           {"trace_B", trace_B},
           {"tr_B_plus", tr_B_plus},
           {"tr_B_minus", tr_B_minus},
           {"b_plus_min", b_plus_min},
           {"b_plus_max", b_plus_max},
           {"b_minus_min", b_minus_min},
           {"b_minus_max", b_minus_max},
           {"hs_traceless", hs_traceless}};
    j["kind"] = projector ? "projector" : "file";
    if (projector) j["macro"] = nu + 1;
    return j;
  }
};

ObservableData observable_data(const Experiment& ex) {
  ObservableData od;
  if (!ex.B_file) {
    od.projector = true;
    od.nu = ex.observable_macro;
    const double dnu = ex.dims[static_cast<std::size_t>(od.nu)];
    const double D = ex.D;
    od.norm_B = 1.0;
    od.trace_B = dnu;
    od.tr_abs_B = dnu;
    od.tr_B_plus = dnu;
    od.tr_B_minus = 0.0;
    od.b_plus_min = (static_cast<int>(dnu) == ex.D) ? 1.0 : 0.0;
    od.b_plus_max = 1.0;
    od.b_minus_min = 0.0;
    od.b_minus_max = 0.0;
    // ‖P_ν − (d_ν/D)·I‖_F²  =  d_ν(1 − d_ν/D)² + (D − d_ν)(d_ν/D)².
    const double r = dnu / D;
    od.hs_traceless = std::sqrt(dnu * (1.0 - r) * (1.0 - r) + (D - dnu) * r * r);
    return od;
  }
  od.projector = false;
  const Eigen::MatrixXcd& B = *ex.B_file;
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  require((B - B.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * scale, errc::config,
          "observable matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, errc::numeric, "observable eigensolve failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  bool all_pos = true, all_neg = true;
  double bp_min = 0.0, bm_min = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double b = ev(i);
    od.trace_B += b;
    od.tr_abs_B += std::abs(b);
    od.norm_B = std::max(od.norm_B, std::abs(b));
    if (b > 0.0) {
      od.tr_B_plus += b;
      od.b_plus_max = std::max(od.b_plus_max, b);
      bp_min = (bp_min == 0.0) ? b : std::min(bp_min, b);
    } else {
      all_pos = false;
    }
    if (b < 0.0) {
      od.tr_B_minus += -b;
      od.b_minus_max = std::max(od.b_minus_max, -b);
      bm_min = (bm_min == 0.0) ? -b : std::min(bm_min, -b);
    } else {
      all_neg = false;
    }
  }
  od.b_plus_min = all_pos ? bp_min : 0.0;
  od.b_minus_min = all_neg ? bm_min : 0.0;
  const double mean = od.trace_B / static_cast<double>(ev.size());
  double hs2 = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) hs2 += (ev(i) - mean) * (ev(i) - mean);
  od.hs_traceless = std::sqrt(hs2);
  return od;
}

// -------------------------------------------------------------- csv pieces

std::string trajectory_header(int m) {
  std::string h = "t";
  for (int nu = 1; nu <= m; ++nu) h += ",w_" + std::to_string(nu);
  h += "\n";
  return h;
}

std::string trajectory_csv(const Trajectory& traj) {
  const int m = static_cast<int>(traj.weights.cols());
  std::string out = trajectory_header(m);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out += fmt(traj.times[k]);
    for (int nu = 0; nu < m; ++nu) {
      out += ',';
      out += fmt(traj.weights(static_cast<Eigen::Index>(k), nu));
    }
    out += '\n';
  }
  return out;
}

// ----------------------------------------------------------- the commands

struct CommandOutput {
  json report;
  std::vector<NamedFile> files;
  std::vector<std::vector<std::uint64_t>> state_seeds; // per trial, for manifest
  std::vector<double> trial_seconds;                   // for timings.json
};

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CommandOutput run_simulate(const Experiment& ex) {
  const MacroDecomposition decomp = ex.decomposition();
  const EnsembleSpec spec = ex.ensemble();
  const int m = decomp.macro_count();

  struct TrialResult {
    json report;
    std::vector<NamedFile> files;
    std::vector<std::uint64_t> seeds;
    double seconds = 0.0;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(ex.trials));

  parallel_for(ex.trials, ex.threads, [&](int k) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult& r = results[static_cast<std::size_t>(k)];
    const std::uint64_t hseed = ex.hamiltonian_seed(k);
    const SpectralData sd = diagonalize(sample_hamiltonian(spec, hseed));
    const double tol = resolved_tol(ex, sd);
    const std::vector<double> times = resolve_times(ex, sd, "early");

    const MMatrix M = compute_M_matrix(sd, decomp, tol);
    json states = json::array();
    for (int j = 0; j < ex.initial_states; ++j) {
      const std::uint64_t sseed = ex.state_seed(k, j);
      r.seeds.push_back(sseed);
      const State psi0 = sample_unit_state(decomp, ex.initial_macro, sseed);
      const Trajectory traj = trajectory(sd, decomp, psi0, times);
      r.files.push_back({"trajectory_t" + std::to_string(k) + "_s" + std::to_string(j) + ".csv",
                         trajectory_csv(traj)});
      const WeightVector mw = asymptotic_weights(sd, decomp, psi0, tol);
      states.push_back(json{{"state", j}, {"seed", sseed}, {"m_psi", mw.weights}});
    }
    if (ex.reference_curve) {
      std::string csv = trajectory_header(m);
      std::vector<std::vector<double>> curves(static_cast<std::size_t>(m));
      for (int nu = 0; nu < m; ++nu)
        curves[static_cast<std::size_t>(nu)] =
            ensemble_curve_w(sd, decomp, ex.initial_macro, nu, times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        csv += fmt(times[i]);
        for (int nu = 0; nu < m; ++nu) {
          csv += ',';
          csv += fmt(curves[static_cast<std::size_t>(nu)][i]);
        }
        csv += '\n';
      }
      r.files.push_back({"wref_t" + std::to_string(k) + ".csv", std::move(csv)});
    }

    std::vector<double> m_row(static_cast<std::size_t>(m));
    for (int nu = 0; nu < m; ++nu) m_row[static_cast<std::size_t>(nu)] = M.entries(ex.initial_macro, nu);
    r.report = json{{"trial", k},
                    {"hamiltonian_seed", hseed},
                    {"block_form", M.block_form},
                    {"spectral_range", sd.spectral_range()},
                    {"mean_gap", sd.mean_gap()},
                    {"eigensolver_residual", sd.residual},
                    {"m_row", m_row},
                    {"states", states}};
    r.seconds = elapsed_s(t0);
  });

  CommandOutput out;
  json trials = json::array();
  for (auto& r : results) {
    trials.push_back(std::move(r.report));
    for (auto& f : r.files) out.files.push_back(std::move(f));
    out.state_seeds.push_back(std::move(r.seeds));
    out.trial_seconds.push_back(r.seconds);
  }
  out.report = json{{"command", "simulate"},
                    {"D", ex.D},
                    {"dims", ex.dims},
                    {"initial_macro", ex.initial_macro + 1},
                    {"trials", trials}};
  return out;
}

CommandOutput run_mmatrix(const Experiment& ex) {
  const MacroDecomposition decomp = ex.decomposition();
  const EnsembleSpec spec = ex.ensemble();
  const int m = decomp.macro_count();

  struct TrialResult {
    json report;
    std::string csv_rows;
    double seconds = 0.0;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(ex.trials));

  parallel_for(ex.trials, ex.threads, [&](int k) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult& r = results[static_cast<std::size_t>(k)];
    const std::uint64_t hseed = ex.hamiltonian_seed(k);
    const SpectralData sd = diagonalize(sample_hamiltonian(spec, hseed));
    const MMatrix M = compute_M_matrix(sd, decomp, resolved_tol(ex, sd));

    double row_dev = 0.0, balance_dev = 0.0, column_dev = 0.0, uniform_dev = 0.0;
    for (int mu = 0; mu < m; ++mu) {
      row_dev = std::max(row_dev, std::abs(M.entries.row(mu).sum() - 1.0));
      for (int nu = 0; nu < m; ++nu) {
        balance_dev = std::max(balance_dev, std::abs(decomp.dim(mu) * M.entries(mu, nu) -
                                                     decomp.dim(nu) * M.entries(nu, mu)));
        const double ref = static_cast<double>(decomp.dim(nu)) / ex.D;
        const double dev = std::abs(M.entries(mu, nu) - ref);
        uniform_dev = std::max(uniform_dev, dev);
        r.csv_rows += std::to_string(k) + "," + std::to_string(mu + 1) + "," +
                      std::to_string(nu + 1) + "," + fmt(M.entries(mu, nu)) + "," + fmt(ref) +
                      "," + fmt(dev) + "\n";
      }
    }
    for (int nu = 0; nu < m; ++nu) {
      double col = 0.0;
      for (int mu = 0; mu < m; ++mu) col += decomp.dim(mu) * M.entries(mu, nu);
      column_dev = std::max(column_dev, std::abs(col - decomp.dim(nu)));
    }
    r.report = json{{"trial", k},
                    {"hamiltonian_seed", hseed},
                    {"block_form", M.block_form},
                    {"eigensolver_residual", sd.residual},
                    {"row_sum_max_dev", row_dev},
                    {"detailed_balance_max_dev", balance_dev},
                    {"column_identity_max_dev", column_dev},
                    {"max_abs_dev_from_uniform", uniform_dev}};
    r.seconds = elapsed_s(t0);
  });

  CommandOutput out;
  std::string csv = "trial,mu,nu,M,uniform_ref,abs_dev\n";
  json trials = json::array();
  for (auto& r : results) {
    csv += r.csv_rows;
    trials.push_back(std::move(r.report));
    out.state_seeds.emplace_back();
    out.trial_seconds.push_back(r.seconds);
  }
  out.files.push_back({"mmatrix.csv", std::move(csv)});
  out.report = json{{"command", "mmatrix"}, {"D", ex.D}, {"dims", ex.dims}, {"trials", trials}};
  return out;
}

CommandOutput run_deloc(const Experiment& ex) {
  const EnsembleSpec spec = ex.ensemble();

  // κ grid for subset-mass columns.
  std::vector<double> kappas{0.125, 0.25, 0.5};
  if (ex.cfg.contains("kappa_grid")) {
    const json& jk = ex.cfg["kappa_grid"];
    require(jk.is_array() && !jk.empty(), errc::config,
            "config: \"kappa_grid\" must be a nonempty array of numbers in (0, 1]");
    kappas.clear();
    for (const auto& v : jk) {
      require(v.is_number() && v.get<double>() > 0.0 && v.get<double>() <= 1.0, errc::config,
              "config: \"kappa_grid\" must be a nonempty array of numbers in (0, 1]");
      kappas.push_back(v.get<double>());
    }
  }

  const ConstantsReport constants =
      compute_constants(ex, ex.dims[static_cast<std::size_t>(ex.initial_macro)], 0.0);

  struct TrialResult {
    json report;
    NamedFile file;
    double seconds = 0.0;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(ex.trials));

  std::string header = "n,E_n,sup_norm";
  for (double kp : kappas) header += ",msm_" + std::string(fmt_label(kp));
  for (double kp : kappas) header += ",gap_" + std::string(fmt_label(kp));
  header += "\n";

  parallel_for(ex.trials, ex.threads, [&](int k) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult& r = results[static_cast<std::size_t>(k)];
    const std::uint64_t hseed = ex.hamiltonian_seed(k);
    const SpectralData sd = diagonalize(sample_hamiltonian(spec, hseed));
    const double tol = resolved_tol(ex, sd);
    const SpectrumDiagnostics diag = spectrum_diagnostics(sd.eigenvalues, tol);
    const ResonanceResult rez = resonance_check(sd.eigenvalues, tol);
    const double delta2 = ex.gap_delta * ex.gap_delta;

    std::string csv = header;
    std::vector<double> worst_mass(kappas.size(), 0.0);
    std::vector<int> worst_index(kappas.size(), -1);
    double max_sup = 0.0;
    for (int n = 0; n < sd.dim(); ++n) {
      const double sn = sup_norm(sd.eigenvectors.col(n));
      max_sup = std::max(max_sup, sn);
      csv += std::to_string(n) + "," + fmt(sd.eigenvalues(n)) + "," + fmt(sn);
      std::vector<double> row_mass(kappas.size());
      for (std::size_t q = 0; q < kappas.size(); ++q) {
        const double mass = min_subset_mass(sd.eigenvectors.col(n), kappas[q]);
        row_mass[q] = mass;
        if (worst_index[q] < 0 || mass < worst_mass[q]) {
          worst_index[q] = n;
          worst_mass[q] = mass;
        }
        csv += "," + fmt(mass);
      }
      for (std::size_t q = 0; q < kappas.size(); ++q)
        csv += std::string(",") + (row_mass[q] < delta2 ? "1" : "0");
      csv += '\n';
    }
    r.file = {"deloc_t" + std::to_string(k) + ".csv", std::move(csv)};

    json gaps = json::array();
    for (std::size_t q = 0; q < kappas.size(); ++q) {
      json g{{"kappa", kappas[q]},
             {"event", worst_mass[q] < delta2},
             {"worst_index", worst_index[q]},
             {"worst_mass", worst_mass[q]}};
      // No-gaps delocalization floor for subsets of size ⌈κD⌉:
      // (κ/(4·c_c·sqrt(K·J)))^16.
      if (constants.available) {
        const double s = 1.0 / (4.0 * ex.c_c * std::sqrt(constants.K * constants.J));
        g["mass_floor"] = std::pow(kappas[q] * s, 16.0);
      } else {
        g["mass_floor"] = json(nullptr);
      }
      gaps.push_back(std::move(g));
    }
    json witness(nullptr);
    if (rez.witness)
      witness = json::array({rez.witness->i, rez.witness->j, rez.witness->k, rez.witness->l});
    r.report = json{{"trial", k},
                    {"hamiltonian_seed", hseed},
                    {"D_E", diag.D_E},
                    {"D_G", diag.D_G},
                    {"min_gap", diag.min_gap},
                    {"resonance_free", diag.resonance_free},
                    {"witness", witness},
                    {"max_sup_norm", max_sup},
                    {"eigensolver_residual", sd.residual},
                    {"gap_events", gaps}};
    r.seconds = elapsed_s(t0);
  });

  CommandOutput out;
  json trials = json::array();
  for (auto& r : results) {
    trials.push_back(std::move(r.report));
    out.files.push_back(std::move(r.file));
    out.state_seeds.emplace_back();
    out.trial_seconds.push_back(r.seconds);
  }
  out.report = json{{"command", "deloc"},    {"D", ex.D},
                    {"dims", ex.dims},       {"kappa_grid", kappas},
                    {"delta", ex.gap_delta}, {"constants", constants.to_json()},
                    {"trials", trials}};
  return out;
}

CommandOutput run_bounds(const Experiment& ex) {
  const MacroDecomposition decomp = ex.decomposition();
  const EnsembleSpec spec = ex.ensemble();
  const int m = decomp.macro_count();
  const ObservableData od = observable_data(ex);
  const double d_mu = decomp.dim(ex.initial_macro);
  const double d_nu = od.projector ? decomp.dim(od.nu) : 0.0;
  const ConstantsReport constants = compute_constants(ex, d_mu, d_nu);

  struct TrialResult {
    json report;
    std::vector<NamedFile> files;
    std::vector<std::uint64_t> seeds;
    double seconds = 0.0;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(ex.trials));

  parallel_for(ex.trials, ex.threads, [&](int k) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult& r = results[static_cast<std::size_t>(k)];
    const std::uint64_t hseed = ex.hamiltonian_seed(k);
    const SpectralData sd = diagonalize(sample_hamiltonian(spec, hseed));
    const double tol = resolved_tol(ex, sd);
    const std::vector<double> times = resolve_times(ex, sd, "late");

    const SpectrumDiagnostics diag = spectrum_diagnostics(sd.eigenvalues, tol);
    const long Gk = gap_count(sd.eigenvalues, ex.kappa, tol);

    BoundInputs in;
    in.eps = ex.eps;
    in.delta = ex.delta;
    in.eps_prime = ex.eps_prime;
    in.kappa = ex.kappa;
    in.T = times.back();
    in.d_mu = d_mu;
    in.d_nu = d_nu;
    in.D = ex.D;
    in.D_E = diag.D_E;
    in.D_G = diag.D_G;
    in.G_kappa = static_cast<double>(Gk);
    in.norm_B = od.norm_B;
    in.tr_abs_B = od.tr_abs_B;
    in.tr_B_plus = od.tr_B_plus;
    in.tr_B_minus = od.tr_B_minus;
    in.b_plus_min = od.b_plus_min;
    in.b_plus_max = od.b_plus_max;
    in.b_minus_min = od.b_minus_min;
    in.b_minus_max = od.b_minus_max;
    in.c_c = ex.c_c;
    in.s_mu = entropy_per_particle(static_cast<long long>(d_mu), ex.entropy);
    in.s_nu = od.projector ? entropy_per_particle(static_cast<long long>(d_nu), ex.entropy) : 0.0;
    in.s_mc = entropy_per_particle(ex.D, ex.entropy);
    in.N = static_cast<double>(ex.entropy.N);
    in.kB = ex.entropy.kB;
    in.xi = ex.xi;
    in.tau = ex.tau;
    if (constants.available) {
      in.K = constants.K;
      in.J = constants.J;
      in.C_sigma = constants.C_sigma;
    }

    json bounds;
    bounds["abs_finiteT"] = bound_abs_finiteT(in);
    bounds["dyntyp_abs"] = bound_dyntyp_abs(in);
    bounds["dyntyp_L2"] = bound_dyntyp_L2(in);
    {
      const Prop54Bound p54 = bound_prop54(in);
      bounds["prop54"] =
          json{{"b", p54.b}, {"applicable", p54.applicable}, {"value", p54.value}};
    }
    if (od.projector) {
      bounds["abs_infT"] = bound_abs_infT(in);
      bounds["abs_infT_entropy"] = bound_abs_infT_entropy(in);
      if (constants.available) {
        const FlaggedBound rv = bound_Mmunu_lower_rv(in);
        bounds["mmunu_lower_rv"] =
            json{{"value", rv.value}, {"precondition_ok", rv.precondition_ok}};
      } else {
        bounds["mmunu_lower_rv"] = json(nullptr);
      }
      const AekBounds aek = bound_aek(in);
      bounds["aek"] = json{{"lb1", aek.lb1}, {"lb2", aek.lb2}};
      const EthBounds eth = bound_eth(in, od.trace_B, od.hs_traceless);
      bounds["eth"] = json{{"MmuB", eth.MmuB},
                           {"Mmunu", eth.Mmunu},
                           {"relative_entropy", eth.relative_entropy},
                           {"relative_dimension", eth.relative_dimension}};
    } else {
      bounds["abs_infT"] = json(nullptr);
      bounds["abs_infT_entropy"] = json(nullptr);
      bounds["mmunu_lower_rv"] = json(nullptr);
      bounds["aek"] = json(nullptr);
      bounds["eth"] = json(nullptr);
    }
    // Evaluators needing K, J or C_σ are skipped when σ_- = 0 leaves those
    // constants undefined.
    if (constants.available) {
      bounds["mmub_lower"] = bound_MmuB_lower(in);
      bounds["lb_b_psi"] = bound_LB_B_psi(in);
      if (od.projector) {
        const RelativeGntBounds rel = bound_relative_gnt(in);
        bounds["relative"] = json{{"dimension_form", rel.dimension_form},
                                  {"entropy_form", rel.entropy_form},
                                  {"entropy_form_as_dim", rel.entropy_form_as_dim}};
        const ComparativeBounds cmp = bound_comparative(in);
        bounds["comparative"] = json{{"pointwise_entropy", cmp.pointwise_entropy},
                                     {"pointwise_dimension", cmp.pointwise_dimension},
                                     {"L2_entropy", cmp.L2_entropy},
                                     {"L2_dimension", cmp.L2_dimension}};
      } else {
        bounds["relative"] = json(nullptr);
        bounds["comparative"] = json(nullptr);
      }
    } else {
      bounds["mmub_lower"] = json(nullptr);
      bounds["lb_b_psi"] = json(nullptr);
      bounds["relative"] = json(nullptr);
      bounds["comparative"] = json(nullptr);
    }

    // Empirical side: transition matrix, M_muB, and per-state error series.
    const MMatrix M = compute_M_matrix(sd, decomp, tol);
    double MmuB_emp = 0.0;
    bool block_form = M.block_form;
    if (od.projector) {
      MmuB_emp = M.entries(ex.initial_macro, od.nu);
    } else {
      const ScalarResult res = compute_M_muB(sd, decomp, ex.initial_macro, *ex.B_file, tol);
      MmuB_emp = res.value;
      block_form = block_form || res.block_form;
    }
    std::vector<double> wcurve =
        od.projector ? ensemble_curve_w(sd, decomp, ex.initial_macro, od.nu, times)
                     : ensemble_curve_w(sd, decomp, ex.initial_macro, *ex.B_file, times);

    json states = json::array();
    for (int j = 0; j < ex.initial_states; ++j) {
      const std::uint64_t sseed = ex.state_seed(k, j);
      r.seeds.push_back(sseed);
      const State psi0 = sample_unit_state(decomp, ex.initial_macro, sseed);
      const Trajectory traj =
          trajectory(sd, decomp, psi0, times, od.projector ? nullptr : &*ex.B_file);
      std::vector<double> series(times.size());
      for (std::size_t i = 0; i < times.size(); ++i)
        series[i] = od.projector ? traj.weights(static_cast<Eigen::Index>(i), od.nu)
                                 : traj.observable[i];
      double MpsiB = 0.0;
      if (od.projector) {
        MpsiB = asymptotic_weights(sd, decomp, psi0, tol).weights[static_cast<std::size_t>(od.nu)];
      } else {
        MpsiB = compute_M_psiB(sd, psi0, *ex.B_file, tol).value;
      }

      const ErrorSeries abs_err =
          error_series(series, std::vector<double>{MmuB_emp}, ErrorMode::absolute);
      const ErrorSeries rel_err =
          error_series(series, std::vector<double>{MmuB_emp}, ErrorMode::relative, MmuB_emp);
      const ErrorSeries comp_err = error_series(series, wcurve, ErrorMode::comparative, MpsiB);

      std::string csv = "t,value,reference,abs_err,rel_err,comp_err\n";
      for (std::size_t i = 0; i < times.size(); ++i) {
        csv += fmt(times[i]);
        csv += ',';
        csv += fmt(series[i]);
        csv += ',';
        csv += fmt(wcurve[i]);
        csv += ',';
        csv += fmt(abs_err.values[i]);
        csv += ',';
        csv += fmt(rel_err.values[i]);
        csv += ',';
        csv += fmt(comp_err.values[i]);
        csv += '\n';
      }
      r.files.push_back(
          {"errors_t" + std::to_string(k) + "_s" + std::to_string(j) + ".csv", std::move(csv)});

      json fractions;
      fractions["abs_le_finiteT"] = most_t_fraction(abs_err, bounds["abs_finiteT"].get<double>());
      fractions["abs_le_dyntyp"] = most_t_fraction(abs_err, bounds["dyntyp_abs"].get<double>());
      if (od.projector)
        fractions["abs_le_infT"] = most_t_fraction(abs_err, bounds["abs_infT"].get<double>());
      else
        fractions["abs_le_infT"] = json(nullptr);
      if (constants.available && od.projector)
        fractions["rel_le_gnt"] =
            most_t_fraction(rel_err, bounds["relative"]["dimension_form"].get<double>());
      else
        fractions["rel_le_gnt"] = json(nullptr);
      if (constants.available && od.projector)
        fractions["comp_le_pointwise"] =
            most_t_fraction(comp_err, bounds["comparative"]["pointwise_dimension"].get<double>());
      else
        fractions["comp_le_pointwise"] = json(nullptr);

      states.push_back(json{{"state", j},
                            {"seed", sseed},
                            {"M_psiB", MpsiB},
                            {"mean_abs_err", [&] {
                               double s = 0.0;
                               for (double v : abs_err.values) s += v;
                               return s / static_cast<double>(abs_err.values.size());
                             }()},
                            {"fractions", fractions}});
    }

    std::vector<double> m_row(static_cast<std::size_t>(m));
    for (int nu = 0; nu < m; ++nu) m_row[static_cast<std::size_t>(nu)] = M.entries(ex.initial_macro, nu);
    r.report = json{{"trial", k},
                    {"hamiltonian_seed", hseed},
                    {"block_form", block_form},
                    {"mean_gap", sd.mean_gap()},
                    {"T", times.back()},
                    {"diagnostics",
                     json{{"D_E", diag.D_E},
                          {"D_G", diag.D_G},
                          {"G_kappa", Gk},
                          {"min_gap", diag.min_gap},
                          {"resonance_free", diag.resonance_free}}},
                    {"m_row", m_row},
                    {"M_muB", MmuB_emp},
                    {"bounds", bounds},
                    {"states", states}};
    r.seconds = elapsed_s(t0);
  });

  CommandOutput out;
  json trials = json::array();
  for (auto& r : results) {
    trials.push_back(std::move(r.report));
    for (auto& f : r.files) out.files.push_back(std::move(f));
    out.state_seeds.push_back(std::move(r.seeds));
    out.trial_seconds.push_back(r.seconds);
  }
  out.report = json{{"command", "bounds"},
                    {"D", ex.D},
                    {"dims", ex.dims},
                    {"initial_macro", ex.initial_macro + 1},
                    {"observable", od.to_json()},
                    {"eps", ex.eps},
                    {"delta", ex.delta},
                    {"eps_prime", ex.eps_prime},
                    {"kappa", ex.kappa},
                    {"xi", ex.xi},
                    {"tau", ex.tau},
                    {"entropy", json{{"N", ex.entropy.N}, {"kB", ex.entropy.kB}}},
                    {"constants", constants.to_json()},
                    {"trials", trials}};
  return out;
}

CommandOutput run_dyson(const Experiment& ex) {
  const Eigen::MatrixXd S = ex.profile.dense_sigma2();
  json dyson_cfg = json::object();
  if (ex.cfg.contains("dyson")) {
    dyson_cfg = ex.cfg["dyson"];
    require(dyson_cfg.is_object(), errc::config, "config: \"dyson\" must be an object");
  }
  DysonOptions opts;
  opts.tol = num_or(dyson_cfg, "tol", 1e-10);
  opts.max_iter = static_cast<int>(int_or(dyson_cfg, "max_iter", 200000));
  opts.damping = num_or(dyson_cfg, "damping", 0.5);

  std::vector<std::complex<double>> zs;
  if (dyson_cfg.contains("z")) {
    const json& jz = dyson_cfg["z"];
    require(jz.is_array() && !jz.empty(), errc::config,
            "config: dyson \"z\" must be a nonempty array of [re, im] pairs");
    for (const auto& p : jz) {
      require(p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number(), errc::config,
              "config: dyson \"z\" must be a nonempty array of [re, im] pairs");
      zs.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
  } else {
    zs.emplace_back(0.0, 1.0);
  }

  std::string csv = "z_re,z_im,i,m_re,m_im,residual\n";
  json sols = json::array();
  for (const auto& z : zs) {
    const DysonSolution sol = solve_dyson(S, z, opts);
    for (int i = 0; i < ex.D; ++i) {
      csv += fmt(z.real());
      csv += ',';
      csv += fmt(z.imag());
      csv += ',';
      csv += std::to_string(i);
      csv += ',';
      csv += fmt(sol.m(i).real());
      csv += ',';
      csv += fmt(sol.m(i).imag());
      csv += ',';
      csv += fmt(sol.residual);
      csv += '\n';
    }
    const std::complex<double> mean = sol.m.mean();
    sols.push_back(json{{"z", json::array({z.real(), z.imag()})},
                        {"iterations", sol.iterations},
                        {"residual", sol.residual},
                        {"m_mean", json::array({mean.real(), mean.imag()})}});
  }

  json prim(nullptr);
  if (dyson_cfg.contains("primitivity")) {
    const json& jp = dyson_cfg["primitivity"];
    require(jp.is_object(), errc::config, "config: dyson \"primitivity\" must be an object");
    const int L = static_cast<int>(int_or(jp, "L", 1));
    const double p = num_or(jp, "p", 1.0);
    prim = json{{"L", L}, {"p", p}, {"ok", uniform_primitivity_check(S, L, p)}};
  }

  CommandOutput out;
  out.files.push_back({"dyson.csv", std::move(csv)});
  out.report = json{{"command", "dyson"},
                    {"D", ex.D},
                    {"tol", opts.tol},
                    {"damping", opts.damping},
                    {"solutions", sols},
                    {"primitivity", prim}};
  out.state_seeds.emplace_back();
  out.trial_seconds.push_back(0.0);
  return out;
}

CommandOutput run_eth(const Experiment& ex) {
  const MacroDecomposition decomp = ex.decomposition();
  const EnsembleSpec spec = ex.ensemble();
  const ObservableData od = observable_data(ex);

  struct TrialResult {
    json report;
    std::string csv_row;
    double seconds = 0.0;
  };
  std::vector<TrialResult> results(static_cast<std::size_t>(ex.trials));

  parallel_for(ex.trials, ex.threads, [&](int k) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult& r = results[static_cast<std::size_t>(k)];
    const std::uint64_t hseed = ex.hamiltonian_seed(k);
    const SpectralData sd = diagonalize(sample_hamiltonian(spec, hseed));

    double stat = 0.0;
    if (od.projector) {
      // stat = max |⟨φ_i|P_ν|φ_j⟩ − (d_ν/D)δ_ij| straight from the overlap
      // block, without materializing the projector.
      const auto block =
          sd.eigenvectors.block(decomp.offset(od.nu), 0, decomp.dim(od.nu), sd.dim());
      Eigen::MatrixXcd A = block.adjoint() * block;
      A.diagonal().array() -= static_cast<double>(decomp.dim(od.nu)) / ex.D;
      stat = A.cwiseAbs().maxCoeff();
    } else {
      stat = eth_statistic(sd, *ex.B_file).stat;
    }
    const double threshold = std::pow(static_cast<double>(ex.D), ex.xi) / ex.D * od.hs_traceless;
    const bool pass = stat <= threshold;
    r.csv_row = std::to_string(k) + "," + std::to_string(hseed) + "," + fmt(stat) + "," +
                fmt(threshold) + "," + (pass ? "1" : "0") + "\n";
    r.report = json{{"trial", k},
                    {"hamiltonian_seed", hseed},
                    {"stat", stat},
                    {"threshold", threshold},
                    {"pass", pass}};
    r.seconds = elapsed_s(t0);
  });

  CommandOutput out;
  std::string csv = "trial,seed,stat,threshold,pass\n";
  json trials = json::array();
  int pass_count = 0;
  for (auto& r : results) {
    csv += r.csv_row;
    if (r.report["pass"].get<bool>()) ++pass_count;
    trials.push_back(std::move(r.report));
    out.state_seeds.emplace_back();
    out.trial_seconds.push_back(r.seconds);
  }
  out.files.push_back({"eth.csv", std::move(csv)});
  out.report = json{{"command", "eth"},
                    {"D", ex.D},
                    {"dims", ex.dims},
                    {"observable", od.to_json()},
                    {"xi", ex.xi},
                    {"pass_count", pass_count},
                    {"total", ex.trials},
                    {"trials", trials}};
  return out;
}

} // namespace

std::string run_command(const std::string& command, const std::string& config_json,
                        const RunOverrides& overrides) {
  const auto t0 = std::chrono::steady_clock::now();
  const Experiment ex = build_experiment(command, config_json, overrides);

  CommandOutput out;
  if (command == "simulate")
    out = run_simulate(ex);
  else if (command == "mmatrix")
    out = run_mmatrix(ex);
  else if (command == "deloc")
    out = run_deloc(ex);
  else if (command == "bounds")
    out = run_bounds(ex);
  else if (command == "dyson")
    out = run_dyson(ex);
  else if (command == "eth")
    out = run_eth(ex);
  else
    fail(errc::config, "unknown command \"" + command +
                           "\" (expected simulate|mmatrix|deloc|bounds|dyson|eth)");

  std::string out_dir = overrides.out_dir ? *overrides.out_dir : str_or(ex.cfg, "output_dir", "out");
  std::error_code fs_err;
  fs::create_directories(out_dir, fs_err);
  require(!fs_err, errc::io, "cannot create output directory " + out_dir + ": " + fs_err.message());

  // manifest: everything needed to reproduce and to audit the seed streams.
  json seed_table = json::array();
  for (std::size_t k = 0; k < out.state_seeds.size(); ++k) {
    seed_table.push_back(json{{"trial", k},
                              {"hamiltonian", ex.hamiltonian_seed(static_cast<int>(k))},
                              {"states", out.state_seeds[k]}});
  }
  std::vector<std::string> names{"manifest.json", "report.json"};
  for (const auto& f : out.files) names.push_back(f.name);
  std::sort(names.begin(), names.end());
  // The thread count is deliberately absent: output bytes are identical for
  // any thread count, and the manifest is part of that contract. The count
  // used is recorded in timings.json instead.
  json manifest{{"command", command},
                {"version", TYPLAB_VERSION_STRING},
                {"config_sha256", sha256_hex(config_json)},
                {"master_seed", ex.master_seed},
                {"trial_seeds", seed_table},
                {"outputs", names}};

  auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir) / name;
    std::ofstream f(path, std::ios::binary);
    require(f.good(), errc::io, "cannot open output file " + path.string());
    f << content;
    f.close();
    require(f.good(), errc::io, "failed writing output file " + path.string());
  };

  for (const auto& f : out.files) write_file(f.name, f.content);
  write_file("report.json", out.report.dump(2) + "\n");
  write_file("manifest.json", manifest.dump(2) + "\n");
  // Wall-clock timings: deliberately excluded from the determinism contract
  // (and from the manifest's "outputs" list).
  json timings{{"total_seconds", elapsed_s(t0)},
               {"trial_seconds", out.trial_seconds},
               {"threads", ex.threads}};
  write_file("timings.json", timings.dump(2) + "\n");
  return out_dir;
}

// ---------------------------------------------------------------- schemas

namespace {

std::string json_type_name(const json& v) {
  if (v.is_object()) return "object";
  if (v.is_array()) return "array";
  if (v.is_string()) return "string";
  if (v.is_boolean()) return "boolean";
  if (v.is_null()) return "null";
  if (v.is_number_integer()) return "integer";
  return "number";
}

bool matches_type(const json& v, const std::string& t) {
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  return json_type_name(v) == t;
}

std::string validate_node(const json& inst, const json& schema, const std::string& path) {
  if (!schema.is_object()) return path + ": schema node must be an object";
  if (schema.contains("const")) {
    if (inst != schema["const"]) return path + ": value does not match const";
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"])
      if (inst == v) found = true;
    if (!found) return path + ": value not in enum";
  }
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = matches_type(inst, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& name : t)
        if (name.is_string() && matches_type(inst, name.get<std::string>())) ok = true;
    }
    if (!ok) return path + ": expected type " + t.dump() + ", got " + json_type_name(inst);
  }
  if (schema.contains("required") && inst.is_object()) {
    for (const auto& key : schema["required"]) {
      if (!key.is_string()) continue;
      if (!inst.contains(key.get<std::string>()))
        return path + ": missing required member \"" + key.get<std::string>() + "\"";
    }
  }
  if (schema.contains("properties") && inst.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it) {
      if (inst.contains(it.key())) {
        const std::string err = validate_node(inst[it.key()], it.value(), path + "/" + it.key());
        if (!err.empty()) return err;
      }
    }
  }
  if (schema.contains("items") && inst.is_array()) {
    std::size_t i = 0;
    for (const auto& el : inst) {
      const std::string err =
          validate_node(el, schema["items"], path + "/" + std::to_string(i));
      if (!err.empty()) return err;
      ++i;
    }
  }
  return "";
}

} // namespace

std::string validate_against_schema(const std::string& instance_json,
                                    const std::string& schema_json) {
  json inst, schema;
  try {
    inst = json::parse(instance_json);
  } catch (const json::parse_error& e) {
    return std::string("instance is not valid JSON: ") + e.what();
  }
  try {
    schema = json::parse(schema_json);
  } catch (const json::parse_error& e) {
    return std::string("schema is not valid JSON: ") + e.what();
  }
  return validate_node(inst, schema, "$");
}

const char* version() { return TYPLAB_VERSION_STRING; }

} // namespace typlab::runner
