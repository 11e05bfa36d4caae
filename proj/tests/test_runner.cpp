#include <doctest/doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "typlab/common.hpp"
#include "typlab/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using typlab::Error;
using typlab::errc;
using typlab::runner::RunOverrides;
using typlab::runner::run_command;
using typlab::runner::validate_against_schema;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "cannot open ", p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  const std::string all = slurp(p);
  return all.substr(0, all.find('\n'));
}

// Fresh scratch directory per label; removed up front so reruns start clean.
fs::path scratch(const std::string& label) {
  const fs::path dir = fs::temp_directory_path() / ("typlab_runner_" + label);
  fs::remove_all(dir);
  return dir;
}

errc thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return errc::ok;
}

const std::string kSmallConfig = R"({
  "dims": [4, 8],
  "profile": {"kind": "constant", "sigma2": 1.0},
  "seed": 7,
  "trials": 2,
  "time_grid": {"window": "early", "steps": 16}
})";

#ifndef TYPLAB_SOURCE_DIR
#error "TYPLAB_SOURCE_DIR must be defined by the build"
#endif
#ifndef TYPLAB_CLI_PATH
#error "TYPLAB_CLI_PATH must be defined by the build"
#endif

std::string schema_text(const std::string& name) {
  return slurp(fs::path(TYPLAB_SOURCE_DIR) / "schemas" / name);
}

// Run the CLI binary with a shell command line; returns the exit code.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(TYPLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

} // namespace

TEST_SUITE("runner") {

TEST_CASE("identical config and seed give byte-identical artifacts at any thread count") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  RunOverrides ova;
  ova.out_dir = a.string();
  ova.threads = 1;
  RunOverrides ovb;
  ovb.out_dir = b.string();
  ovb.threads = 4;
  run_command("simulate", kSmallConfig, ova);
  run_command("simulate", kSmallConfig, ovb);
  for (const char* name :
       {"report.json", "manifest.json", "trajectory_t0_s0.csv", "trajectory_t1_s0.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
  // timings.json exists but is outside the determinism contract.
  CHECK(fs::exists(a / "timings.json"));
  const json manifest = json::parse(slurp(a / "manifest.json"));
  for (const auto& entry : manifest["outputs"]) CHECK(entry.get<std::string>() != "timings.json");
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("manifest audits the run: hash, seeds, and a sorted complete output list") {
  const fs::path dir = scratch("manifest");
  RunOverrides ov;
  ov.out_dir = dir.string();
  run_command("simulate", kSmallConfig, ov);
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(validate_against_schema(manifest.dump(), schema_text("manifest.schema.json")).empty());

  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["master_seed"] == 7);
  const std::string sha = manifest["config_sha256"].get<std::string>();
  CHECK(sha.size() == 64);
  CHECK(sha.find_first_not_of("0123456789abcdef") == std::string::npos);

  REQUIRE(manifest["trial_seeds"].size() == 2);
  CHECK(manifest["trial_seeds"][0]["hamiltonian"] != manifest["trial_seeds"][1]["hamiltonian"]);
  CHECK(manifest["trial_seeds"][0]["states"].size() == 1);

  std::vector<std::string> outputs;
  for (const auto& entry : manifest["outputs"]) outputs.push_back(entry.get<std::string>());
  CHECK(std::is_sorted(outputs.begin(), outputs.end()));
  for (const auto& name : outputs) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  // Every artifact except timings.json is listed.
  std::size_t on_disk = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename() != "timings.json") ++on_disk;
  CHECK(on_disk == outputs.size());
  fs::remove_all(dir);
}

TEST_CASE("seed override takes precedence over the config") {
  const fs::path dir = scratch("seedov");
  RunOverrides ov;
  ov.out_dir = dir.string();
  ov.seed = 99;
  run_command("mmatrix", kSmallConfig, ov);
  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["master_seed"] == 99);
  fs::remove_all(dir);
}

TEST_CASE("reports validate against the shipped schemas") {
  SUBCASE("simulate with reference curves") {
    const fs::path dir = scratch("schema_sim");
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [4, 8],
      "profile": {"kind": "constant", "sigma2": 1.0},
      "seed": 3,
      "trials": 1,
      "initial_states": 2,
      "reference_curve": true,
      "time_grid": {"window": "early", "steps": 8}
    })";
    run_command("simulate", cfg, ov);
    CHECK(validate_against_schema(slurp(dir / "report.json"),
                                  schema_text("simulate.report.schema.json")).empty());
    CHECK(first_line(dir / "trajectory_t0_s0.csv") == "t,w_1,w_2");
    CHECK(first_line(dir / "trajectory_t0_s1.csv") == "t,w_1,w_2");
    CHECK(first_line(dir / "wref_t0.csv") == "t,w_1,w_2");
    fs::remove_all(dir);
  }
  SUBCASE("mmatrix") {
    const fs::path dir = scratch("schema_mm");
    RunOverrides ov;
    ov.out_dir = dir.string();
    run_command("mmatrix", kSmallConfig, ov);
    CHECK(validate_against_schema(slurp(dir / "report.json"),
                                  schema_text("mmatrix.report.schema.json")).empty());
    CHECK(first_line(dir / "mmatrix.csv") == "trial,mu,nu,M,uniform_ref,abs_dev");
    fs::remove_all(dir);
  }
  SUBCASE("deloc with ensemble constants") {
    const fs::path dir = scratch("schema_deloc");
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [6, 10],
      "profile": {"kind": "exponential-band", "s": 0.2},
      "seed": 5,
      "trials": 1,
      "j_estimate": {"method": "markov", "eta": 0.1}
    })";
    run_command("deloc", cfg, ov);
    const std::string report = slurp(dir / "report.json");
    CHECK(validate_against_schema(report, schema_text("deloc.report.schema.json")).empty());
    const json rep = json::parse(report);
    CHECK(rep["constants"].is_object()); // σ_- > 0, so constants are defined
    CHECK(first_line(dir / "deloc_t0.csv") ==
          "n,E_n,sup_norm,msm_0.125,msm_0.25,msm_0.5,gap_0.125,gap_0.25,gap_0.5");
    fs::remove_all(dir);
  }
  SUBCASE("bounds with a projector observable") {
    const fs::path dir = scratch("schema_bounds");
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [6, 10],
      "profile": {"kind": "constant", "sigma2": 1.0},
      "seed": 11,
      "trials": 1,
      "observable_macro": 2,
      "time_grid": {"window": "late", "steps": 8},
      "j_estimate": {"method": "markov", "eta": 0.1}
    })";
    run_command("bounds", cfg, ov);
    const std::string report = slurp(dir / "report.json");
    CHECK(validate_against_schema(report, schema_text("bounds.report.schema.json")).empty());
    const json rep = json::parse(report);
    CHECK(rep["observable"]["kind"] == "projector");
    CHECK(rep["trials"][0]["bounds"]["abs_infT"].is_number());
    CHECK(rep["trials"][0]["bounds"]["relative"].is_object());
    CHECK(first_line(dir / "errors_t0_s0.csv") == "t,value,reference,abs_err,rel_err,comp_err");
    fs::remove_all(dir);
  }
  SUBCASE("bounds with a file observable leaves projector-only bounds null") {
    const fs::path dir = scratch("schema_bounds_file");
    // Hermitian 16×16 observable as interleaved (re, im) CSV.
    const fs::path bcsv = fs::temp_directory_path() / "typlab_runner_B.csv";
    {
      std::ofstream f(bcsv);
      f << "# observable, interleaved complex\n";
      for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
          if (j > 0) f << ",";
          const double re = (i == j) ? (i % 3 == 0 ? 1.0 : -0.5) : 0.1;
          const double im = (i == j) ? 0.0 : (i < j ? 0.05 : -0.05);
          f << re << "," << im;
        }
        f << "\n";
      }
    }
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [6, 10],
      "profile": {"kind": "constant", "sigma2": 1.0},
      "seed": 13,
      "trials": 1,
      "observable": {"file": ")" + bcsv.string() + R"("},
      "time_grid": {"window": "late", "steps": 8},
      "j_estimate": {"method": "markov", "eta": 0.1}
    })";
    run_command("bounds", cfg, ov);
    const std::string report = slurp(dir / "report.json");
    CHECK(validate_against_schema(report, schema_text("bounds.report.schema.json")).empty());
    const json rep = json::parse(report);
    CHECK(rep["observable"]["kind"] == "file");
    CHECK(rep["trials"][0]["bounds"]["abs_infT"].is_null());
    CHECK(rep["trials"][0]["bounds"]["aek"].is_null());
    CHECK(rep["trials"][0]["bounds"]["relative"].is_null());
    CHECK(rep["trials"][0]["states"][0]["fractions"]["rel_le_gnt"].is_null());
    fs::remove_all(dir);
    fs::remove(bcsv);
  }
  SUBCASE("dyson with a z grid and primitivity check") {
    const fs::path dir = scratch("schema_dyson");
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [12],
      "profile": {"kind": "constant", "sigma2": 1.0},
      "seed": 1,
      "dyson": {"z": [[0.0, 1.0], [0.5, 2.0]], "primitivity": {"L": 1, "p": 1.0}}
    })";
    run_command("dyson", cfg, ov);
    const std::string report = slurp(dir / "report.json");
    CHECK(validate_against_schema(report, schema_text("dyson.report.schema.json")).empty());
    const json rep = json::parse(report);
    CHECK(rep["solutions"].size() == 2);
    CHECK(rep["primitivity"]["ok"] == true);
    CHECK(first_line(dir / "dyson.csv") == "z_re,z_im,i,m_re,m_im,residual");
    fs::remove_all(dir);
  }
  SUBCASE("eth") {
    const fs::path dir = scratch("schema_eth");
    RunOverrides ov;
    ov.out_dir = dir.string();
    const std::string cfg = R"({
      "dims": [8, 8],
      "profile": {"kind": "constant", "sigma2": 1.0},
      "seed": 17,
      "trials": 2,
      "observable_macro": 1,
      "xi": 0.3
    })";
    run_command("eth", cfg, ov);
    const std::string report = slurp(dir / "report.json");
    CHECK(validate_against_schema(report, schema_text("eth.report.schema.json")).empty());
    const json rep = json::parse(report);
    CHECK(rep["total"] == 2);
    CHECK(first_line(dir / "eth.csv") == "trial,seed,stat,threshold,pass");
    fs::remove_all(dir);
  }
}

TEST_CASE("config mistakes are reported as config errors") {
  const fs::path dir = scratch("cfgerr");
  RunOverrides ov;
  ov.out_dir = dir.string();
  CHECK(thrown_code([&] { run_command("mmatrix", R"({"profile":{"kind":"constant"}})", ov); }) ==
        errc::config);
  CHECK(thrown_code([&] {
          run_command("mmatrix", R"({"dims":[4],"profile":{"kind":"wavelet"}})", ov);
        }) == errc::config);
  CHECK(thrown_code([&] { run_command("laundry", kSmallConfig, ov); }) == errc::config);
  CHECK(thrown_code([&] {
          run_command("simulate",
                      R"({"dims":[4,4],"profile":{"kind":"constant","sigma2":1.0},
                          "time_grid":{"window":"noon"}})",
                      ov);
        }) == errc::config);
  CHECK(thrown_code([&] {
          run_command("simulate",
                      R"({"dims":[4,4],"profile":{"kind":"constant","sigma2":1.0},
                          "initial_macro":3})",
                      ov);
        }) == errc::config);
  CHECK(thrown_code([&] { run_command("mmatrix", "{ not json", ov); }) == errc::config);
  CHECK(thrown_code([&] {
          run_command("bounds",
                      R"({"dims":[4,4],"profile":{"kind":"constant","sigma2":1.0},
                          "observable":{"file":"/nonexistent/B.csv"}})",
                      ov);
        }) == errc::io);
  fs::remove_all(dir);
}

TEST_CASE("schema validator subset semantics") {
  // Success: empty string.
  CHECK(validate_against_schema(R"({"a": 1})", R"({"type": "object"})").empty());
  // Type names, including the integer/number split.
  CHECK(validate_against_schema("1.5", R"({"type": "integer"})") ==
        "$: expected type \"integer\", got number");
  CHECK(validate_against_schema("2", R"({"type": "number"})").empty());
  CHECK(validate_against_schema("2.5", R"({"type": "number"})").empty());
  // Type arrays.
  CHECK(validate_against_schema("null", R"({"type": ["number", "null"]})").empty());
  CHECK(validate_against_schema(R"("x")", R"({"type": ["number", "null"]})") ==
        "$: expected type [\"number\",\"null\"], got string");
  // const and enum.
  CHECK(validate_against_schema(R"("mmatrix")", R"({"const": "mmatrix"})").empty());
  CHECK_FALSE(validate_against_schema(R"("other")", R"({"const": "mmatrix"})").empty());
  CHECK(validate_against_schema("3", R"({"enum": [1, 2, 3]})").empty());
  CHECK_FALSE(validate_against_schema("4", R"({"enum": [1, 2, 3]})").empty());
  // required reports the missing member.
  CHECK(validate_against_schema(R"({"a": 1})",
                                R"({"type": "object", "required": ["a", "b"]})") ==
        "$: missing required member \"b\"");
  // properties and items produce path-qualified messages.
  CHECK(validate_against_schema(
            R"({"outer": {"inner": "s"}})",
            R"({"properties": {"outer": {"properties": {"inner": {"type": "number"}}}}})") ==
        "$/outer/inner: expected type \"number\", got string");
  CHECK(validate_against_schema(R"([1, "x", 3])", R"({"items": {"type": "integer"}})") ==
        "$/1: expected type \"integer\", got string");
  // Extra members are allowed (subset validation).
  CHECK(validate_against_schema(R"({"a": 1, "extra": true})",
                                R"({"type": "object", "required": ["a"]})").empty());
  // Parse failures are reported, not thrown.
  CHECK(validate_against_schema("{ bad", R"({"type": "object"})").rfind("instance is not", 0) == 0);
  CHECK(validate_against_schema("{}", "[ bad").rfind("schema is not", 0) == 0);
}

TEST_CASE("cli: exit codes and artifacts") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  {
    std::ofstream f(cfg);
    f << kSmallConfig;
  }

  SUBCASE("successful run writes artifacts and exits 0") {
    const fs::path out = dir / "out";
    CHECK(run_cli("mmatrix --config " + cfg.string() + " --out " + out.string() +
                  " --seed 5 --threads 2") == 0);
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "mmatrix.csv"));
    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["master_seed"] == 5);
  }
  SUBCASE("byte-identical output through the CLI regardless of --threads") {
    const fs::path out1 = dir / "t1";
    const fs::path out3 = dir / "t3";
    CHECK(run_cli("mmatrix --config " + cfg.string() + " --out " + out1.string() +
                  " --threads 1") == 0);
    CHECK(run_cli("mmatrix --config " + cfg.string() + " --out " + out3.string() +
                  " --threads 3") == 0);
    CHECK(slurp(out1 / "mmatrix.csv") == slurp(out3 / "mmatrix.csv"));
    CHECK(slurp(out1 / "report.json") == slurp(out3 / "report.json"));
    CHECK(slurp(out1 / "manifest.json") == slurp(out3 / "manifest.json"));
  }
  SUBCASE("usage errors exit 2") {
    CHECK(run_cli("") == 2);                                            // no subcommand
    CHECK(run_cli("mmatrix") == 2);                                     // missing --config
    CHECK(run_cli("mmatrix --config /no/such/file.json") == 2);         // nonexistent file
    CHECK(run_cli("mmatrix --config " + cfg.string() + " --threads 0") == 2); // out of range
  }
  SUBCASE("config errors exit 2") {
    const fs::path bad = dir / "bad.json";
    {
      std::ofstream f(bad);
      f << "{ not json";
    }
    CHECK(run_cli("mmatrix --config " + bad.string() + " --out " + (dir / "x").string()) == 2);
    const fs::path missing_dims = dir / "missing_dims.json";
    {
      std::ofstream f(missing_dims);
      f << R"({"profile": {"kind": "constant", "sigma2": 1.0}})";
    }
    CHECK(run_cli("simulate --config " + missing_dims.string() + " --out " +
                  (dir / "y").string()) == 2);
  }
  SUBCASE("numerical failures exit 3") {
    const fs::path hard = dir / "hard.json";
    {
      std::ofstream f(hard);
      f << R"({
        "dims": [16],
        "profile": {"kind": "constant", "sigma2": 1.0},
        "dyson": {"z": [[0.0, 0.001]], "tol": 1e-12, "max_iter": 2}
      })";
    }
    CHECK(run_cli("dyson --config " + hard.string() + " --out " + (dir / "z").string()) == 3);
  }
  SUBCASE("--version exits 0") { CHECK(run_cli("--version") == 0); }
  fs::remove_all(dir);
}

} // TEST_SUITE
