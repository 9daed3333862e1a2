#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "kwh/config.hpp"
#include "kwh/csv.hpp"
#include "kwh/report.hpp"

using namespace kwh;
namespace fs = std::filesystem;

namespace {

const std::string kExample32Config = R"({
  "grid": { "sizes": [64] },
  "window": { "kind": "indicator", "start": 0, "length": 8, "normalize": true },
  "frequencies": { "kind": "lattice", "step": 8.0, "count": 8 },
  "shifts": { "kind": "generator", "matrix": [[8]] },
  "operator_k": { "kind": "translation", "shift": [3] },
  "operator_u": { "kind": "fourier_diagonal", "seed": 7, "unitary": true },
  "seed": 1
})";

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "kwh_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(KWH_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

}  // namespace

TEST_CASE("parse_config: full round trip of the shipped example") {
  const ExperimentConfig cfg =
      parse_config(Json::parse(kExample32Config), kExample32Config);
  CHECK(cfg.grid.sizes == std::vector<long>{64});
  CHECK(cfg.window.kind == "indicator");
  CHECK(cfg.window.length == 8);
  CHECK(cfg.window.normalize);
  CHECK(cfg.frequencies.kind == "lattice");
  CHECK(cfg.frequencies.lattice_count == 8);
  CHECK(cfg.operator_k.kind == "translation");
  CHECK(cfg.operator_k.shift == std::vector<long>{3});
  REQUIRE(cfg.operator_u.has_value());
  CHECK(cfg.operator_u->unitary);
  CHECK(cfg.seed == 1);
  CHECK(cfg.rank_threshold == 1e-10);

  // the built system is the unit-interval orthonormal basis
  const GaborSystem system = build_system(cfg);
  CHECK(system.num_atoms() == 64);
  CHECK(system.window.norm() == doctest::Approx(1.0));
  const auto [a, b] = ordinary_frame_bounds(frame_operator(atoms(system)));
  CHECK(a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(b == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("parse_config: unknown keys and bad values are rejected") {
  Json j = Json::parse(kExample32Config);
  j["extra"] = 1;
  CHECK_THROWS_AS(parse_config(j, ""), ConfigError);

  Json bad_window = Json::parse(kExample32Config);
  bad_window["window"]["typo"] = true;
  CHECK_THROWS_AS(parse_config(bad_window, ""), ConfigError);

  Json bad_kind = Json::parse(kExample32Config);
  bad_kind["window"]["kind"] = "hamming";
  CHECK_THROWS_AS(parse_config(bad_kind, ""), ConfigError);

  Json bad_grid = Json::parse(kExample32Config);
  bad_grid["grid"]["sizes"] = Json::array({0});
  CHECK_THROWS_AS(parse_config(bad_grid, ""), ConfigError);

  Json bad_tol = Json::parse(kExample32Config);
  bad_tol["tolerances"] = Json{{"psd_tolerance", 1e-8}};
  CHECK_THROWS_AS(parse_config(bad_tol, ""), ConfigError);
}

TEST_CASE("config_hash: stable under identical input, moves with the seed") {
  ExperimentConfig a =
      parse_config(Json::parse(kExample32Config), kExample32Config);
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("load_config: missing file and malformed json") {
  CHECK_THROWS_AS(load_config("/nonexistent/kwh.json"), ConfigError);
  const fs::path broken = write_file("broken.json", "{ not json");
  CHECK_THROWS_AS(load_config(broken.string()), ConfigError);
}

TEST_CASE("report serialization: structure and timing-free determinism") {
  VerificationReport report;
  report.environment = Json{{"grid", {8}}, {"seed", 1}};
  run_check(report, "alpha", "Prop 3.3", true,
            [](CheckRecord& rec) { rec.pass = true; rec.margin = 0.5; });
  run_check(report, "beta", "Thm 3.8 Eq (3.8)", false,
            [](CheckRecord& rec) { rec.pass = false; });
  run_check(report, "gamma", "Thm 2.3", true,
            [](CheckRecord&) { throw Error("boom"); });

  CHECK(report.pass_count() == 1);
  CHECK(report.fail_count() == 2);
  CHECK(report.required_failures());  // gamma is required and failed

  const Json j = Json::parse(report.serialize());
  REQUIRE(j.contains("environment"));
  REQUIRE(j.contains("checks"));
  REQUIRE(j.contains("summary"));
  CHECK(j["checks"].size() == 3);
  CHECK(j["checks"][0]["check"] == "alpha");
  CHECK(j["checks"][0]["verdict"] == "pass");
  CHECK(j["checks"][1]["required"] == false);
  CHECK(j["checks"][2]["verdict"] == "fail");
  CHECK(j["checks"][2]["detail"].get<std::string>().find("boom") !=
        std::string::npos);
  CHECK(j["summary"]["pass"] == 1);
  CHECK(j["summary"]["fail"] == 2);

  // without timing the serialization is reproducible byte for byte
  CHECK(report.serialize(false) == report.serialize(false));
  CHECK(report.serialize(false).find("elapsed_ms") == std::string::npos);
}

TEST_CASE("csv: signal and matrix round trips, error paths") {
  const fs::path sig =
      write_file("sig.csv", "re,im\n1.0,0.0\n0.5,-2.0\n");
  const ComplexVector v = read_signal_csv(sig.string());
  REQUIRE(v.size() == 2);
  CHECK(v(1) == std::complex<double>(0.5, -2.0));

  const fs::path mat =
      write_file("mat.csv", "row,col,re,im\n0,0,1.0,0.0\n1,2,0.0,3.0\n");
  const ComplexMatrix m = read_matrix_csv(mat.string(), 2, 3);
  CHECK(m(0, 0) == std::complex<double>(1.0, 0.0));
  CHECK(m(1, 2) == std::complex<double>(0.0, 3.0));
  CHECK(m(1, 1) == std::complex<double>(0.0, 0.0));

  const fs::path bad = write_file("bad.csv", "1.0\n");
  CHECK_THROWS_AS(read_signal_csv(bad.string()), ConfigError);
  const fs::path oob = write_file("oob.csv", "5,0,1.0,0.0\n");
  CHECK_THROWS_AS(read_matrix_csv(oob.string(), 2, 2), ConfigError);
}

TEST_CASE("cli: exit codes reflect verdicts and config errors") {
  const fs::path good = write_file("example32.json", kExample32Config);
  CHECK(run_cli("analyze --config " + good.string()) == 0);
  CHECK(run_cli("verify --config " + good.string() + " --all") == 0);
  CHECK(run_cli("verify --config " + good.string() + " douglas bessel") == 0);

  // zero window: surfaced as a failed required check, not a config error
  const fs::path zeros = write_file("zeros.csv", [] {
    std::string text = "re,im\n";
    for (int i = 0; i < 16; ++i) text += "0.0,0.0\n";
    return text;
  }());
  std::string zero_cfg = R"({
    "grid": { "sizes": [16] },
    "window": { "kind": "csv", "path": ")" + zeros.string() + R"(" },
    "frequencies": { "kind": "integer_range", "count": 4 },
    "shifts": { "kind": "list", "values": [[0], [4]] },
    "operator_k": { "kind": "identity" }
  })";
  const fs::path degenerate = write_file("degenerate.json", zero_cfg);
  CHECK(run_cli("analyze --config " + degenerate.string()) == 1);

  const fs::path broken = write_file("broken2.json", "{");
  CHECK(run_cli("analyze --config " + broken.string()) == 2);
  CHECK(run_cli("analyze --config /no/such/file.json") == 2);

  // thm38 needs operator_u when named explicitly, is skipped under --all
  std::string no_u = kExample32Config;
  Json trimmed = Json::parse(no_u);
  trimmed.erase("operator_u");
  const fs::path without_u = write_file("no_u.json", trimmed.dump());
  CHECK(run_cli("verify --config " + without_u.string() + " thm38") == 2);
  CHECK(run_cli("verify --config " + without_u.string() + " --all") == 0);
  CHECK(run_cli("verify --config " + good.string() + " nonsense") == 2);
  CHECK(run_cli("verify --config " + good.string()) == 2);

  CHECK(run_cli("demo nonsense") == 2);
  CHECK(run_cli("nosuchcommand") == 2);
}

TEST_CASE("cli: reports and plot files land where asked") {
  const fs::path good = write_file("example32b.json", kExample32Config);
  const fs::path out = scratch_dir() / "report.json";
  const fs::path plots = scratch_dir() / "plots";
  CHECK(run_cli("analyze --config " + good.string() + " --out " +
                out.string()) == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  const Json j = Json::parse(in);
  CHECK(j["environment"]["grid"] == Json::array({64}));
  CHECK(j["environment"].contains("config_hash"));
  bool found = false;
  for (const auto& rec : j["checks"])
    if (rec["check"] == "kframe_bounds" && rec["verdict"] == "pass")
      found = true;
  CHECK(found);

  CHECK(run_cli("demo example32 --plot-dir " + plots.string()) == 0);
  for (const char* name : {"spectrum.csv", "periodization.csv",
                           "coefficients.csv"}) {
    std::ifstream plot(plots / name);
    REQUIRE(plot.good());
    std::string header;
    std::getline(plot, header);
    CHECK(header.find(',') != std::string::npos);
  }

  CHECK(run_cli("suite --size-cap 8 --out " +
                (scratch_dir() / "suite.json").string()) == 0);
}
