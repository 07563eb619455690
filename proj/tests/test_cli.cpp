#include "trmcf/errors.hpp"
#include "trmcf/experiment.hpp"
#include "trmcf/trmcf.h"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace trmcf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  static const fs::path root = [] {
    auto d = fs::temp_directory_path() / "trmcf_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return root / name;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string small_flat(const fs::path& out, double t_max = 0.01) {
  std::ostringstream os;
  os << "# small perturbed flat torus\n"
     << "preset.name = flat_lagrangian_torus\n"
     << "preset.epsilon = 0.02\n"
     << "grid.resolution = 16\n"
     << "flow.cfl = 0.2\n"
     << "flow.t_max = " << t_max << "\n"
     << "flow.diag_stride = 5\n"
     << "flow.eig_stride = 10\n"
     << "output.dir = " << out.string() << "\n";
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRMCF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ExperimentConfig c = parse_config("preset.name = flat_lagrangian_torus\n");
  CHECK(c.preset.resolution == 64);
  CHECK(c.preset.fd_order == 4);
  CHECK(c.ambient_kind == AmbientKind::FlatTorus);
  CHECK(c.flow.cfl == doctest::Approx(0.05));
  CHECK(c.output_dir == "out");
  CHECK(c.ladder == std::vector<int>{32, 64, 128});
  CHECK(parse_config("").preset.name == "flat_lagrangian_torus");
  const ExperimentConfig cl = parse_config("preset.name = clifford_cp2\n");
  CHECK(cl.ambient_kind == AmbientKind::FubiniStudy);
}

TEST_CASE("config errors carry line numbers and name the keys") {
  const std::string cross = config_error("preset.name = clifford_cp2\nambient.kind = flat-torus\n");
  CHECK(cross.find("preset.name") != std::string::npos);
  CHECK(cross.find("ambient.kind") != std::string::npos);
  CHECK(cross.find("line 2") != std::string::npos);

  CHECK(config_error("grid.fd_order = 3\n").find("even") != std::string::npos);
  CHECK(config_error("\nfoo.bar = 1\n").find("line 2") != std::string::npos);
  CHECK(config_error("grid.resolution = abc\n").find("integer") != std::string::npos);
  CHECK(config_error("flow.cfl = 0.1\nflow.cfl = 0.2\n").find("duplicate") != std::string::npos);
  CHECK(config_error("flow.cfl = 0.9\n").find("flow.cfl") != std::string::npos);
  CHECK(config_error("grid.resolution = 4\n").find("grid.resolution") != std::string::npos);
  CHECK(config_error("preset.name = product_circles\nambient.kind = fubini-study\n").find("flat-torus") !=
        std::string::npos);
  CHECK(config_error("no equals sign\n").find("line 1") != std::string::npos);
  // Every problem is listed, not only the first.
  const std::string many = config_error("foo = 1\nbar = 2\n");
  CHECK(many.find("line 1") != std::string::npos);
  CHECK(many.find("line 2") != std::string::npos);
}

TEST_CASE("resolved text round trips") {
  const ExperimentConfig c = parse_config(small_flat("somewhere") + "suites = identities spectrum\n");
  const std::string text = resolved_text(c);
  CHECK(resolved_text(parse_config(text)) == text);
  for (const auto& [line, doc] : config_schema()) {
    CHECK(text.find(line.substr(0, line.find(" = "))) != std::string::npos);
    CHECK_FALSE(doc.empty());
  }
  ExperimentConfig o = c;
  apply_override(o, "grid.resolution", "24");
  CHECK(o.preset.resolution == 24);
  CHECK_THROWS_AS(apply_override(o, "grid.resolution", "x"), Error);
  CHECK_THROWS_AS(apply_override(o, "nope", "1"), Error);
}

TEST_CASE("run writes every artifact") {
  const fs::path out = scratch("artifacts");
  const ExperimentConfig c = parse_config(small_flat(out));
  const ExperimentOutcome o = run_experiment(c);
  REQUIRE(o.exit_code == 0);
  for (const char* f : {"config.resolved.txt", "diagnostics.csv", "certificates.jsonl", "identities.json",
                        "final.snap", "plot.gp", "summary.json"})
    CHECK(fs::exists(out / f));
  CHECK_FALSE(fs::exists(out / "blowup.json"));

  CHECK(resolved_text(load_config((out / "config.resolved.txt").string())) == resolved_text(c));

  std::istringstream csv(read_file(out / "diagnostics.csv"));
  std::string header;
  std::getline(csv, header);
  std::string expected;
  for (const auto& col : diagnostics_columns()) expected += (expected.empty() ? "" : ",") + col;
  CHECK(header == expected);
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == static_cast<int>(o.result.records.size()));

  std::istringstream jl(read_file(out / "certificates.jsonl"));
  int certs = 0;
  for (std::string line; std::getline(jl, line);) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("clauses"));
    ++certs;
  }
  CHECK(certs == static_cast<int>(o.result.certificates.size()));

  const auto ids = nlohmann::json::parse(read_file(out / "identities.json"));
  CHECK(ids.contains("initial"));
  CHECK(ids.contains("final"));
  CHECK(ids["initial"].size() >= 10);

  const ImmersionState fin = load_snapshot((out / "final.snap").string());
  CHECK(fin.points == o.result.final_state.points);
  CHECK(read_file(out / "plot.gp").find("diagnostics.csv") != std::string::npos);
  const auto summary = nlohmann::json::parse(read_file(out / "summary.json"));
  CHECK(summary["stop_reason"] == "t_max");
}

TEST_CASE("identical config and seed give a bit-identical CSV") {
  std::string text = small_flat(scratch("det_a")) + "preset.noise = 0.01\npreset.seed = 42\n";
  REQUIRE(run_experiment(parse_config(text)).exit_code == 0);
  text = small_flat(scratch("det_b")) + "preset.noise = 0.01\npreset.seed = 42\n";
  REQUIRE(run_experiment(parse_config(text)).exit_code == 0);
  text = small_flat(scratch("det_c")) + "preset.noise = 0.01\npreset.seed = 43\n";
  REQUIRE(run_experiment(parse_config(text)).exit_code == 0);
  const std::string a = read_file(scratch("det_a") / "diagnostics.csv");
  CHECK(a == read_file(scratch("det_b") / "diagnostics.csv"));
  CHECK(a != read_file(scratch("det_c") / "diagnostics.csv"));
}

TEST_CASE("blow-up exits with 3 and writes a report") {
  const fs::path out = scratch("blowup");
  const ExperimentConfig c = parse_config("preset.name = product_circles\ngrid.resolution = 16\nflow.cfl = 0.2\n"
                                          "flow.t_max = 0.6\nflow.diag_stride = 100\nflow.eig_stride = 1000\n"
                                          "output.dir = " +
                                          out.string() + "\n");
  const ExperimentOutcome o = run_experiment(c);
  CHECK(o.exit_code == 3);
  CHECK(fs::exists(out / "blowup.json"));
  const auto j = nlohmann::json::parse(read_file(out / "blowup.json"));
  CHECK(j["t"].get<double>() > 0.45);
  CHECK(j["t"].get<double>() < 0.55);
}

TEST_CASE("unwritable output directory exits with 5") {
  const fs::path blocker = scratch("blocker");
  std::ofstream(blocker) << "a file, not a directory";
  const ExperimentConfig c = parse_config(small_flat(blocker / "sub"));
  CHECK(run_experiment(c).exit_code == 5);

  // Permission-based variant; skipped for users that bypass permissions.
  const fs::path ro = scratch("readonly");
  fs::create_directories(ro);
  fs::permissions(ro, fs::perms::owner_read | fs::perms::owner_exec);
  std::ofstream probe(ro / "probe");
  const bool enforced = !probe;
  probe.close();
  if (enforced) CHECK(run_experiment(parse_config(small_flat(ro / "x"))).exit_code == 5);
  fs::permissions(ro, fs::perms::owner_all);
}

TEST_CASE("C API") {
  trmcf_config* cfg = nullptr;
  REQUIRE(trmcf_config_default(&cfg) == TRMCF_OK);
  CHECK(trmcf_config_set(cfg, "grid.resolution", "16") == TRMCF_OK);
  CHECK(trmcf_config_set(cfg, "preset.epsilon", "0.02") == TRMCF_OK);
  CHECK(trmcf_config_set(cfg, "grid.fd_order", "3") == TRMCF_ERR_CONFIG);
  CHECK(std::string(trmcf_last_error()).find("even") != std::string::npos);
  CHECK(trmcf_config_set(cfg, "bogus.key", "1") == TRMCF_ERR_CONFIG);
  CHECK(std::string(trmcf_config_resolved(cfg)).find("grid.resolution = 16") != std::string::npos);

  trmcf_state* st = nullptr;
  REQUIRE(trmcf_state_from_config(cfg, &st) == TRMCF_OK);
  CHECK(trmcf_state_node_count(st) == 256);
  CHECK(trmcf_state_real_dim(st) == 4);
  double dt = 0.0;
  CHECK(trmcf_state_step(st, cfg, &dt) == TRMCF_OK);
  CHECK(dt > 0.0);
  CHECK(trmcf_state_time(st) == doctest::Approx(dt));
  std::vector<double> pts(256 * 4);
  CHECK(trmcf_state_points(st, pts.data(), pts.size()) == TRMCF_OK);
  CHECK(trmcf_state_points(st, pts.data(), 10) == TRMCF_ERR_GENERIC);
  const auto summary = nlohmann::json::parse(trmcf_state_summary(st));
  CHECK(summary.contains("grid"));

  const std::string snap = scratch("capi.snap").string();
  CHECK(trmcf_state_save(st, snap.c_str()) == TRMCF_OK);
  trmcf_state* back = nullptr;
  REQUIRE(trmcf_state_load(snap.c_str(), &back) == TRMCF_OK);
  std::vector<double> pts2(pts.size());
  trmcf_state_points(back, pts2.data(), pts2.size());
  CHECK(pts == pts2);
  trmcf_state_free(back);
  trmcf_state_free(st);

  trmcf_state* missing = nullptr;
  CHECK(trmcf_state_load(scratch("nope.snap").string().c_str(), &missing) == TRMCF_ERR_IO);
  CHECK(missing == nullptr);

  CHECK(trmcf_preset_count() == 4);
  CHECK(std::string(trmcf_preset_name(2)) == "clifford_cp2");
  CHECK(trmcf_preset_name(99) == nullptr);
  CHECK(std::string(trmcf_preset_description(0)).size() > 10);

  CHECK(trmcf_config_set(cfg, "flow.t_max", "0.005") == TRMCF_OK);
  CHECK(trmcf_config_set(cfg, "output.dir", scratch("capi_run").string().c_str()) == TRMCF_OK);
  CHECK(trmcf_run(cfg, 1) == TRMCF_OK);
  CHECK(fs::exists(scratch("capi_run") / "summary.json"));
  trmcf_config_free(cfg);

  trmcf_config* bad = nullptr;
  CHECK(trmcf_config_parse("preset.name = clifford_cp2\nambient.kind = flat-torus\n", &bad) == TRMCF_ERR_CONFIG);
  CHECK(bad == nullptr);
  CHECK(trmcf_config_load(scratch("absent.cfg").string().c_str(), &bad) == TRMCF_ERR_CONFIG);
}

TEST_CASE("verify ladder on the flat Lagrangian torus passes at round-off") {
  const fs::path out = scratch("verify_flat");
  const ExperimentConfig c =
      parse_config("preset.name = flat_lagrangian_torus\nverify.ladder = 16 32\noutput.dir = " + out.string() + "\n");
  const ExperimentOutcome o = verify(c);
  CHECK(o.exit_code == 0);
  const auto j = nlohmann::json::parse(read_file(out / "verification.json"));
  CHECK(j["passed"] == true);
  for (const auto& e : j["identities"]) CHECK(e["passed"] == true);
}

TEST_CASE("verify ladder on the graph perturbation: orders and Clifford Ricci identity") {
  const VerificationReport r = verify_ladder(
      parse_config("preset.name = flat_lagrangian_torus\npreset.epsilon = 0.05\nverify.ladder = 32 64\n"));
  for (const auto& e : r.identities)
    for (std::size_t k = 0; k < e.orders.size(); ++k)
      if (e.residuals[k] >= kRoundoffFloor && e.residuals[k + 1] >= kRoundoffFloor) {
        INFO(e.name);
        CHECK(e.orders[k] >= 3.0);
      }
  const VerificationReport cl =
      verify_ladder(parse_config("preset.name = clifford_cp2\nverify.ladder = 16 32\n"));
  bool found = false;
  for (const auto& e : cl.identities)
    if (e.name == "ricci_contraction") {
      found = true;
      CHECK(e.passed);
      for (double v : e.residuals) CHECK(v < 1e-8);
    }
  CHECK(found);
}

TEST_CASE("command line") {
  const fs::path cfg = write_config("cli.cfg", small_flat(scratch("cli_default")));
  const fs::path out = scratch("cli_out");
  CHECK(run_cli("run --config " + cfg.string() + " --out " + out.string() + " --resolution 12 --seed 5 --quiet") == 0);
  CHECK(fs::exists(out / "diagnostics.csv"));
  CHECK_FALSE(fs::exists(scratch("cli_default")));
  CHECK(read_file(out / "config.resolved.txt").find("grid.resolution = 12") != std::string::npos);
  CHECK(read_file(out / "config.resolved.txt").find("preset.seed = 5") != std::string::npos);

  CHECK(run_cli("presets") == 0);
  CHECK(run_cli("inspect " + (out / "final.snap").string()) == 0);
  CHECK(run_cli("inspect " + scratch("missing.snap").string()) == 5);
  CHECK(run_cli("run --no-such-flag") == 2);
  CHECK(run_cli("") != 0);

  // Config errors exit 2 and leave nothing behind.
  const fs::path bad_out = scratch("cli_bad_out");
  const fs::path bad = write_config("bad.cfg", "preset.name = clifford_cp2\nambient.kind = flat-torus\noutput.dir = " +
                                                   bad_out.string() + "\n");
  CHECK(run_cli("run --config " + bad.string()) == 2);
  CHECK_FALSE(fs::exists(bad_out));
  CHECK(run_cli("run --config " + scratch("absent.cfg").string()) == 2);

  const fs::path verify_out = scratch("cli_verify");
  const fs::path vcfg = write_config("verify.cfg", "preset.name = flat_lagrangian_torus\nverify.ladder = 16 32\n");
  CHECK(run_cli("verify --config " + vcfg.string() + " --out " + verify_out.string() + " --quiet") == 0);
  CHECK(fs::exists(verify_out / "verification.json"));
}
