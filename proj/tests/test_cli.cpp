#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commons_lab/cli.hpp"

namespace fs = std::filesystem;
using commons_lab::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("commons_lab_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

int run(std::vector<std::string> args) { return commons_lab::cli::run_command(args); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("simulate writes a trajectory csv and a summary json") {
  TempDir tmp;
  const std::string stem = tmp.file("run");
  const int rc = run({"simulate", "--kind", "reward", "-r", "0.6", "-d", "0.2",
                      "--x0", "0.5", "--y0", "500", "--record-every", "1000",
                      "--out", stem});
  REQUIRE(rc == 0);
  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.rfind("t,x,y\n", 0) == 0);
  const json summary = json::parse(slurp(stem + ".json"));
  CHECK(summary.at("terminal_flag") == "converged");
  CHECK(summary.at("terminal").at("x").get<double>() == Approx(1.0).margin(1e-3));
  CHECK(summary.at("terminal").at("y").get<double>() == Approx(166.667).margin(0.5));
}

TEST_CASE("invalid initial states exit with the validation code") {
  TempDir tmp;
  CHECK(run({"simulate", "--x0", "1.5", "--out", tmp.file("x")}) == 2);
  CHECK(run({"simulate", "--y0", "-3", "--out", tmp.file("y")}) == 2);
}

TEST_CASE("numerical blow-ups exit with the failure code") {
  TempDir tmp;
  CHECK(run({"simulate", "-r", "1e300", "--t-end", "1", "--out", tmp.file("boom")}) == 3);
}

TEST_CASE("unknown subcommands and presets are validation errors") {
  TempDir tmp;
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"preset", "fig99", "--out", tmp.path.string()}) == 2);
}

TEST_CASE("equilibria reports the bistable punishment census") {
  TempDir tmp;
  const std::string stem = tmp.file("eq");
  const int rc = run({"equilibria", "--kind", "punishment", "-r", "0.6", "-d", "0.004",
                      "--out", stem});
  REQUIRE(rc == 0);
  const json report = json::parse(slurp(stem + ".json"));
  CHECK(report.at("n_fixed_points").get<int>() == 5);
  CHECK(report.at("n_stable").get<int>() == 2);
  CHECK(report.at("regime") == "moderate");
}

TEST_CASE("config files drive runs and unknown fields are rejected") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_path);
    out << R"({"kind":"punishment","params":{"growth_rate":0.6,"tax":0.004},)"
        << R"("output":{"path":")" << tmp.file("from_config") << R"(","format":"json"}})";
  }
  REQUIRE(run({"--config", cfg_path, "equilibria"}) == 0);
  const json report = json::parse(slurp(tmp.file("from_config") + ".json"));
  CHECK(report.at("n_fixed_points").get<int>() == 5);

  {
    std::ofstream out(cfg_path);
    out << R"({"kind":"punishment","bogus":1})";
  }
  CHECK(run({"--config", cfg_path, "equilibria", "--out", tmp.file("z")}) == 2);

  {
    std::ofstream out(cfg_path);
    out << "{not json";
  }
  CHECK(run({"--config", cfg_path, "equilibria", "--out", tmp.file("z")}) == 2);
}

TEST_CASE("flags override config file fields") {
  TempDir tmp;
  const std::string cfg_path = tmp.file("cfg.json");
  {
    std::ofstream out(cfg_path);
    out << R"({"kind":"reward","params":{"growth_rate":0.25,"tax":0.2}})";
  }
  const std::string stem = tmp.file("override");
  REQUIRE(run({"--config", cfg_path, "equilibria", "-r", "1.0", "--out", stem}) == 0);
  const json report = json::parse(slurp(stem + ".json"));
  CHECK(report.at("regime") == "rapid");
  CHECK(report.at("params").at("growth_rate").get<double>() == 1.0);
}

TEST_CASE("dumped configs re-parse to the identical document") {
  TempDir tmp;
  const std::string dump1 = tmp.file("dump1.json");
  const std::string dump2 = tmp.file("dump2.json");
  REQUIRE(run({"--dump-config", dump1, "simulate", "--kind", "punishment", "-r", "0.9",
               "-d", "0.003", "--x0", "0.2", "--t-end", "123.5"}) == 0);
  REQUIRE(run({"--config", dump1, "--dump-config", dump2, "simulate"}) == 0);
  CHECK(slurp(dump1) == slurp(dump2));
  const json doc = json::parse(slurp(dump1));
  CHECK(doc.at("kind") == "punishment");
  CHECK(doc.at("initial").at("x").get<double>() == 0.2);
  CHECK(doc.at("integrator").at("t_end").get<double>() == 123.5);
}

TEST_CASE("sweep emits one row per grid point and tracks regime changes") {
  TempDir tmp;
  const std::string stem = tmp.file("sweep");

  SECTION("single-point sweep") {
    REQUIRE(run({"sweep", "--axis", "r:0.6", "--out", stem}) == 0);
    const std::string csv = slurp(stem + ".csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
  }
  SECTION("growth-rate sweep crosses all three regimes") {
    REQUIRE(run({"sweep", "--kind", "reward", "-d", "0.04", "--axis", "r:0.1:1.4:14",
                 "--out", stem}) == 0);
    const std::string csv = slurp(stem + ".csv");
    CHECK(csv.find("slow") != std::string::npos);
    CHECK(csv.find("moderate") != std::string::npos);
    CHECK(csv.find("rapid") != std::string::npos);
  }
  SECTION("tax sweep at rapid growth switches the stable attractor") {
    REQUIRE(run({"sweep", "--kind", "reward", "-r", "1.0", "--axis",
                 "delta:0.00002:0.2:8", "--out", stem}) == 0);
    const std::string csv = slurp(stem + ".csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    bool saw_interior = false, saw_full_coop = false;
    while (std::getline(lines, line)) {
      const auto last_comma = line.rfind(',');
      const std::string stable_field = line.substr(last_comma + 1);
      if (stable_field.rfind("1:", 0) == 0) saw_full_coop = true;
      if (!stable_field.empty() && stable_field[0] == '0' && stable_field[1] == '.')
        saw_interior = true;
    }
    CHECK(saw_full_coop);
    CHECK(saw_interior);
  }
  SECTION("axis validation") {
    CHECK(run({"sweep", "--axis", "r:0.1:1.0:0", "--out", stem}) == 2);
    CHECK(run({"sweep", "--axis", "bogus:0.1:1.0:5", "--out", stem}) == 2);
    CHECK(run({"sweep", "--out", stem}) == 2);
  }
}

TEST_CASE("basin command refuses attractor-free parameters") {
  TempDir tmp;
  CHECK(run({"basin", "--kind", "punishment", "-N", "10", "-r", "0.006", "-d", "0.0001",
             "--nx", "3", "--ny", "3", "--out", tmp.file("b")}) == 2);
}

TEST_CASE("abm command writes the run and its summary") {
  TempDir tmp;
  const std::string stem = tmp.file("abm");
  const int rc = run({"abm", "--kind", "reward", "-r", "0.6", "-d", "0.2", "--steps",
                      "3000", "--nc0", "500", "--resource0", "500", "--seed", "7",
                      "--out", stem});
  REQUIRE(rc == 0);
  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.rfind("t,x,y\n", 0) == 0);
  const json summary = json::parse(slurp(stem + ".json"));
  CHECK(summary.at("seed").get<int>() == 7);
  CHECK(summary.at("final_window_mean").at("x").get<double>() == Approx(1.0).margin(0.05));
}

TEST_CASE("presets write their artifact bundles") {
  TempDir tmp;

  SECTION("deterministic preset") {
    REQUIRE(run({"preset", "fig1", "--out", tmp.path.string()}) == 0);
    CHECK(fs::exists(tmp.path / "fig1_trajectory_ic0.csv"));
    const json report = json::parse(slurp(tmp.file("fig1_equilibria.json")));
    CHECK(report.at("n_fixed_points").get<int>() == 2);
    CHECK(report.at("n_stable").get<int>() == 1);
    CHECK(report.at("regime") == "slow");
  }
  SECTION("abm preset with two starts") {
    REQUIRE(run({"preset", "fig8c", "--out", tmp.path.string(), "--seed", "3"}) == 0);
    CHECK(fs::exists(tmp.path / "fig8c_abm_ic0.csv"));
    CHECK(fs::exists(tmp.path / "fig8c_abm_ic1.csv"));
    const json low = json::parse(slurp(tmp.file("fig8c_abm_ic0.json")));
    const json high = json::parse(slurp(tmp.file("fig8c_abm_ic1.json")));
    CHECK(low.at("final_window_mean").at("x").get<double>() == Approx(0.0).margin(0.05));
    CHECK(high.at("final_window_mean").at("x").get<double>() == Approx(1.0).margin(0.05));
  }
}

TEST_CASE("basin artifacts carry the documented schema") {
  TempDir tmp;
  const std::string stem = tmp.file("basin");
  REQUIRE(run({"basin", "--kind", "reward", "-r", "0.6", "-d", "0.2", "--nx", "4",
               "--ny", "4", "--t-end", "2000", "--out", stem}) == 0);
  const std::string csv = slurp(stem + ".csv");
  CHECK(csv.rfind("x0,y0,label\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 17);  // header + 16 cells
  const json grid = json::parse(slurp(stem + ".json"));
  CHECK(grid.at("legend").size() == 1);
  CHECK(grid.at("labels").size() == 4);
}

TEST_CASE("preset table matches the audited parameter sets") {
  using commons_lab::IncentiveKind;
  struct Expected {
    const char* id;
    IncentiveKind kind;
    double r, tax, noise;
    int group;
    bool is_abm;
  };
  // Frozen independently of presets.hpp; a drift in either copy fails here.
  const Expected table[] = {
      {"fig1", IncentiveKind::Reward, 0.25, 0.2, 0, 1000, false},
      {"fig2a", IncentiveKind::Reward, 0.6, 0.2, 0, 1000, false},
      {"fig2b", IncentiveKind::Reward, 0.6, 0.02, 0, 1000, false},
      {"fig3a", IncentiveKind::Reward, 1.0, 0.00002, 0, 1000, false},
      {"fig3b", IncentiveKind::Reward, 1.0, 0.2, 0, 1000, false},
      {"fig3c", IncentiveKind::Reward, 1.0, 0.04, 0, 1000, false},
      {"fig4", IncentiveKind::Punishment, 0.25, 0.2, 0, 1000, false},
      {"fig5r1", IncentiveKind::Punishment, 0.6, 0.004, 0, 1000, false},
      {"fig5r2", IncentiveKind::Punishment, 0.9, 0.003, 0, 1000, false},
      {"fig6", IncentiveKind::Punishment, 0.006, 0.0001, 0, 10, false},
      {"fig7a", IncentiveKind::Reward, 0.25, 0.2, 1.0, 1000, true},
      {"fig7b", IncentiveKind::Reward, 0.6, 0.2, 1.0, 1000, true},
      {"fig7c", IncentiveKind::Reward, 0.6, 0.02, 0.1, 1000, true},
      {"fig7d", IncentiveKind::Reward, 1.0, 0.00002, 1.0, 1000, true},
      {"fig7e", IncentiveKind::Reward, 1.0, 0.2, 1.0, 1000, true},
      {"fig7f", IncentiveKind::Reward, 1.0, 0.04, 1.0, 1000, true},
      {"fig8a", IncentiveKind::Punishment, 0.25, 0.2, 1.0, 1000, true},
      {"fig8b", IncentiveKind::Punishment, 0.6, 0.004, 2.0, 1000, true},
      {"fig8c", IncentiveKind::Punishment, 0.9, 0.003, 1.0, 1000, true},
  };
  REQUIRE(commons_lab::figure_presets().size() == std::size(table));
  for (const Expected& e : table) {
    const commons_lab::FigurePreset* p = commons_lab::find_preset(e.id);
    REQUIRE(p != nullptr);
    CHECK(p->kind == e.kind);
    CHECK(p->params.growth_rate == e.r);
    CHECK(p->params.tax == e.tax);
    CHECK(p->params.group_size == e.group);
    CHECK(p->params.defection_rate == 0.5);
    CHECK(p->params.max_quota == 0.5);
    CHECK(p->params.capacity == 1000.0);
    CHECK(p->is_abm == e.is_abm);
    if (e.is_abm) CHECK(p->noise == e.noise);
    CHECK_FALSE(p->initial_conditions.empty());
  }
  CHECK(commons_lab::find_preset("fig99") == nullptr);
}
