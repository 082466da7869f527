#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CliResult {
  int status = -1;
  std::string out;
};

CliResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + EMFF_CLI_PATH + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    return r;
  }
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), got);
  }
  const int status = ::pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  return rows;
}

json reference_scenario() {
  std::ifstream in(EMFF_SCENARIO_DIR "/reference_scenario.json");
  return json::parse(in);
}

fs::path write_scenario(const json& scenario, const std::string& name) {
  const fs::path path = fs::temp_directory_path() / ("emff_cli_test_" + name + ".json");
  std::ofstream(path) << scenario.dump(2);
  return path;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

TEST(CliAllocate, AxialExample) {
  const CliResult r = run("allocate --r 1,0,0 --force 1e-5,0,0 --torque 0,0,0");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  EXPECT_LE(j.at("gap").get<double>(), 1e-6);
  EXPECT_NEAR(j.at("J_p_A2m4").get<double>(), 100.0 / 3.0, 1e-6);
  EXPECT_LE(j.at("wrench_residual_relative").get<double>(), 1e-8);
}

TEST(CliAllocate, MissingSeparationIsUsageError) {
  EXPECT_EQ(run("allocate --force 1e-5,0,0 --torque 0,0,0").status, 1);
}

TEST(CliAllocate, MalformedVectorIsUsageError) {
  EXPECT_EQ(run("allocate --r 1,0 --force 1e-5,0,0").status, 1);
  EXPECT_EQ(run("allocate --r 0,0,0 --force 1e-5,0,0").status, 1);
}

TEST(CliAllocate, ZeroWrenchGivesZeroDipoles) {
  const CliResult r = run("allocate --r 1,2,0 --force 0,0,0 --torque 0,0,0");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  for (const char* side : {"dipole_j", "dipole_k"}) {
    for (const char* part : {"sin_Am2", "cos_Am2"}) {
      for (double v : j.at(side).at(part).get<std::vector<double>>()) {
        EXPECT_EQ(v, 0.0);
      }
    }
  }
  EXPECT_EQ(j.at("J_p_A2m4").get<double>(), 0.0);
}

TEST(CliGeneral, UnknownSubcommandAndHelp) {
  EXPECT_EQ(run("frobnicate").status, 1);
  EXPECT_EQ(run("--help").status, 0);
  EXPECT_EQ(run("").status, 1);
}

TEST(CliScan, ColumnsAndTrends) {
  json s = reference_scenario();
  s["grid"]["n"] = {1, 2, 3, 4};
  s["sampling"]["samples"] = 96;
  const CliResult r = run("scan " + write_scenario(s, "scan").string(), "EMFF_THREADS=2");
  ASSERT_EQ(r.status, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  const std::vector<std::string> expected = {"n",       "N_l",      "r_l_m",         "chi_sys_kg",
                                             "W_bar_W", "W_oint_W", "M_A2m4_per_kg", "gamma_S"};
  EXPECT_EQ(rows[0], expected);
  const std::size_t m_col = column(rows[0], "M_A2m4_per_kg");
  const std::size_t g_col = column(rows[0], "gamma_S");
  double previous = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int n_l = std::stoi(rows[i][1]);
    EXPECT_EQ(n_l, 2 * static_cast<int>(i) + 1);
    EXPECT_NEAR(std::stod(rows[i][g_col]), std::pow(n_l, 2.0 / 3.0), 1e-14 * n_l);
    const double m = std::stod(rows[i][m_col]);
    EXPECT_LT(m, previous);
    previous = m;
  }
}

TEST(CliScan, DeterministicAcrossThreadCounts) {
  json s = reference_scenario();
  s["grid"]["n"] = {2, 3};
  s["sampling"]["samples"] = 48;
  const std::string path = write_scenario(s, "determinism").string();
  const CliResult a = run("scan " + path, "EMFF_THREADS=1");
  const CliResult b = run("scan " + path, "EMFF_THREADS=1");
  const CliResult c = run("scan " + path, "EMFF_THREADS=4");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(CliScan, NoDisturbanceGivesZeroPower) {
  json s = reference_scenario();
  s["orbit"]["k_j2_m5_per_s2"] = 0.0;
  s["orbit"]["force_omega_z_equal_omega_xy"] = true;
  s["grid"]["n"] = {1, 3};
  s["sampling"]["samples"] = 16;
  const CliResult r = run("scan " + write_scenario(s, "zero").string());
  ASSERT_EQ(r.status, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (const char* name : {"W_bar_W", "W_oint_W", "M_A2m4_per_kg"}) {
      EXPECT_EQ(std::stod(rows[i][column(rows[0], name)]), 0.0) << name;
    }
  }
}

TEST(CliScan, ExtendedColumnsAndOutputFile) {
  json s = reference_scenario();
  s["grid"]["n"] = 3;
  s["sampling"]["samples"] = 32;
  const fs::path out = fs::temp_directory_path() / "emff_cli_test_scan.csv";
  fs::remove(out);
  const CliResult r = run("scan --extended -o " + out.string() + " " +
                    write_scenario(s, "extended").string());
  ASSERT_EQ(r.status, 0);
  std::ifstream in(out);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][column(rows[0], "peak_order_violations")], "0");
  column(rows[0], "W_bar_jn_W");
}

TEST(CliScan, BadScenarioIsUsageError) {
  json s = reference_scenario();
  s["grid"]["d_sat_m"] = 1.0;  // both spacing and length given
  EXPECT_EQ(run("scan " + write_scenario(s, "both").string()).status, 1);
  EXPECT_EQ(run("scan /nonexistent/scenario.json").status, 1);
  json t = reference_scenario();
  t["grid"]["n"] = json::array();
  EXPECT_EQ(run("scan " + write_scenario(t, "empty").string()).status, 1);
}

TEST(CliOrbit, ClosureTraceAndRowCount) {
  json s = reference_scenario();
  s["sampling"]["samples"] = 101;
  const CliResult r = run("orbit " + write_scenario(s, "orbit").string());
  ASSERT_EQ(r.status, 0);
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 102u);
  const auto& h = rows[0];
  const std::vector<std::string> lead = {"t_s", "x_m", "y_m", "z_m", "K11"};
  EXPECT_TRUE(std::equal(lead.begin(), lead.end(), h.begin()));
  const std::size_t trace = column(h, "K_core_trace");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(std::abs(std::stod(rows[i][trace])), 1e-15);
    // K is symmetric.
    EXPECT_EQ(rows[i][column(h, "K12")], rows[i][column(h, "K21")]);
    EXPECT_EQ(rows[i][column(h, "K13")], rows[i][column(h, "K31")]);
  }
  const auto& first = rows[1];
  const auto& last = rows.back();
  double closure = 0.0;
  for (std::size_t c = 1; c <= 3; ++c) {
    closure = std::max(closure, std::abs(std::stod(last[c]) - std::stod(first[c])));
  }
  EXPECT_LE(closure, 1e-9);
}

TEST(CliVerify, DefaultSeedPasses) {
  const CliResult r = run("verify", "EMFF_THREADS=2");
  ASSERT_EQ(r.status, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_EQ(j.at("suites").size(), 5u);
}

TEST(CliVerify, InjectedTorqueSignFailsTelescoping) {
  const CliResult r = run("verify --suite telescoping --inject-fault psi_tau_sign");
  EXPECT_EQ(r.status, 2);
  const json j = json::parse(r.out);
  EXPECT_FALSE(j.at("passed").get<bool>());
  EXPECT_FALSE(j.at("suites").at(0).at("passed").get<bool>());
  EXPECT_EQ(j.at("suites").at(0).at("name"), "telescoping");
}

TEST(CliVerify, SuiteSelectionAndCaseCount) {
  const CliResult r = run("verify --suite duality --cases 100");
  ASSERT_EQ(r.status, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("suites").size(), 1u);
  EXPECT_EQ(j.at("suites").at(0).at("cases").get<int>(), 100);
  EXPECT_EQ(j.at("suites").at(0).at("failures").get<int>(), 0);
}

TEST(CliVerify, DeterministicForSeed) {
  const CliResult a = run("verify --suite averaging --suite orbit --seed 99", "EMFF_THREADS=1");
  const CliResult b = run("verify --suite averaging --suite orbit --seed 99", "EMFF_THREADS=1");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run("verify --suite nonsense").status, 1);
}

}  // namespace
