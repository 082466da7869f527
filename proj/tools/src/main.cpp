#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <emff/errors.hpp>
#include <emff/parallel.hpp>

#include "emff_cli/commands.hpp"
#include "emff_cli/scenario.hpp"
#include "emff_cli/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

emff::Vec3 to_vec3(const std::vector<double>& v) { return emff::Vec3(v[0], v[1], v[2]); }

CLI::Option* add_vector(CLI::App* app, const std::string& name, std::vector<double>& target,
                        const std::string& help) {
  return app->add_option(name, target, help)->delimiter(',')->expected(3);
}

// Runs `write` against the named file, or stdout when the name is empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) {
    throw emff::InputError("cannot open output file " + path);
  }
  write(file);
  if (!file) {
    throw emff::InputError("failed writing " + path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal dipole allocation and swarm power analysis for electromagnetic formations"};
  app.require_subcommand(1);

  // allocate
  auto* allocate = app.add_subcommand("allocate", "Minimum-power dipoles for one coil pair");
  std::vector<double> r;
  std::vector<double> hint{0.0, 0.0, 1.0};
  std::vector<double> force{0.0, 0.0, 0.0};
  std::vector<double> torque{0.0, 0.0, 0.0};
  emff::cli::AllocateArgs alloc_args;
  add_vector(allocate, "--r", r, "separation r_j - r_k [m], e.g. 1,0,0")->required();
  add_vector(allocate, "--hint", hint, "frame hint for the line-of-sight y axis");
  add_vector(allocate, "--force", force, "commanded force on coil j [N]");
  add_vector(allocate, "--torque", torque, "commanded torque on coil j [N m]");
  allocate->add_option("--omega", alloc_args.omega, "shared AC frequency [rad/s]");
  allocate->add_flag("--los", alloc_args.line_of_sight, "command is given in the line-of-sight frame");
  allocate->add_option("--tol", alloc_args.tolerance, "relative gap tolerance of the dual solve");

  // orbit
  auto* orbit = app.add_subcommand("orbit", "Desired trajectory and disturbance matrix samples");
  std::string orbit_scenario;
  std::string orbit_out;
  orbit->add_option("scenario", orbit_scenario, "scenario JSON")->required();
  orbit->add_option("-o,--output", orbit_out, "CSV path (default: scenario output.orbit_csv or stdout)");

  // scan
  auto* scan = app.add_subcommand("scan", "Peak and averaged power for each grid size");
  std::string scan_scenario;
  std::string scan_out;
  bool extended = false;
  scan->add_option("scenario", scan_scenario, "scenario JSON")->required();
  scan->add_option("-o,--output", scan_out, "CSV path (default: scenario output.scan_csv or stdout)");
  scan->add_flag("--extended", extended, "append j = n peak and ordering-check columns");

  // verify
  auto* verify = app.add_subcommand("verify", "Run randomised self-check suites");
  emff::cli::VerifyOptions verify_options;
  std::string fault = "none";
  verify->add_option("--suite", verify_options.suites, "suite to run (repeatable)")
      ->check(CLI::IsMember(emff::cli::suite_names()));
  verify->add_option("--cases", verify_options.cases, "cases per suite (default: per suite)")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_options.seed, "64-bit seed");
  verify->add_option("--inject-fault", fault, "test hook: none or psi_tau_sign");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (allocate->parsed()) {
      alloc_args.r = to_vec3(r);
      alloc_args.hint = to_vec3(hint);
      alloc_args.force = to_vec3(force);
      alloc_args.torque = to_vec3(torque);
      std::cout << emff::cli::allocate_report(alloc_args).dump(2) << '\n';
    } else if (orbit->parsed()) {
      const auto scenario = emff::cli::load_scenario(orbit_scenario);
      with_output(orbit_out.empty() ? scenario.orbit_csv : orbit_out,
                  [&](std::ostream& out) { emff::cli::write_orbit_csv(scenario, out); });
    } else if (scan->parsed()) {
      const auto scenario = emff::cli::load_scenario(scan_scenario);
      const int threads = emff::configured_threads();
      with_output(scan_out.empty() ? scenario.scan_csv : scan_out, [&](std::ostream& out) {
        emff::cli::write_scan_csv(scenario, out, extended, threads);
      });
    } else if (verify->parsed()) {
      verify_options.fault = emff::cli::parse_fault(fault);
      const auto result = emff::cli::run_verify(verify_options);
      std::cout << result.to_json(verify_options.seed).dump(2) << '\n';
      return result.passed() ? kExitOk : kExitNumeric;
    }
  } catch (const emff::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const emff::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
