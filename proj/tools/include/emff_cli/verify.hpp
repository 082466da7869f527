#pragma once

// Randomised self-checks runnable from the command line. Each suite draws
// its cases from a stream split off the single user seed, so a suite gives
// the same verdict whether it runs alone or with the others.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace emff::cli {

enum class Fault {
  kNone,
  kTorqueSign,  // flips the torque block of the interaction operator
};

/// "none" or "psi_tau_sign"; throws InputError otherwise.
Fault parse_fault(const std::string& name);

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string metric;  // description of `worst`
  double worst = 0.0;
  std::vector<std::string> messages;  // first few failures

  bool passed() const { return failures == 0 && cases > 0; }
};

const std::vector<std::string>& suite_names();

/// `cases` <= 0 selects the suite default.
SuiteResult run_suite(const std::string& name, int cases, std::uint64_t seed, Fault fault);

struct VerifyOptions {
  std::vector<std::string> suites;  // empty: all
  int cases = 0;
  std::uint64_t seed = 20240601;
  Fault fault = Fault::kNone;
};

struct VerifyResult {
  std::vector<SuiteResult> suites;
  bool passed() const;
  nlohmann::json to_json(std::uint64_t seed) const;
};

VerifyResult run_verify(const VerifyOptions& options);

}  // namespace emff::cli
