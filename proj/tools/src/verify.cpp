#include "emff_cli/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include <emff/allocation.hpp>
#include <emff/brigade.hpp>
#include <emff/errors.hpp>
#include <emff/magnetics.hpp>
#include <emff/orbit.hpp>

namespace emff::cli {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxMessages = 5;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Portable generator: the same seed gives the same draws with any standard
// library, which keeps verification output byte-stable.
class Random {
 public:
  explicit Random(std::uint64_t seed) : state_(seed) {}

  double uniform() { return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(splitmix64(state_) % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  Vec3 vector() { return Vec3(normal(), normal(), normal()); }
  Vec3 direction() {
    Vec3 v = vector();
    while (v.norm() < 1e-6) {
      v = vector();
    }
    return v.normalized();
  }

 private:
  std::uint64_t state_;
};

std::uint64_t suite_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = seed;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h = splitmix64(h);
  }
  return h;
}

class Tracker {
 public:
  Tracker(SuiteResult& result, std::string metric) : result_(result) {
    result_.metric = std::move(metric);
  }
  void observe(double value) {
    if (!std::isfinite(value)) {
      result_.worst = value;
    } else if (std::isfinite(result_.worst)) {
      result_.worst = std::max(result_.worst, value);
    }
  }
  void fail(int index, const std::string& what) {
    ++result_.failures;
    if (result_.messages.size() < kMaxMessages) {
      result_.messages.push_back("case " + std::to_string(index) + ": " + what);
    }
  }

 private:
  SuiteResult& result_;
};

std::string describe(const char* label, double value, double limit) {
  std::ostringstream s;
  s.precision(3);
  s << label << ' ' << value << " exceeds " << limit;
  return s.str();
}

struct PairCase {
  Vec3 r;
  Vec3 hint;
  Wrench command;
};

// A feasible wrench produced by random dipoles, over separations spanning two decades.
PairCase random_pair_case(Random& rng) {
  PairCase c;
  c.r = rng.direction() * rng.log_uniform(0.3, 30.0);
  c.hint = rng.direction();
  const double amplitude = rng.log_uniform(1e1, 1e4);
  DipoleWaveform dj{rng.vector() * amplitude, rng.vector() * amplitude, 1.0};
  DipoleWaveform dk{rng.vector() * amplitude, rng.vector() * amplitude, 1.0};
  if (rng.uniform() < 0.3) {
    dj.c.setZero();
    dk.c.setZero();
  }
  c.command = averaged_wrench(interaction_operator(c.r, c.hint), dj, dk);
  return c;
}

void duality_suite(SuiteResult& out, int cases, Random& rng) {
  Tracker track(out, "max relative duality gap");
  for (int i = 0; i < cases; ++i) {
    const PairCase c = random_pair_case(rng);
    ++out.cases;
    try {
      const AllocationSolution sol = allocate(c.r, c.hint, c.command, 1.0);
      track.observe(sol.gap);
      const double residual = sol.wrench_residual.norm() / c.command.norm();
      const double split = std::abs(sol.dipole_j.energy() - sol.dipole_k.energy()) /
                           std::max(sol.primal_objective, kGapFloor);
      if (sol.gap > kMaxRelativeGap) {
        track.fail(i, describe("gap", sol.gap, kMaxRelativeGap));
      } else if (residual > kMaxRelativeWrenchResidual) {
        track.fail(i, describe("wrench residual", residual, kMaxRelativeWrenchResidual));
      } else if (split > 1e-8) {
        track.fail(i, describe("power split mismatch", split, 1e-8));
      }
    } catch (const Error& e) {
      track.fail(i, e.what());
    }
  }
}

void bruteforce_suite(SuiteResult& out, int cases, Random& rng) {
  Tracker track(out, "max (J_d - J_bruteforce) / J_d");
  for (int i = 0; i < cases; ++i) {
    const PairCase c = random_pair_case(rng);
    ++out.cases;
    try {
      const AllocationSolution sol = allocate(c.r, c.hint, c.command, 1.0);
      const AllocationSolution brute =
          brute_force_allocate(c.r, c.hint, c.command, 20, static_cast<std::uint64_t>(i) + 1);
      const double undercut =
          (sol.dual_objective - brute.primal_objective) / std::max(sol.dual_objective, kGapFloor);
      track.observe(undercut);
      if (undercut > 1e-4) {
        track.fail(i, describe("brute force undercuts the dual bound by", undercut, 1e-4));
      }
    } catch (const Error& e) {
      track.fail(i, e.what());
    }
  }
}

void averaging_suite(SuiteResult& out, int cases, Random& rng) {
  Tracker track(out, "max relative averaging error");
  constexpr std::array<std::pair<int, int>, 4> ratios{{{2, 1}, {3, 2}, {1, 3}, {5, 4}}};
  for (int i = 0; i < cases; ++i) {
    ++out.cases;
    const Vec3 r = rng.direction() * rng.log_uniform(0.5, 10.0);
    const double omega = rng.log_uniform(0.1, 10.0);
    DipoleWaveform dj{rng.vector() * 100.0, rng.vector() * 100.0, omega};
    DipoleWaveform dk{rng.vector() * 100.0, rng.vector() * 100.0, omega};
    try {
      const Wrench model = averaged_wrench(interaction_operator(r, Vec3::UnitZ()), dj, dk);
      const TimeAverage numeric = time_average_oracle(r, dj, dk, 2.0 * kPi / omega, 4096);
      const double scale = model.norm();
      const double err = (model.stacked() - numeric.wrench.stacked()).norm() / scale;
      track.observe(err);
      if (err > 1e-8) {
        track.fail(i, describe("equal-frequency average error", err, 1e-8));
        continue;
      }

      const auto [p, q] = ratios[static_cast<std::size_t>(i) % ratios.size()];
      dk.omega = omega * p / q;
      const double period = common_period(dj.omega, dk.omega);
      const TimeAverage mixed = time_average_oracle(r, dj, dk, period, 4096);
      const Wrench mixed_model = averaged_wrench(interaction_operator(r, Vec3::UnitZ()), dj, dk);
      const double leak = std::max(mixed.wrench.norm(), mixed_model.norm()) / scale;
      if (!mixed.commensurate || leak > 1e-12) {
        track.fail(i, describe("distinct-frequency average", leak, 1e-12));
      }
    } catch (const Error& e) {
      track.fail(i, e.what());
    }
  }
}

Mat3 random_symmetric(Random& rng, double scale) {
  Mat3 a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      a(i, j) = rng.normal();
    }
  }
  return scale * 0.5 * (a + a.transpose());
}

void telescoping_suite(SuiteResult& out, int cases, Random& rng, Fault fault) {
  Tracker track(out, "max relative balance residual");
  const double torque_sign = fault == Fault::kTorqueSign ? -1.0 : 1.0;
  for (int i = 0; i < cases; ++i) {
    ++out.cases;
    try {
      // Mutual coil wrenches conserve momentum; the reactions used along the
      // brigade rely on it.
      const Vec3 r = rng.direction() * rng.log_uniform(0.5, 10.0);
      const Vec3 mu_j = rng.vector() * 100.0;
      const Vec3 mu_k = rng.vector() * 100.0;
      const Wrench on_j = instantaneous_wrench(
          interaction_operator_with_torque_sign(r, Vec3::UnitZ(), torque_sign), mu_j, mu_k);
      const Wrench on_k = instantaneous_wrench(
          interaction_operator_with_torque_sign(-r, Vec3::UnitZ(), torque_sign), mu_k, mu_j);
      const double pair_scale = on_j.torque.norm() + r.norm() * on_j.force.norm();
      const double momentum =
          std::max((on_j.force + on_k.force).norm() / on_j.force.norm(),
                   (on_j.torque + on_k.torque + r.cross(on_j.force)).norm() / pair_scale);
      track.observe(momentum);
      if (momentum > 1e-10) {
        track.fail(i, describe("coil pair momentum imbalance", momentum, 1e-10));
        continue;
      }

      const int n = rng.integer(1, 30);
      const GridConfig cfg{n, rng.log_uniform(10.0, 1e3), rng.log_uniform(0.5, 5.0)};
      const DisturbanceField field =
          DisturbanceField::constant(random_symmetric(rng, 1e-6), rng.direction());
      double scale = 0.0;
      double worst = 0.0;
      for (int j = 2; j <= n + 1; ++j) {
        const Wrench closed = pair_command(cfg, field, j, 0.0);
        const Wrench summed = telescoping_oracle(cfg, field, j, 0.0);
        scale = std::max(scale, closed.norm());
        worst = std::max(worst, (closed.stacked() - summed.stacked()).norm());
      }
      const EquilibriumReport eq = equilibrium_residuals(cfg, field, 0.0);
      for (const SatelliteBalance& s : eq.satellites) {
        worst = std::max(worst, s.force.norm());
        if (s.index != 0) {
          worst = std::max(worst, s.torque.norm());
        }
      }
      worst = std::max(worst, eq.center_force_sum.norm());
      worst = std::max(worst, (eq.center_torque_sum - eq.net_disturbance_torque).norm());
      const double rel = worst / scale;
      track.observe(rel);
      if (rel > 1e-10) {
        track.fail(i, describe("brigade balance residual", rel, 1e-10));
      }
    } catch (const Error& e) {
      track.fail(i, e.what());
    }
  }
}

void orbit_suite(SuiteResult& out, int cases, Random& rng) {
  Tracker track(out, "max analytic-vs-RK4 deviation [m]");
  for (int i = 0; i < cases; ++i) {
    ++out.cases;
    try {
      OrbitContext ctx = make_context(rng.uniform(300e3, 1500e3), rng.uniform(0.0, kPi),
                                      rng.uniform(-kPi, kPi));
      // Drift-free initial condition (C1 = 0).
      RelativeElements e;
      e.r_xy = rng.log_uniform(1.0, 1e3);
      e.theta_xy = rng.uniform(-kPi, kPi);
      e.c4 = rng.uniform(-100.0, 100.0);
      e.r_z = rng.log_uniform(1.0, 1e3);
      e.theta_z = rng.uniform(-kPi, kPi);
      const State x0 = propagate_state(e, ctx, 0.0);
      const RelativeElements fitted = relative_elements(x0, ctx);
      const double period = ctx.period();
      const auto zero = [](double, const State&) -> Vec3 { return Vec3::Zero(); };
      const auto traj = integrate_dynamics(x0, ctx, zero, zero, period, period / 4000.0);
      double dev = 0.0;
      for (const auto& sample : traj) {
        dev = std::max(dev, (sample.state.head<3>() - propagate_analytic(fitted, ctx, sample.t))
                                .norm());
      }
      track.observe(dev);
      if (dev > 1e-6) {
        track.fail(i, describe("RK4 deviation [m]", dev, 1e-6));
        continue;
      }

      StablePlane plane{rng.uniform(0.2, 1.3), rng.uniform(-1.0, 1.0), rng.log_uniform(1.0, 1e3),
                        rng.uniform(-kPi, kPi)};
      const double closure =
          (desired_trajectory(plane, ctx, period) - desired_trajectory(plane, ctx, 0.0)).norm();
      if (closure > 1e-9) {
        track.fail(i, describe("desired trajectory closure [m]", closure, 1e-9));
        continue;
      }
      const double t = rng.uniform(0.0, period);
      const Mat3 core = j2_gradient_fluctuation(ctx, t);
      const Mat3 k = j2_disturbance_matrix(ctx, t);
      if (std::abs(core.trace()) > 1e-15 || (k - k.transpose()).norm() > 1e-15 * k.norm()) {
        track.fail(i, "disturbance matrix trace or symmetry check failed");
        continue;
      }
      OrbitContext matched = ctx;
      matched.omega_z = matched.omega_xy;
      if (freq_mismatch_disturbance(plane.r_xyd, plane.theta_z(), matched, t) != 0.0) {
        track.fail(i, "cross-track forcing is nonzero with matched frequencies");
      }
    } catch (const Error& e) {
      track.fail(i, e.what());
    }
  }
}

const std::map<std::string, int>& default_cases() {
  static const std::map<std::string, int> defaults{
      {"duality", 100}, {"bruteforce", 20}, {"averaging", 50}, {"telescoping", 30}, {"orbit", 10}};
  return defaults;
}

}  // namespace

Fault parse_fault(const std::string& name) {
  if (name.empty() || name == "none") {
    return Fault::kNone;
  }
  if (name == "psi_tau_sign") {
    return Fault::kTorqueSign;
  }
  throw InputError("unknown fault \"" + name + "\" (expected none or psi_tau_sign)");
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"duality", "bruteforce", "averaging", "telescoping",
                                              "orbit"};
  return names;
}

SuiteResult run_suite(const std::string& name, int cases, std::uint64_t seed, Fault fault) {
  const auto it = default_cases().find(name);
  if (it == default_cases().end()) {
    throw InputError("unknown suite \"" + name + "\"");
  }
  const int count = cases > 0 ? cases : it->second;
  Random rng(suite_seed(seed, name));
  SuiteResult out;
  out.name = name;
  if (name == "duality") {
    duality_suite(out, count, rng);
  } else if (name == "bruteforce") {
    bruteforce_suite(out, count, rng);
  } else if (name == "averaging") {
    averaging_suite(out, count, rng);
  } else if (name == "telescoping") {
    telescoping_suite(out, count, rng, fault);
  } else {
    orbit_suite(out, count, rng);
  }
  return out;
}

bool VerifyResult::passed() const {
  return !suites.empty() &&
         std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

nlohmann::json VerifyResult::to_json(std::uint64_t seed) const {
  nlohmann::json out;
  out["seed"] = seed;
  out["passed"] = passed();
  out["suites"] = nlohmann::json::array();
  for (const SuiteResult& s : suites) {
    out["suites"].push_back({{"name", s.name},
                             {"passed", s.passed()},
                             {"cases", s.cases},
                             {"failures", s.failures},
                             {"metric", s.metric},
                             {"worst", s.worst},
                             {"messages", s.messages}});
  }
  return out;
}

VerifyResult run_verify(const VerifyOptions& options) {
  const std::vector<std::string>& names = options.suites.empty() ? suite_names() : options.suites;
  VerifyResult result;
  for (const std::string& name : names) {
    result.suites.push_back(run_suite(name, options.cases, options.seed, options.fault));
  }
  return result;
}

}  // namespace emff::cli
