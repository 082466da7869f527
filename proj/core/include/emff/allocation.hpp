#pragma once

// Globally optimal two-coil dipole allocation.
//
// Primal:   minimize ½‖[s_j; s_k; c_j; c_k]‖²
//           subject to Q (s_k ⊗ s_j + c_k ⊗ c_j) = (8π/μ0) u      (LOS frame)
//
// The dual certificate identifies the active singular subspace of R(λ*). On
// it the Gram matrix G = s_j s_jᵀ + c_j c_jᵀ solves a small linear system,
// and the k-side dipoles follow from [s_k, c_k] = -R(λ*)ᵀ [s_j, c_j].

#include <cstdint>
#include <optional>
#include <utility>

#include "emff/dual_solver.hpp"
#include "emff/magnetics.hpp"
#include "emff/types.hpp"

namespace emff {

/// Floor on the denominator of the relative duality gap.
inline constexpr double kGapFloor = 1e-12;
inline constexpr double kMaxRelativeGap = 1e-6;
inline constexpr double kMaxRelativeWrenchResidual = 1e-8;

struct GramLift {
  Mat3 g = Mat3::Zero();  // [A²m⁴]
  double residual = 0.0;  // relative residual of the trace equations
  int active_rank = 0;    // dimension of the active singular subspace
};

struct AllocationSolution {
  DipoleWaveform dipole_j;
  DipoleWaveform dipole_k;
  double primal_objective = 0.0;  // J_p [A²m⁴]
  double dual_objective = 0.0;    // J_d [A²m⁴]; NaN when no certificate exists
  double gap = 0.0;               // (J_p - J_d) / max(J_d, ε)
  Vec6 wrench_residual = Vec6::Zero();
  std::optional<DualCertificate> certificate;
};

enum class CommandFrame { kWorld, kLineOfSight };

struct AllocationOptions {
  double dual_tolerance = 1e-10;
  CommandFrame frame = CommandFrame::kWorld;
};

/// Stacked primal variable [s_j; s_k; c_j; c_k].
Vec12 stack_dipoles(const DipoleWaveform& dj, const DipoleWaveform& dk);

/// Q x(m) - target, where x(m) = s_k ⊗ s_j + c_k ⊗ c_j.
Vec6 constraint_residual(const Mat69& q, const Vec12& m, const Vec6& target);

/// Gauss-Newton projection onto {m : Q x(m) = target}, taking minimum-norm
/// corrections at every step.
Vec12 project_to_feasible(const Mat69& q, const Vec6& target, Vec12 m, int max_iterations = 20);

/// Gram lift of the j-side dipoles from an optimal dual certificate. Works
/// in whatever frame `problem` is expressed in.
GramLift recover_gram(const DualProblem& problem, const DualCertificate& certificate);

/// Split G into sine and cosine amplitudes (s_j s_jᵀ + c_j c_jᵀ = G) and
/// map them to the k side through -Rᵀ. The overall phase is fixed so the
/// axis with the largest amplitude has zero phase.
std::pair<DipoleWaveform, DipoleWaveform> extract_waveforms(const GramLift& gram, const Mat3& r,
                                                            double omega);

/// Full pipeline. r = r_j - r_k; `command` is the wrench wanted on coil j,
/// given in the frame selected by options.frame. Returned dipoles are in the
/// world frame.
AllocationSolution allocate(const Vec3& r, const Vec3& hint, const Wrench& command, double omega,
                            const AllocationOptions& options = {});

/// Multistart augmented-Lagrangian descent over the 12 amplitudes, with no
/// use of the dual. Serves as a global-optimality oracle.
AllocationSolution brute_force_allocate(const Vec3& r, const Vec3& hint, const Wrench& command,
                                        int restarts, std::uint64_t seed, double omega = 1.0,
                                        CommandFrame frame = CommandFrame::kWorld);

}  // namespace emff
