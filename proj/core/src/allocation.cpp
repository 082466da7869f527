#include "emff/allocation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "emff/errors.hpp"

namespace emff {

namespace {

Eigen::Matrix<double, 6, 12> constraint_jacobian(const Mat69& q, const Vec12& m) {
  const Vec3 sj = m.segment<3>(0);
  const Vec3 sk = m.segment<3>(3);
  const Vec3 cj = m.segment<3>(6);
  const Vec3 ck = m.segment<3>(9);
  // d(a ⊗ b)/db = a ⊗ I,  d(a ⊗ b)/da = I ⊗ b.
  auto outer_left = [](const Vec3& a) {
    Eigen::Matrix<double, 9, 3> out = Eigen::Matrix<double, 9, 3>::Zero();
    for (int i = 0; i < 3; ++i) {
      out.block<3, 3>(3 * i, 0) = a[i] * Mat3::Identity();
    }
    return out;
  };
  auto outer_right = [](const Vec3& b) {
    Eigen::Matrix<double, 9, 3> out = Eigen::Matrix<double, 9, 3>::Zero();
    for (int i = 0; i < 3; ++i) {
      out.block<3, 1>(3 * i, i) = b;
    }
    return out;
  };
  Eigen::Matrix<double, 6, 12> jac;
  jac.middleCols<3>(0) = q * outer_left(sk);
  jac.middleCols<3>(3) = q * outer_right(sj);
  jac.middleCols<3>(6) = q * outer_left(ck);
  jac.middleCols<3>(9) = q * outer_right(cj);
  return jac;
}

DipoleWaveform rotate_waveform(const DipoleWaveform& w, const Mat3& rotation) {
  return DipoleWaveform{rotation * w.s, rotation * w.c, w.omega};
}

}  // namespace

Vec12 stack_dipoles(const DipoleWaveform& dj, const DipoleWaveform& dk) {
  Vec12 m;
  m << dj.s, dk.s, dj.c, dk.c;
  return m;
}

Vec6 constraint_residual(const Mat69& q, const Vec12& m, const Vec6& target) {
  const Vec9 x = kron(m.segment<3>(3), m.segment<3>(0)) + kron(m.segment<3>(9), m.segment<3>(6));
  return q * x - target;
}

Vec12 project_to_feasible(const Mat69& q, const Vec6& target, Vec12 m, int max_iterations) {
  Vec6 g = constraint_residual(q, m, target);
  double best = g.norm();
  const double floor = 1e-15 * std::max(target.norm(), std::numeric_limits<double>::min());
  for (int it = 0; it < max_iterations && best > floor; ++it) {
    const auto jac = constraint_jacobian(q, m);
    const Vec12 step = jac.completeOrthogonalDecomposition().solve(-g);
    const Vec12 trial = m + step;
    const Vec6 g_trial = constraint_residual(q, trial, target);
    if (!(g_trial.norm() < best)) {
      break;
    }
    m = trial;
    g = g_trial;
    best = g.norm();
  }
  return m;
}

GramLift recover_gram(const DualProblem& problem, const DualCertificate& certificate) {
  GramLift lift;
  const double u_norm = problem.u.norm();
  if (u_norm == 0.0) {
    return lift;
  }
  const Mat3& r = certificate.r_lambda;
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU);
  const Vec3 sigma = svd.singularValues();
  int k = 0;
  while (k < 3 && sigma[k] >= 1.0 - kActiveTolerance) {
    ++k;
  }
  if (k == 0) {
    std::ostringstream msg;
    msg << "no active singular value (sigma_max = " << sigma[0] << "); dual not converged";
    throw RecoveryError(msg.str());
  }
  lift.active_rank = k;
  const Eigen::MatrixXd ua = svd.matrixU().leftCols(k);

  // Symmetric k×k unknown S, G = Ua S Uaᵀ. Equation i:
  //   -tr(R 𝒬_iᵀ G) = (8π/μ0) u_i,   vec(𝒬_i) = Q(i,:)ᵀ.
  std::vector<Mat3> basis;
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const Vec3 ua_a = ua.col(a);
      const Vec3 ua_b = ua.col(b);
      Mat3 e = ua_a * ua_b.transpose();
      if (a != b) {
        e += ua_b * ua_a.transpose();
      }
      basis.push_back(e);
    }
  }
  const int unknowns = static_cast<int>(basis.size());
  Eigen::Matrix<double, 6, Eigen::Dynamic> system(6, unknowns);
  for (int i = 0; i < 6; ++i) {
    const Mat3 qi = unvec(problem.q.row(i).transpose());
    for (int p = 0; p < unknowns; ++p) {
      system(i, p) = -(r * qi.transpose() * basis[p]).trace();
    }
  }
  const Vec6 rhs = kDualScale * problem.u;
  const Eigen::VectorXd coeffs = system.completeOrthogonalDecomposition().solve(rhs);
  Mat3 g = Mat3::Zero();
  for (int p = 0; p < unknowns; ++p) {
    g += coeffs[p] * basis[p];
  }
  g = 0.5 * (g + g.transpose());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(g);
  Vec3 values = eig.eigenvalues();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  for (int i = 0; i < 3; ++i) {
    // Clipping is only meant to absorb round-off; a clearly negative
    // eigenvalue means the trace equations are inconsistent.
    if (values[i] < -1e-6 * scale) {
      throw RecoveryError("recovered Gram lift is indefinite");
    }
    values[i] = std::max(values[i], 0.0);
  }
  lift.g = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();

  Vec6 achieved;
  for (int i = 0; i < 6; ++i) {
    const Mat3 qi = unvec(problem.q.row(i).transpose());
    achieved[i] = -(r * qi.transpose() * lift.g).trace();
  }
  lift.residual = (achieved - rhs).norm() / rhs.norm();
  if (lift.residual > 1e-6) {
    std::ostringstream msg;
    msg << "trace-equation residual " << lift.residual << " on a rank-" << k
        << " active subspace";
    throw RecoveryError(msg.str());
  }
  return lift;
}

std::pair<DipoleWaveform, DipoleWaveform> extract_waveforms(const GramLift& gram, const Mat3& r,
                                                            double omega) {
  Eigen::SelfAdjointEigenSolver<Mat3> eig(0.5 * (gram.g + gram.g.transpose()));
  const Vec3 values = eig.eigenvalues();  // ascending
  const double top = std::max(values[2], 0.0);
  if (values[0] < -1e-9 * std::max(top, 1.0)) {
    throw RecoveryError("Gram lift has a negative eigenvalue");
  }
  if (top > 0.0 && values[0] > 1e-8 * top) {
    throw RecoveryError("Gram lift has rank 3; no sine/cosine pair reproduces it");
  }
  DipoleWaveform dj;
  dj.omega = omega;
  dj.s = std::sqrt(std::max(values[2], 0.0)) * eig.eigenvectors().col(2);
  dj.c = std::sqrt(std::max(values[1], 0.0)) * eig.eigenvectors().col(1);

  // Shift the time origin so the largest-amplitude axis has phase zero:
  // its cosine part vanishes and its sine part is non-negative.
  Eigen::Index axis = 0;
  gram.g.diagonal().maxCoeff(&axis);
  const double phi = std::atan2(dj.c[axis], dj.s[axis]);
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const Vec3 s = dj.s * cp + dj.c * sp;
  const Vec3 c = -dj.s * sp + dj.c * cp;
  dj.s = s;
  dj.c = c;
  dj.c[axis] = 0.0;

  DipoleWaveform dk;
  dk.omega = omega;
  dk.s = -r.transpose() * dj.s;
  dk.c = -r.transpose() * dj.c;
  return {dj, dk};
}

AllocationSolution allocate(const Vec3& r, const Vec3& hint, const Wrench& command, double omega,
                            const AllocationOptions& options) {
  if (!command.stacked().allFinite()) {
    throw InputError("allocation command must be finite");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw InputError("allocation frequency must be positive");
  }
  const InteractionOperator op = interaction_operator(r, hint);
  const Wrench world = options.frame == CommandFrame::kWorld ? command : command.rotated(op.frame);

  AllocationSolution out;
  out.dipole_j.omega = omega;
  out.dipole_k.omega = omega;
  if (world.stacked().isZero(0.0)) {
    out.certificate = DualCertificate{};
    return out;
  }

  const DualProblem problem = DualProblem::line_of_sight(op, world);
  const DualCertificate cert = solve_dual(problem, options.dual_tolerance);
  const GramLift gram = recover_gram(problem, cert);
  auto [dj, dk] = extract_waveforms(gram, cert.r_lambda, omega);

  const Vec6 target = kDualScale * problem.u;
  const Vec12 m = project_to_feasible(problem.q, target, stack_dipoles(dj, dk));
  dj.s = m.segment<3>(0);
  dk.s = m.segment<3>(3);
  dj.c = m.segment<3>(6);
  dk.c = m.segment<3>(9);

  out.dipole_j = rotate_waveform(dj, op.frame);
  out.dipole_k = rotate_waveform(dk, op.frame);
  out.primal_objective = 0.5 * m.squaredNorm();
  out.dual_objective = cert.objective;
  out.gap = (out.primal_objective - out.dual_objective) / std::max(out.dual_objective, kGapFloor);
  out.wrench_residual =
      averaged_wrench(op, out.dipole_j, out.dipole_k).stacked() - world.stacked();
  out.certificate = cert;

  const double rel_residual = out.wrench_residual.norm() / std::max(world.norm(), kGapFloor);
  if (rel_residual > kMaxRelativeWrenchResidual) {
    std::ostringstream msg;
    msg << "allocated dipoles miss the command by " << rel_residual << " (relative)";
    throw RecoveryError(msg.str());
  }
  if (out.gap > kMaxRelativeGap) {
    std::ostringstream msg;
    msg << "duality gap " << out.gap << " exceeds " << kMaxRelativeGap << " (J_p = "
        << out.primal_objective << ", J_d = " << out.dual_objective << ")";
    throw GapViolationError(msg.str());
  }
  return out;
}

}  // namespace emff
