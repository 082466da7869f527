#pragma once

// Formation-keeping power of a (2n+1)×(2n+1) grid swarm built from the
// per-pair optimal dipole cost of the bucket-brigade commands.

#include <vector>

#include "emff/brigade.hpp"
#include "emff/errors.hpp"
#include "emff/magnetics.hpp"

namespace emff {

/// Uniform samples t_i = i·T/N on [0, T).
struct TimeGrid {
  double period = 0.0;
  std::vector<double> times;

  static TimeGrid uniform(double period, int samples);
  std::size_t size() const { return times.size(); }
};

struct PowerOptions {
  double dual_tolerance = 1e-10;
  /// Golden-section refinement stops below this fraction of the period.
  double refine_tolerance = 1e-3;
  int threads = 1;
};

/// A dual solve inside a power evaluation failed; carries the offending cell.
class PowerSolveError : public NumericError {
 public:
  PowerSolveError(const std::string& what, int n, int j, double t)
      : NumericError(what), n_(n), j_(j), t_(t) {}
  int n() const { return n_; }
  int j() const { return j_; }
  double t() const { return t_; }

 private:
  int n_;
  int j_;
  double t_;
};

/// (R_coil/γ²)·J_d [W]. Throws InputError for negative or non-finite J_d.
double power_index(const CoilDesign& coil, double j_d);

/// Optimal squared-dipole cost J_d of the unscaled command L(n,j)·Û(t) for a
/// pair separated by -d_sat·p̂(t) [A²m⁴/kg].
double pair_dual_objective(const GridConfig& cfg, const DisturbanceField& field, int j, double t,
                           double dual_tolerance = 1e-10);

/// w*(j, t) = 2 (R_coil/γ²) [J_d(t) + J_d(t + T/4)] [W/kg].
double pair_power_w_star(const GridConfig& cfg, const DisturbanceField& field,
                         const CoilDesign& coil, int j, double t,
                         const PowerOptions& options = {});

/// W̄ = χ_sys · sup_t w*(2, t) with golden-section refinement of the grid maximum [W].
double peak_power(const GridConfig& cfg, const DisturbanceField& field, const CoilDesign& coil,
                  const TimeGrid& grid, const PowerOptions& options = {});

/// W_∮ = χ_sys (2n+1) · mean_t Σ_{j=2}^{n+1} w*(j, t) [W].
double total_power(const GridConfig& cfg, const DisturbanceField& field, const CoilDesign& coil,
                   const TimeGrid& grid, const PowerOptions& options = {});

/// M = W_∮ / (m_sys R_coil/γ²) [A²m⁴/kg]; independent of the coil.
double dipole_metric(const GridConfig& cfg, const DisturbanceField& field, const TimeGrid& grid,
                     const PowerOptions& options = {});

/// γ_S = N_l^(2/3).
double surface_ratio(int n_l);

struct PowerReport {
  int n = 0;
  double r_l = 0.0;             // [m]
  double chi = 0.0;             // [kg]
  std::vector<double> samples;  // [s]
  /// w_star[j-2][i]: 2 [J_d(t_i) + J_d(t_i + T/4)] before coil scaling [A²m⁴/kg].
  std::vector<std::vector<double>> w_star;
  double W_bar = 0.0;      // peak from j = 2 [W]
  double W_bar_jn = 0.0;   // same peak taken at j = n, reported for comparison [W]
  double W_oint = 0.0;     // orbit average [W]
  double M = 0.0;          // [A²m⁴/kg]
  double gamma_S = 0.0;
  /// Cells with w*(j,t) > w*(2,t) beyond round-off, and the largest ratio seen.
  int peak_order_violations = 0;
  double peak_order_worst_ratio = 0.0;
};

/// All metrics for one grid from a single pass over the (j, t) cells.
PowerReport evaluate_power(const GridConfig& cfg, const DisturbanceField& field,
                           const CoilDesign& coil, const TimeGrid& grid,
                           const PowerOptions& options = {});

}  // namespace emff
