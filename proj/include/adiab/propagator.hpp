#pragma once

#include <filesystem>
#include <vector>

#include "adiab/grid.hpp"
#include "adiab/potential.hpp"

namespace adiab {

/// i eps d_t psi = -1/2 psi'' + V psi + lambda eps^alpha |psi|^{2 sigma} psi.
struct SolverParams {
  double epsilon = 0.1;
  double lambda = 0.0;
  int sigma = 1;
  double alpha = 1.0;
  double c_dt = 0.01;  // dt = c_dt * eps, rounded down to land on sample times
  long max_steps = 50'000'000;

  double coupling() const;  // lambda eps^alpha
  /// Throws DomainError on out-of-range parameters.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> fields;
  std::vector<double> mass;       // ||psi(t)||_{L2}
  std::vector<double> tail_mass;  // mass within 10% of the domain edge
  long steps = 0;
};

/// One Strang step K(dt/2) P(dt) K(dt/2).  dt may be negative.  Throws Error
/// if the result is not finite.
Field strang_step(const Field& psi, double t, double dt, const PotentialSpec& spec, const SolverParams& params);

/// Integrates from sample_times.front() through every listed time (monotone
/// in either direction), recording the state at each.  The step is the
/// largest dt <= c_dt * eps that divides each sample interval.
Trajectory propagate(const Field& psi_in, const PotentialSpec& spec, const SolverParams& params,
                     const std::vector<double>& sample_times);

/// Same with `samples` equal intervals between t0 and t1.
Trajectory propagate(const Field& psi_in, const PotentialSpec& spec, const SolverParams& params, double t0,
                     double t1, int samples = 200);

/// CSV with columns t, mass, tail_mass.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

}  // namespace adiab
