#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adiab/adiabatic.hpp"
#include "adiab/propagator.hpp"

namespace adiab {

enum class NormKind { L2, H1 };

/// max_i ||traj(t_i) - reference(t_i)|| over the trajectory samples.
double sup_distance(const Trajectory& traj, const std::function<Field(double)>& reference, NormKind kind);

/// sup_t ||psi(t) - psi_N(t)|| against the approximant truncated at `order`.
/// Every sample time must be a branch mesh point (DomainError otherwise).
double sup_error(const Trajectory& traj, const Approximant& approx, double eps, NormKind kind, int order = -1);

/// Operator norm of |psi><psi| - |phi><phi| on L2, evaluated exactly on the
/// span of the two vectors; the vectors need not be normalized.
double projector_distance(const Field& psi, const Field& phi);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_deviation = 0.0;  // largest |residual| of the log-log fit
  int points = 0;
  std::vector<std::size_t> excluded;  // indices with non-positive error
};

/// Least squares of log(error) against log(eps).  Non-positive errors are
/// skipped; fewer than three usable points is a DomainError.
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& errors);

}  // namespace adiab
