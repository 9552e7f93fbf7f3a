#include "adiab/metrics.hpp"

#include <cmath>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"

namespace adiab {

double sup_distance(const Trajectory& traj, const std::function<Field(double)>& reference, NormKind kind) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    Field d = traj.fields[i] - reference(traj.times[i]);
    worst = std::max(worst, kind == NormKind::L2 ? norm_l2(d) : sobolev_norm(d, 1));
  }
  return worst;
}

double sup_error(const Trajectory& traj, const Approximant& approx, double eps, NormKind kind, int order) {
  for (double t : traj.times)
    if (!approx.branch.index_of(t))
      throw DomainError("trajectory sample t = " + std::to_string(t) + " is not on the approximant mesh");
  return sup_distance(traj, [&](double t) { return assemble(approx, eps, t, order); }, kind);
}

double projector_distance(const Field& psi, const Field& phi) {
  require_same_grid(psi, phi);
  const double a = norm_l2(psi);
  const double b = norm_l2(phi);
  if (a == 0.0) return b * b;
  if (b == 0.0) return a * a;
  // psi = a e1, phi = c1 e1 + c2 e2; the 2x2 matrix of the difference has
  // trace a^2 - b^2 and determinant -a^2 |c2|^2.
  const cplx c1 = inner_product(psi, phi) / a;
  Field perp = phi;
  kernels::axpy(-c1 / a, psi.values(), perp.values());
  const double c2 = norm_l2(perp);
  const double tr = a * a - b * b;
  return 0.5 * std::abs(tr) + std::sqrt(0.25 * tr * tr + a * a * c2 * c2);
}

SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw DomainError("fit_slope: list lengths differ");
  SlopeFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(errors[i] > 0.0) || !(eps[i] > 0.0)) {
      fit.excluded.push_back(i);
      continue;
    }
    x.push_back(std::log(eps[i]));
    y.push_back(std::log(errors[i]));
  }
  fit.points = static_cast<int>(x.size());
  if (fit.points < 3) throw DomainError("fit_slope needs at least three positive entries");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_slope needs distinct epsilon values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    fit.max_deviation = std::max(fit.max_deviation, std::abs(y[i] - (fit.intercept + fit.slope * x[i])));
  return fit;
}

}  // namespace adiab
