#pragma once

#include <vector>

#include "adiab/eigen.hpp"

namespace adiab {

/// Phase tables on the branch mesh.  All cumulative integrals start at 0 at t0.
///
/// The nonlinear phase is stored for the raw coupling lambda; the phase that
/// enters the approximant is theta_scale * theta_raw, where theta_scale is
/// eps^(alpha - 1) (1 for the critical scaling, 0 when theta is dropped).
struct PhaseSet {
  std::vector<double> times;
  std::vector<double> phi;        // int E
  std::vector<cplx> beta;         // int <chi, d_t chi>, purely imaginary
  std::vector<cplx> beta_rate;
  std::vector<double> theta_raw;  // lambda int ||chi||_{2 sigma + 2}^{2 sigma + 2}
  std::vector<double> theta_rate_raw;
  double lambda = 0.0;
  int sigma = 1;
  double alpha = 1.0;
  double theta_scale = 1.0;

  double theta(int i) const { return theta_scale * theta_raw[static_cast<std::size_t>(i)]; }
  double theta_rate(int i) const { return theta_scale * theta_rate_raw[static_cast<std::size_t>(i)]; }
};

/// d_t chi at every mesh point of the branch.
std::vector<Field> dchi_table(const EigenBranch& branch);

PhaseSet compute_phases(const EigenBranch& branch, const std::vector<Field>& dchi, double lambda, int sigma,
                        double theta_scale = 1.0);
PhaseSet compute_phases(const EigenBranch& branch, double lambda, int sigma, double theta_scale = 1.0);

/// Cumulative integral of samples on a uniform mesh: composite Simpson at even
/// indices, Simpson plus a 3/8 panel at odd ones.
std::vector<double> cumulative_integral(const std::vector<double>& f, double dt);
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double dt);

/// phi(t) = int_{t0}^t E.  Cubic interpolation between mesh points; throws
/// DomainError outside the branch interval.
double dynamic_phase(const EigenBranch& branch, double t);
/// beta(t) = int_{t0}^t <chi, d_t chi> with the inner product conjugate-linear
/// in its first slot.
cplx berry_phase(const EigenBranch& branch, double t);
/// theta(t) = lambda int_{t0}^t ||chi||_{2 sigma + 2}^{2 sigma + 2}.
double nonlinear_phase(const EigenBranch& branch, double lambda, int sigma, double t);

/// U0 = chi exp(-beta - i theta) on the mesh, theta already scaled.
Field leading_amplitude(const EigenBranch& branch, const PhaseSet& phases, double t);

/// v1 = L_E^{-1}(1 - P)(i d_t U0 - lambda |U0|^{2 sigma} U0) at a mesh time.
Field corrector_v1(const EigenBranch& branch, const PhaseSet& phases, double lambda, int sigma, double t);

/// u1 on the mesh (u1(t0) = 0) from
///   u1' + beta' u1 + <chi, d_t v1> = -i lambda <chi, DF(U0)[u1 chi + v1]>,
/// integrated with classical RK4.
std::vector<cplx> coefficient_u1(const EigenBranch& branch, const PhaseSet& phases, double lambda, int sigma);

struct ApproximantOptions {
  int order = 1;  // 0, 1 or 2
  double lambda = 0.0;
  int sigma = 1;
  /// Nonlinearity exponent; for alpha != 1 the tables use the effective
  /// coupling lambda * epsilon^(alpha - 1) and are tied to `epsilon`.
  double alpha = 1.0;
  double epsilon = 1.0;
  /// False drops theta from the phases (falsification experiments).
  bool include_theta = true;
};

/// Assembled data for psi_N = exp(-i phi / eps) sum_n eps^n U_n with
/// U_n = u_n chi + v_n, tabulated on the branch mesh.
struct Approximant {
  EigenBranch branch;
  ApproximantOptions options;
  double coupling = 0.0;  // lambda eps^(alpha - 1)
  PhaseSet phases;
  std::vector<Field> dchi;
  std::vector<Field> U0, dU0;
  std::vector<cplx> u1, du1, u2, du2;
  std::vector<Field> v1, v2;

  int order() const { return options.order; }
  const std::vector<double>& times() const { return branch.times; }
};

Approximant build_approximant(const EigenBranch& branch, const ApproximantOptions& opts);

/// chi(t0) + eps gamma with gamma = sum_{n=1}^{N} eps^{n-1} v_n(t0).
Field well_prepared_initial_data(const Approximant& a, double eps);

/// psi_N(t) truncated at `order` (default: the approximant's order).  Cubic
/// interpolation of the slow part between mesh points; the fast phase
/// exp(-i phi / eps) is applied after interpolating phi.
Field assemble(const Approximant& a, double eps, double t, int order = -1);

struct Residual {
  Field field;
  double norm = 0.0;
  double differencing_error = 0.0;  // estimated error of the mesh differences
  bool differencing_dominated = false;
};

/// r = i eps d_t psi_N - H psi_N - lambda eps^alpha |psi_N|^{2 sigma} psi_N at
/// a mesh time.  The fast phase and d_t of U0, u_n are taken analytically;
/// d_t v_n uses fourth-order mesh differences, and the stencil on the doubled
/// mesh provides the differencing error estimate.
Residual pde_residual(const Approximant& a, double eps, double t, int order = -1);

}  // namespace adiab
