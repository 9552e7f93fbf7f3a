#pragma once

#include <filesystem>
#include <vector>

#include "adiab/eigen.hpp"

namespace adiab {

/// Real solution of -1/2 Phi'' + V Phi + lambda |Phi|^{2 sigma} Phi = E* Phi
/// with ||Phi|| = mass and <Phi, chi> > 0.
struct BoundState {
  double t = 0.0;
  Field Phi;
  double E_star = 0.0;
  double E_linear = 0.0;  // E of the linear branch the state bifurcates from
  double mass = 0.0;
  double residual = 0.0;
  int newton_iterations = 0;
  bool used_fallback = false;
};

struct BoundStateOptions {
  int which = 0;                     // linear eigenpair to bifurcate from
  double tol = 1e-11;                // target stationary residual
  double accept = 1e-9;              // residual above this is a failure
  int max_newton = 40;
  double mass_max = 0.5;
  double fallback_threshold = 1e-2;  // seed residual that triggers the gradient flow
  int fallback_steps = 50;
  double fallback_tau = 0.05;
};

/// mu = lambda ||chi||_{2 sigma + 2}^{2 sigma + 2}.
double nonlinear_mu(const Field& chi, double lambda, int sigma);

/// ((E* - E) / mu)^{1 / (2 sigma)} chi.  Requires (E* - E) / lambda >= 0;
/// E* = E gives the zero field.
Field bifurcation_predictor(const EigenPair& pair, double lambda, int sigma, double E_star);

/// ||H Phi + lambda |Phi|^{2 sigma} Phi - E* Phi||_{L2}.
double stationary_residual(const Hamiltonian& H, const Field& Phi, double lambda, int sigma, double E_star);

/// Newton on (Phi, E*) with the mass constraint, seeded from the linear pair
/// (or from `seed` when given).
BoundState solve_stationary(const Hamiltonian& H, const EigenPair& pair, double lambda, int sigma, double mass,
                            const BoundStateOptions& opts = {}, const BoundState* seed = nullptr);
BoundState solve_stationary(const PotentialSpec& spec, const Grid1D& grid, double t, double lambda, int sigma,
                            double mass, const BoundStateOptions& opts = {});

/// Fixed-mass family along a tracked branch, each solve seeded by the
/// previous member.  Errors carry the failing time.
std::vector<BoundState> track_family(const EigenBranch& branch, double lambda, int sigma, double mass,
                                     const BoundStateOptions& opts = {});
std::vector<BoundState> track_family(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& times,
                                     double lambda, int sigma, double mass, const BoundStateOptions& opts = {});

/// CSV with columns t, E_star, E, E_star_minus_E, residual.
void write_family_csv(const std::vector<BoundState>& family, const std::filesystem::path& path);

}  // namespace adiab
