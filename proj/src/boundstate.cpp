#include "adiab/boundstate.hpp"

#include <cmath>
#include <fstream>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"
#include "adiab/krylov.hpp"

namespace adiab {

double nonlinear_mu(const Field& chi, double lambda, int sigma) {
  if (sigma < 1) throw DomainError("sigma must be a positive integer");
  const double p = 2.0 * sigma + 2.0;
  return lambda * std::pow(norm_lp(chi, p), p);
}

Field bifurcation_predictor(const EigenPair& pair, double lambda, int sigma, double E_star) {
  const double d = E_star - pair.E;
  if (d == 0.0) return Field(pair.chi.grid());
  if (lambda == 0.0) throw DomainError("no bifurcating branch for lambda = 0 away from E");
  if (d / lambda < 0.0)
    throw DomainError("E* - E must have the sign of lambda (lambda > 0: E < E* < 0, lambda < 0: E* < E)");
  const double mu = nonlinear_mu(pair.chi, lambda, sigma);
  Field out = pair.chi;
  out *= std::pow(d / mu, 1.0 / (2.0 * sigma));
  return out;
}

namespace {

Field stationary_map(const Hamiltonian& H, const Field& Phi, double lambda, int sigma, double E_star) {
  Field r = H.apply(Phi);
  for (int j = 0; j < Phi.size(); ++j)
    r[j] += (lambda * kernels::abs_pow2s(Phi[j], sigma) - E_star) * Phi[j];
  return r;
}

// Removes a global phase (taken from the largest sample), then drops the
// imaginary part.
void make_real(Field& f) {
  int jmax = 0;
  for (int j = 1; j < f.size(); ++j)
    if (std::abs(f[j]) > std::abs(f[jmax])) jmax = j;
  const cplx rot = std::abs(f[jmax]) > 0.0 ? std::conj(f[jmax]) / std::abs(f[jmax]) : cplx(1.0);
  for (int j = 0; j < f.size(); ++j) f[j] = (rot * f[j]).real();
}

double rayleigh_energy(const Hamiltonian& H, const Field& Phi, double lambda, int sigma) {
  const Field r = stationary_map(H, Phi, lambda, sigma, 0.0);
  return inner_product(Phi, r).real() / inner_product(Phi, Phi).real();
}

// Normalized imaginary-time split step at fixed mass.
void gradient_flow(const Hamiltonian& H, Field& Phi, double lambda, int sigma, double mass, int steps, double tau) {
  const Grid1D& g = H.grid();
  const auto k = g.wavenumbers();
  const auto v = H.potential();
  CVec half(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) half[m] = std::exp(-0.25 * tau * k[m] * k[m]);
  CVec buf(k.size());
  for (int s = 0; s < steps; ++s) {
    g.forward(Phi.values(), buf);
    kernels::multiply(buf, half);
    g.backward(buf, Phi.values());
    for (int j = 0; j < Phi.size(); ++j)
      Phi[j] *= std::exp(-tau * (v[static_cast<std::size_t>(j)] + lambda * kernels::abs_pow2s(Phi[j], sigma)));
    g.forward(Phi.values(), buf);
    kernels::multiply(buf, half);
    g.backward(buf, Phi.values());
    make_real(Phi);
    Phi *= mass / norm_l2(Phi);
  }
}

}  // namespace

double stationary_residual(const Hamiltonian& H, const Field& Phi, double lambda, int sigma, double E_star) {
  return norm_l2(stationary_map(H, Phi, lambda, sigma, E_star));
}

BoundState solve_stationary(const Hamiltonian& H, const EigenPair& pair, double lambda, int sigma, double mass,
                            const BoundStateOptions& opts, const BoundState* seed) {
  if (sigma < 1) throw DomainError("sigma must be a positive integer");
  if (!(mass > 0.0)) throw DomainError("bound-state mass must be positive");
  if (mass > opts.mass_max)
    throw DomainError("mass " + std::to_string(mass) + " exceeds configured maximum " + std::to_string(opts.mass_max));
  const Grid1D& g = H.grid();
  const int n = g.size();
  const double h = g.spacing();

  bool used_fallback = false;
  Field Phi(g);
  double E = 0.0;
  if (seed) {
    Phi = seed->Phi;
    Phi *= mass / norm_l2(Phi);
    E = seed->E_star;
  } else {
    Phi = pair.chi;
    make_real(Phi);
    Phi *= mass / norm_l2(Phi);
    E = pair.E + nonlinear_mu(pair.chi, lambda, sigma) * std::pow(mass, 2.0 * sigma);
  }
  if (stationary_residual(H, Phi, lambda, sigma, E) > opts.fallback_threshold) {
    gradient_flow(H, Phi, lambda, sigma, mass, opts.fallback_steps, opts.fallback_tau);
    E = rayleigh_energy(H, Phi, lambda, sigma);
    used_fallback = true;
  }

  // Bordered Newton system [[A, -Phi], [-<Phi, .>, 0]] with
  // A = H - E + (2 sigma + 1) lambda Phi^{2 sigma}; symmetric in the h-weighted dot.
  const auto nn = static_cast<std::size_t>(n);
  const auto dot = [h, nn](const CVec& a, const CVec& b) {
    return h * kernels::dot(std::span(a).first(nn), std::span(b).first(nn)) + std::conj(a[nn]) * b[nn];
  };
  const double shift = std::max(1.0, std::abs(E));
  const auto precond = [&](const CVec& in, CVec& out) {
    out.resize(in.size());
    H.apply_kinetic_inverse(std::span(in).first(nn), std::span(out).first(nn), shift);
    out[nn] = in[nn];
  };

  double res = stationary_residual(H, Phi, lambda, sigma, E);
  int it = 0;
  for (; it < opts.max_newton && res > opts.tol; ++it) {
    std::vector<double> w(nn);
    for (std::size_t j = 0; j < nn; ++j)
      w[j] = (2.0 * sigma + 1.0) * lambda * kernels::abs_pow2s(Phi[static_cast<int>(j)], sigma) - E;
    const auto apply = [&](const CVec& in, CVec& out) {
      out.resize(in.size());
      H.apply(std::span(in).first(nn), std::span(out).first(nn));
      cplx c = 0.0;
      for (std::size_t j = 0; j < nn; ++j) {
        const cplx phi = Phi.values()[j];
        out[j] += w[j] * in[j] - phi * in[nn];
        c += phi * in[j];
      }
      out[nn] = -h * c;
    };
    const Field F = stationary_map(H, Phi, lambda, sigma, E);
    CVec b(nn + 1);
    for (std::size_t j = 0; j < nn; ++j) b[j] = -F.values()[j];
    b[nn] = -0.5 * (mass * mass - std::pow(norm_l2(Phi), 2));
    CVec x(nn + 1, 0.0);
    minres(apply, precond, b, x, dot, {1e-13, 4000});
    for (std::size_t j = 0; j < nn; ++j) Phi.values()[j] += x[j].real();
    E += x[nn].real();
    res = stationary_residual(H, Phi, lambda, sigma, E);
  }
  if (!std::isfinite(res)) throw ConvergenceError("bound-state Newton diverged", res);

  Phi *= mass / norm_l2(Phi);
  if (inner_product(Phi, pair.chi).real() < 0.0) Phi *= -1.0;
  E = rayleigh_energy(H, Phi, lambda, sigma);
  res = stationary_residual(H, Phi, lambda, sigma, E);
  if (res > opts.accept) throw ConvergenceError("bound-state Newton did not converge", res);
  if (std::abs(norm_l2(Phi) - mass) > 1e-10) throw Error("bound-state mass constraint violated");
  if ((lambda > 0.0 && !(E > pair.E && E < 0.0)) || (lambda < 0.0 && !(E < pair.E)))
    throw Error("bound state left the bifurcating branch (E* = " + std::to_string(E) + ", E = " +
                std::to_string(pair.E) + ")");
  return BoundState{pair.t, std::move(Phi), E, pair.E, mass, res, it, used_fallback};
}

BoundState solve_stationary(const PotentialSpec& spec, const Grid1D& grid, double t, double lambda, int sigma,
                            double mass, const BoundStateOptions& opts) {
  const Hamiltonian H = Hamiltonian::at(spec, t, grid);
  const auto pairs = lowest_eigenpairs(H, opts.which + 1, {}, nullptr, t);
  if (static_cast<int>(pairs.size()) <= opts.which) throw GapError("linear eigenvalue is not bound", t);
  return solve_stationary(H, pairs[static_cast<std::size_t>(opts.which)], lambda, sigma, mass, opts);
}

std::vector<BoundState> track_family(const EigenBranch& branch, double lambda, int sigma, double mass,
                                     const BoundStateOptions& opts) {
  std::vector<BoundState> out;
  out.reserve(static_cast<std::size_t>(branch.size()));
  for (int i = 0; i < branch.size(); ++i) {
    const double t = branch.times[static_cast<std::size_t>(i)];
    try {
      const Hamiltonian H = Hamiltonian::at(branch.spec, t, branch.grid);
      out.push_back(solve_stationary(H, branch.pairs[static_cast<std::size_t>(i)], lambda, sigma, mass, opts,
                                     out.empty() ? nullptr : &out.back()));
    } catch (const Error& e) {
      throw Error("bound-state continuation failed at t = " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

std::vector<BoundState> track_family(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& times,
                                     double lambda, int sigma, double mass, const BoundStateOptions& opts) {
  const EigenBranch br = track_branch(spec, grid, times, opts.which, GaugeMode::real_aligned);
  return track_family(br, lambda, sigma, mass, opts);
}

void write_family_csv(const std::vector<BoundState>& family, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << "t,E_star,E,E_star_minus_E,residual\n";
  for (const auto& b : family)
    out << b.t << ',' << b.E_star << ',' << b.E_linear << ',' << b.E_star - b.E_linear << ',' << b.residual << '\n';
}

}  // namespace adiab
