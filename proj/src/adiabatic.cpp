#include "adiab/adiabatic.hpp"

#include <algorithm>
#include <cmath>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"

namespace adiab {

namespace {

template <class T>
std::vector<T> cumulative(const std::vector<T>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<T> out(n, T(0.0));
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * dt * (f[0] + f[1]);
    return out;
  }
  out[1] = n >= 4 ? dt / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
                  : dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  std::vector<T> even(n, T(0.0));  // Simpson prefix sums at even indices
  for (std::size_t i = 2; i < n; i += 2) even[i] = even[i - 2] + dt / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
  for (std::size_t i = 2; i < n; ++i) {
    if (i % 2 == 0) {
      out[i] = even[i];
    } else {
      out[i] = even[i - 3] + 3.0 * dt / 8.0 * (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i]);
    }
  }
  return out;
}

struct Stencil {
  int i0 = 0;
  double w[4] = {0.0, 0.0, 0.0, 0.0};
  int count = 1;
};

// Four-point Lagrange stencil for t on a uniform mesh; exact hits use one node.
Stencil cubic_stencil(const std::vector<double>& times, double t) {
  const int m = static_cast<int>(times.size()) - 1;
  const double t0 = times.front(), t1 = times.back();
  const double tol = 1e-12 * std::max(1.0, std::abs(t1 - t0));
  if (t < t0 - tol || t > t1 + tol)
    throw DomainError("time " + std::to_string(t) + " outside branch mesh [" + std::to_string(t0) + ", " +
                      std::to_string(t1) + "]");
  Stencil st;
  if (m == 0) {
    st.w[0] = 1.0;
    return st;
  }
  const double dt = (t1 - t0) / m;
  const double s = (t - t0) / dt;
  const long near = std::lround(s);
  if (std::abs(s - static_cast<double>(near)) < 1e-9) {
    st.i0 = static_cast<int>(std::clamp<long>(near, 0, m));
    st.w[0] = 1.0;
    return st;
  }
  if (m < 3) throw DomainError("cubic interpolation needs at least four mesh points");
  st.i0 = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, m - 3);
  st.count = 4;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (s - (st.i0 + b)) / static_cast<double>(a - b);
    st.w[a] = w;
  }
  return st;
}

template <class T, class Fn>
T interpolate(const Stencil& st, Fn&& at) {
  T acc = at(st.i0) * st.w[0];
  for (int a = 1; a < st.count; ++a) acc += at(st.i0 + a) * st.w[a];
  return acc;
}

Field interpolate_field(const Stencil& st, const std::function<Field(int)>& at) {
  Field acc = at(st.i0);
  acc *= st.w[0];
  for (int a = 1; a < st.count; ++a) {
    Field f = at(st.i0 + a);
    kernels::axpy(st.w[a], f.values(), acc.values());
  }
  return acc;
}

int mesh_index(const EigenBranch& br, double t) {
  const auto i = br.index_of(t);
  if (!i) throw DomainError("time " + std::to_string(t) + " is not a branch mesh point");
  return *i;
}

// Fourth-order mesh derivative of a field table with step stride * dt:
// the centered five-point stencil inside, shifted one-sided stencils near
// the ends.
Field mesh_derivative(const std::vector<Field>& f, int i, int stride, double dt) {
  static constexpr double kW[5][5] = {
      {-25.0, 48.0, -36.0, 16.0, -3.0},  // offsets 0..4
      {-3.0, -10.0, 18.0, -6.0, 1.0},    // offsets -1..3
      {1.0, -8.0, 0.0, 8.0, -1.0},       // offsets -2..2
      {-1.0, 6.0, -18.0, 10.0, 3.0},     // offsets -3..1
      {3.0, -16.0, 36.0, -48.0, 25.0},   // offsets -4..0
  };
  const int m = static_cast<int>(f.size()) - 1;
  const int s = stride;
  if (m < 4 * s) throw DomainError("mesh too short for differencing");
  const int back = std::min(i / s, 2 + std::max(0, 2 - (m - i) / s));
  const int first = i - back * s;
  const double* w = kW[back];
  Field out(f[static_cast<std::size_t>(i)].grid());
  auto v = out.values();
  for (int k = 0; k < 5; ++k) {
    if (w[k] == 0.0) continue;
    kernels::axpy(w[k] / (12.0 * s * dt), f[static_cast<std::size_t>(first + k * s)].values(), v);
  }
  return out;
}

cplx ipow(cplx z, int n) {
  cplx out = 1.0;
  for (int k = 0; k < n; ++k) out *= z;
  return out;
}

// F(z) = |z|^{2 sigma} z and its Taylor terms around z.
Field nonlinearity(const Field& z, int sigma) {
  Field out = z;
  for (int j = 0; j < out.size(); ++j) out[j] *= kernels::abs_pow2s(z[j], sigma);
  return out;
}

Field dF(const Field& z, const Field& w, int sigma) {
  Field out(z.grid());
  for (int j = 0; j < z.size(); ++j) {
    const cplx a = z[j];
    const double r = kernels::abs_pow2s(a, sigma - 1);
    out[j] = (sigma + 1.0) * r * std::norm(a) * w[j] + static_cast<double>(sigma) * r * a * a * std::conj(w[j]);
  }
  return out;
}

Field half_d2F(const Field& z, const Field& w, int sigma) {
  Field out(z.grid());
  const double s = sigma;
  for (int j = 0; j < z.size(); ++j) {
    const cplx a = z[j], ac = std::conj(a), b = w[j], bc = std::conj(w[j]);
    cplx v = 0.5 * (s + 1.0) * s * ipow(a, sigma - 1) * ipow(ac, sigma) * b * b +
             (s + 1.0) * s * ipow(a, sigma) * ipow(ac, sigma - 1) * b * bc;
    if (sigma >= 2) v += 0.5 * s * (s - 1.0) * ipow(a, sigma + 1) * ipow(ac, sigma - 2) * bc * bc;
    out[j] = v;
  }
  return out;
}

double power_integral(const Field& chi, int sigma) {
  const double p = 2.0 * sigma + 2.0;
  return std::pow(norm_lp(chi, p), p);
}

// Linear real ODE u' = p u + q conj(u) + r on the mesh, u(t0) = 0, RK4 with
// cubic interpolation of the coefficients at half steps.
std::vector<cplx> integrate_linear(const std::vector<double>& times, const std::vector<cplx>& p,
                                   const std::vector<cplx>& q, const std::vector<cplx>& r) {
  const std::size_t n = times.size();
  std::vector<cplx> u(n, 0.0);
  if (n < 2) return u;
  const double dt = (times.back() - times.front()) / static_cast<double>(n - 1);
  auto coef = [&](double t, cplx& pp, cplx& qq, cplx& rr) {
    const Stencil st = cubic_stencil(times, t);
    auto take = [&](const std::vector<cplx>& tab) {
      return interpolate<cplx>(st, [&](int k) { return tab[static_cast<std::size_t>(k)]; });
    };
    pp = take(p);
    qq = take(q);
    rr = take(r);
  };
  auto rhs = [](cplx uu, cplx pp, cplx qq, cplx rr) { return pp * uu + qq * std::conj(uu) + rr; };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double t = times[i];
    cplx p0 = p[i], q0 = q[i], r0 = r[i], ph, qh, rh;
    coef(t + 0.5 * dt, ph, qh, rh);
    const cplx p1 = p[i + 1], q1 = q[i + 1], r1 = r[i + 1];
    const cplx k1 = rhs(u[i], p0, q0, r0);
    const cplx k2 = rhs(u[i] + 0.5 * dt * k1, ph, qh, rh);
    const cplx k3 = rhs(u[i] + 0.5 * dt * k2, ph, qh, rh);
    const cplx k4 = rhs(u[i] + dt * k3, p1, q1, r1);
    u[i + 1] = u[i] + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

Hamiltonian hamiltonian_at(const EigenBranch& br, int i) {
  return Hamiltonian::at(br.spec, br.times[static_cast<std::size_t>(i)], br.grid);
}

Field amplitude_at(const EigenBranch& br, const PhaseSet& ph, int i) {
  Field u = br.chi(i);
  u *= std::exp(-ph.beta[static_cast<std::size_t>(i)] - cplx(0.0, ph.theta(i)));
  return u;
}

// Fills U0 and, up to the requested order, v_n and u_n.
void build_tables(Approximant& a) {
  const EigenBranch& br = a.branch;
  const PhaseSet& ph = a.phases;
  const int m = br.size();
  const int sigma = a.options.sigma;
  const double g = a.coupling;
  const double dt = br.step();
  const cplx I(0.0, 1.0);

  a.U0.clear();
  a.dU0.clear();
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    Field u0 = amplitude_at(br, ph, i);
    const cplx c = std::exp(-ph.beta[si] - I * ph.theta(i));
    Field d = a.dchi[si];
    kernels::axpy(-(ph.beta_rate[si] + I * ph.theta_rate(i)), br.chi(i).values(), d.values());
    d *= c;
    a.U0.push_back(std::move(u0));
    a.dU0.push_back(std::move(d));
  }
  if (a.options.order < 1) return;

  a.v1.clear();
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    Field rhs = I * a.dU0[si];
    if (g != 0.0) rhs -= g * nonlinearity(a.U0[si], sigma);
    a.v1.push_back(partial_resolvent_solve(hamiltonian_at(br, i), br.energy(i), br.chi(i), rhs));
  }

  // Coefficients shared by the u1 and u2 equations.
  std::vector<cplx> p(static_cast<std::size_t>(m)), q(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Field& chi = br.chi(i);
    cplx A = 0.0, B = 0.0;
    if (g != 0.0) {
      // DF(U0)[u chi] = u A' + conj(u) B' with A' = (sigma+1)|U0|^{2 sigma} chi
      // and B' = sigma |U0|^{2 sigma - 2} U0^2 conj(chi).
      Field a_part(chi.grid()), b_part(chi.grid());
      for (int j = 0; j < chi.size(); ++j) {
        const cplx z = a.U0[si][j];
        const double r = kernels::abs_pow2s(z, sigma - 1);
        a_part[j] = (sigma + 1.0) * r * std::norm(z) * chi[j];
        b_part[j] = static_cast<double>(sigma) * r * z * z * std::conj(chi[j]);
      }
      A = inner_product(chi, a_part);
      B = inner_product(chi, b_part);
    }
    p[si] = -ph.beta_rate[si] - I * g * A;
    q[si] = -I * g * B;
  }
  auto solve_u = [&](const std::vector<Field>& v, const std::vector<Field>* second,
                     std::vector<cplx>& u, std::vector<cplx>& du) {
    std::vector<cplx> r(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const Field& chi = br.chi(i);
      const Field dv = mesh_derivative(v, i, 1, dt);
      cplx src = -inner_product(chi, dv);
      if (g != 0.0) {
        cplx nl = inner_product(chi, dF(a.U0[si], v[si], sigma));
        if (second) nl += inner_product(chi, (*second)[si]);
        src += -I * g * nl;
      }
      r[si] = src;
    }
    u = integrate_linear(br.times, p, q, r);
    du.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) du[i] = p[i] * u[i] + q[i] * std::conj(u[i]) + r[i];
  };
  solve_u(a.v1, nullptr, a.u1, a.du1);
  if (a.options.order < 2) return;

  a.v2.clear();
  std::vector<Field> quad;
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    const Field& chi = br.chi(i);
    Field U1 = a.v1[si];
    kernels::axpy(a.u1[si], chi.values(), U1.values());
    Field dU1 = mesh_derivative(a.v1, i, 1, dt);
    kernels::axpy(a.du1[si], chi.values(), dU1.values());
    kernels::axpy(a.u1[si], a.dchi[si].values(), dU1.values());
    Field rhs = I * dU1;
    if (g != 0.0) {
      rhs -= g * dF(a.U0[si], U1, sigma);
      quad.push_back(half_d2F(a.U0[si], U1, sigma));
    }
    a.v2.push_back(partial_resolvent_solve(hamiltonian_at(br, i), br.energy(i), chi, rhs));
  }
  solve_u(a.v2, g != 0.0 ? &quad : nullptr, a.u2, a.du2);
}

}  // namespace

std::vector<double> cumulative_integral(const std::vector<double>& f, double dt) { return cumulative(f, dt); }
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double dt) { return cumulative(f, dt); }

std::vector<Field> dchi_table(const EigenBranch& branch) {
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(branch.size()));
  for (int i = 0; i < branch.size(); ++i) out.push_back(dchi_dt(branch, i));
  return out;
}

PhaseSet compute_phases(const EigenBranch& branch, const std::vector<Field>& dchi, double lambda, int sigma,
                        double theta_scale) {
  if (sigma < 1) throw DomainError("sigma must be a positive integer");
  const int m = branch.size();
  PhaseSet ph;
  ph.times = branch.times;
  ph.lambda = lambda;
  ph.sigma = sigma;
  ph.theta_scale = theta_scale;
  std::vector<double> E(static_cast<std::size_t>(m));
  ph.beta_rate.resize(static_cast<std::size_t>(m));
  ph.theta_rate_raw.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const auto si = static_cast<std::size_t>(i);
    E[si] = branch.energy(i);
    // beta is purely imaginary; drop the O(roundoff) real part of the rate.
    ph.beta_rate[si] = cplx(0.0, inner_product(branch.chi(i), dchi[si]).imag());
    ph.theta_rate_raw[si] = lambda == 0.0 ? 0.0 : lambda * power_integral(branch.chi(i), sigma);
  }
  const double dt = branch.step();
  ph.phi = cumulative(E, dt);
  ph.beta = cumulative(ph.beta_rate, dt);
  ph.theta_raw = cumulative(ph.theta_rate_raw, dt);
  return ph;
}

PhaseSet compute_phases(const EigenBranch& branch, double lambda, int sigma, double theta_scale) {
  return compute_phases(branch, dchi_table(branch), lambda, sigma, theta_scale);
}

double dynamic_phase(const EigenBranch& branch, double t) {
  std::vector<double> E(static_cast<std::size_t>(branch.size()));
  for (int i = 0; i < branch.size(); ++i) E[static_cast<std::size_t>(i)] = branch.energy(i);
  const auto phi = cumulative(E, branch.step());
  const Stencil st = cubic_stencil(branch.times, t);
  return interpolate<double>(st, [&](int k) { return phi[static_cast<std::size_t>(k)]; });
}

cplx berry_phase(const EigenBranch& branch, double t) {
  const Stencil st = cubic_stencil(branch.times, t);
  const PhaseSet ph = compute_phases(branch, 0.0, 1);
  return interpolate<cplx>(st, [&](int k) { return ph.beta[static_cast<std::size_t>(k)]; });
}

double nonlinear_phase(const EigenBranch& branch, double lambda, int sigma, double t) {
  if (sigma < 1) throw DomainError("sigma must be a positive integer");
  const Stencil st = cubic_stencil(branch.times, t);
  std::vector<double> rate(static_cast<std::size_t>(branch.size()));
  for (int i = 0; i < branch.size(); ++i)
    rate[static_cast<std::size_t>(i)] = lambda == 0.0 ? 0.0 : lambda * power_integral(branch.chi(i), sigma);
  const auto theta = cumulative(rate, branch.step());
  return interpolate<double>(st, [&](int k) { return theta[static_cast<std::size_t>(k)]; });
}

Field leading_amplitude(const EigenBranch& branch, const PhaseSet& phases, double t) {
  const Stencil st = cubic_stencil(branch.times, t);
  return interpolate_field(st, [&](int k) { return amplitude_at(branch, phases, k); });
}

Field corrector_v1(const EigenBranch& branch, const PhaseSet& phases, double lambda, int sigma, double t) {
  const int i = mesh_index(branch, t);
  const auto si = static_cast<std::size_t>(i);
  const cplx I(0.0, 1.0);
  const Field& chi = branch.chi(i);
  const cplx c = std::exp(-phases.beta[si] - I * phases.theta(i));
  Field rhs = dchi_dt(branch, i);
  kernels::axpy(-(phases.beta_rate[si] + I * phases.theta_rate(i)), chi.values(), rhs.values());
  rhs *= I * c;
  if (lambda != 0.0) rhs -= lambda * nonlinearity(amplitude_at(branch, phases, i), sigma);
  return partial_resolvent_solve(hamiltonian_at(branch, i), branch.energy(i), chi, rhs);
}

std::vector<cplx> coefficient_u1(const EigenBranch& branch, const PhaseSet& phases, double lambda, int sigma) {
  Approximant a{branch, {}, lambda, phases, dchi_table(branch), {}, {}, {}, {}, {}, {}, {}, {}};
  a.options.order = 1;
  a.options.lambda = lambda;
  a.options.sigma = sigma;
  build_tables(a);
  return a.u1;
}

Approximant build_approximant(const EigenBranch& branch, const ApproximantOptions& opts) {
  if (opts.order < 0 || opts.order > 2) throw DomainError("approximant order must be 0, 1 or 2");
  if (opts.sigma < 1) throw DomainError("sigma must be a positive integer");
  if (!(opts.alpha >= 1.0)) throw DomainError("alpha must be >= 1");
  if (!(opts.epsilon > 0.0 && opts.epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
  if (opts.order >= 1 && branch.size() < 5) throw DomainError("correctors need at least five mesh points");
  const double scale = opts.alpha == 1.0 ? 1.0 : std::pow(opts.epsilon, opts.alpha - 1.0);
  Approximant a{branch, opts, opts.lambda * scale, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  a.dchi = dchi_table(branch);
  a.phases = compute_phases(branch, a.dchi, opts.lambda, opts.sigma, opts.include_theta ? scale : 0.0);
  a.phases.alpha = opts.alpha;
  build_tables(a);
  return a;
}

Field well_prepared_initial_data(const Approximant& a, double eps) {
  Field psi = a.branch.chi(0);
  if (a.order() >= 1) kernels::axpy(eps, a.v1.front().values(), psi.values());
  if (a.order() >= 2) kernels::axpy(eps * eps, a.v2.front().values(), psi.values());
  return psi;
}

namespace {

Field slow_part(const Approximant& a, double eps, int i, int order) {
  const auto si = static_cast<std::size_t>(i);
  Field w = a.U0[si];
  const Field& chi = a.branch.chi(i);
  if (order >= 1) {
    kernels::axpy(eps, a.v1[si].values(), w.values());
    kernels::axpy(eps * a.u1[si], chi.values(), w.values());
  }
  if (order >= 2) {
    kernels::axpy(eps * eps, a.v2[si].values(), w.values());
    kernels::axpy(eps * eps * a.u2[si], chi.values(), w.values());
  }
  return w;
}

int resolve_order(const Approximant& a, int order) {
  if (order < 0) return a.order();
  if (order > a.order()) throw DomainError("requested order exceeds the built approximant");
  return order;
}

void check_epsilon(const Approximant& a, double eps) {
  if (a.options.alpha != 1.0 && std::abs(eps - a.options.epsilon) > 1e-14 * a.options.epsilon)
    throw DomainError("approximant was built for epsilon = " + std::to_string(a.options.epsilon));
}

}  // namespace

Field assemble(const Approximant& a, double eps, double t, int order) {
  check_epsilon(a, eps);
  const int n = resolve_order(a, order);
  const Stencil st = cubic_stencil(a.branch.times, t);
  Field w = interpolate_field(st, [&](int k) { return slow_part(a, eps, k, n); });
  const double phi = interpolate<double>(st, [&](int k) { return a.phases.phi[static_cast<std::size_t>(k)]; });
  w *= std::polar(1.0, -phi / eps);
  return w;
}

Residual pde_residual(const Approximant& a, double eps, double t, int order) {
  check_epsilon(a, eps);
  const int n = resolve_order(a, order);
  const int i = mesh_index(a.branch, t);
  const auto si = static_cast<std::size_t>(i);
  const EigenBranch& br = a.branch;
  if (n >= 1 && br.size() < 5) throw DomainError("residual guard needs at least five mesh points");
  const Field& chi = br.chi(i);
  const double dt = br.step();
  const cplx I(0.0, 1.0);

  Field W = slow_part(a, eps, i, n);
  Field dW = a.dU0[si];
  Field dW2 = a.dU0[si];
  auto add_order = [&](double weight, const std::vector<Field>& v, cplx u, cplx du) {
    Field d1 = mesh_derivative(v, i, 1, dt);
    Field d2 = mesh_derivative(v, i, 2, dt);
    Field common(chi.grid());
    kernels::axpy(du, chi.values(), common.values());
    kernels::axpy(u, a.dchi[si].values(), common.values());
    d1 += common;
    d2 += common;
    kernels::axpy(weight, d1.values(), dW.values());
    kernels::axpy(weight, d2.values(), dW2.values());
  };
  if (n >= 1) add_order(eps, a.v1, a.u1[si], a.du1[si]);
  if (n >= 2) add_order(eps * eps, a.v2, a.u2[si], a.du2[si]);

  const Hamiltonian H = hamiltonian_at(br, i);
  Field r = (I * eps) * dW;
  kernels::axpy(br.energy(i), W.values(), r.values());
  r -= H.apply(W);
  const double g = a.coupling * eps;  // lambda eps^alpha
  if (g != 0.0) r -= g * nonlinearity(W, a.options.sigma);
  r *= std::polar(1.0, -a.phases.phi[si] / eps);

  Residual out{r, norm_l2(r), 0.0, false};
  Field diff = dW - dW2;
  out.differencing_error = eps * norm_l2(diff) / 15.0;
  out.differencing_dominated = out.differencing_error > 0.1 * out.norm;
  return out;
}

}  // namespace adiab
