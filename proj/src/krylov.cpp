#include "adiab/krylov.hpp"

#include <cmath>

#include "adiab/kernels.hpp"

namespace adiab {

namespace {

double real_sqrt_dot(const VecDot& dot, const CVec& a, const CVec& b) {
  const double v = dot(a, b).real();
  return std::sqrt(std::max(v, 0.0));
}

}  // namespace

// Lanczos-based MINRES with Givens updates (Elman-Silvester-Wathen layout).
KrylovResult minres(const VecOp& apply, const VecOp& precondition, const CVec& b, CVec& x, const VecDot& dot,
                    const KrylovOptions& opts) {
  const std::size_t n = b.size();
  KrylovResult res;
  auto precond = [&](const CVec& in, CVec& out) {
    if (precondition)
      precondition(in, out);
    else
      out = in;
  };

  CVec v_prev(n, 0.0), v(n), z(n), az(n), v_next(n), z_next(n);
  CVec w_prev(n, 0.0), w(n, 0.0), w_next(n);

  apply(x, az);
  for (std::size_t i = 0; i < n; ++i) v[i] = b[i] - az[i];
  precond(v, z);
  double gamma = real_sqrt_dot(dot, z, v);
  const double gamma1 = gamma;
  const double bnorm = std::sqrt(std::max(dot(b, b).real(), 0.0));
  if (gamma1 == 0.0) {
    res.converged = true;
    res.residual = std::sqrt(std::max(dot(v, v).real(), 0.0));
    return res;
  }
  double gamma_prev = 1.0;
  double eta = gamma;
  double s_prev = 0.0, s = 0.0, c_prev = 1.0, c = 1.0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    res.iterations = it;
    for (auto& e : z) e /= gamma;
    apply(z, az);
    const double delta = dot(az, z).real();
    for (std::size_t i = 0; i < n; ++i)
      v_next[i] = az[i] - (delta / gamma) * v[i] - (gamma / gamma_prev) * v_prev[i];
    precond(v_next, z_next);
    const double gamma_next = real_sqrt_dot(dot, z_next, v_next);

    const double a0 = c * delta - c_prev * s * gamma;
    const double a1 = std::hypot(a0, gamma_next);
    const double a2 = s * delta + c_prev * c * gamma;
    const double a3 = s_prev * gamma;
    const double c_next = a0 / a1;
    const double s_next = gamma_next / a1;
    for (std::size_t i = 0; i < n; ++i) w_next[i] = (z[i] - a3 * w_prev[i] - a2 * w[i]) / a1;
    kernels::axpy(c_next * eta, w_next, x);
    eta = -s_next * eta;

    std::swap(w_prev, w);
    std::swap(w, w_next);
    std::swap(v_prev, v);
    std::swap(v, v_next);
    std::swap(z, z_next);
    gamma_prev = gamma;
    gamma = gamma_next;
    s_prev = s;
    s = s_next;
    c_prev = c;
    c = c_next;

    if (std::abs(eta) <= opts.rel_tol * gamma1 || gamma == 0.0) {
      res.converged = true;
      break;
    }
  }

  apply(x, az);
  for (std::size_t i = 0; i < n; ++i) az[i] = b[i] - az[i];
  res.residual = std::sqrt(std::max(dot(az, az).real(), 0.0));
  if (!res.converged && res.residual <= opts.rel_tol * std::max(bnorm, 1e-300)) res.converged = true;
  return res;
}

}  // namespace adiab
