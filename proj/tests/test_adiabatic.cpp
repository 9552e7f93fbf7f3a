#include <functional>

#include "adiab/adiabatic.hpp"
#include "adiab/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adiab;
using namespace testutil;

namespace {

const EigenBranch& translating_branch() {
  static const EigenBranch br =
      track_branch(translating_well(), standard_grid(), uniform_mesh(0.0, 1.0, 200), 0, GaugeMode::parallel_transport);
  return br;
}

const EigenBranch& static_branch() {
  static const EigenBranch br = track_branch(PotentialSpec::poeschl_teller(), standard_grid(),
                                             uniform_mesh(0.0, 1.0, 40), 0, GaugeMode::parallel_transport);
  return br;
}

ApproximantOptions opts(int order, double lambda, double alpha = 1.0, double eps = 1.0) {
  ApproximantOptions o;
  o.order = order;
  o.lambda = lambda;
  o.alpha = alpha;
  o.epsilon = eps;
  return o;
}

/// Adaptive Simpson quadrature, used as an independent oracle.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 0) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double l = (m - a) / 6.0 * (fa + 4.0 * f(0.5 * (a + m)) + fm);
  const double r = (b - m) / 6.0 * (fm + 4.0 * f(0.5 * (m + b)) + fb);
  if (depth > 12 || std::abs(l + r - whole) < 15.0 * tol) return l + r + (l + r - whole) / 15.0;
  return adaptive_simpson(f, a, m, 0.5 * tol, depth + 1) + adaptive_simpson(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

TEST_CASE("cumulative integral is exact for cubics") {
  std::vector<double> t = uniform_mesh(0.0, 1.0, 7), f;
  for (double s : t) f.push_back(s * s * s - 2.0 * s + 1.0);
  const auto F = cumulative_integral(f, t[1] - t[0]);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = t[i];
    CHECK(F[i] == doctest::Approx(0.25 * s * s * s * s - s * s + s).epsilon(1e-13));
  }
}

TEST_CASE("dynamic phase") {
  const auto& br = static_branch();
  CHECK(dynamic_phase(br, 1.0) == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(dynamic_phase(br, 0.0) == 0.0);
  CHECK_THROWS_AS(dynamic_phase(br, 1.2), DomainError);

  const Grid1D g = standard_grid();
  const auto spec = PotentialSpec::breathing(WellShape::sech2, 2.0, Path::smoothstep(1.0, 0.5), 0.0, 1.0);
  const auto brb = track_branch(spec, g, uniform_mesh(0.0, 1.0, 100), 0, GaugeMode::real_aligned);
  const double oracle =
      adaptive_simpson([&](double t) { return lowest_eigenpairs(spec, t, g, 1)[0].E; }, 0.0, 1.0, 1e-11);
  CHECK(std::abs(dynamic_phase(brb, 1.0) - oracle) < 1e-8);
}

TEST_CASE("Berry phase vanishes in parallel transport and follows a gauge twist") {
  const auto& br = translating_branch();
  CHECK(std::abs(berry_phase(br, 0.0)) == 0.0);
  for (double t : {0.25, 0.5, 1.0}) CHECK(std::abs(berry_phase(br, t)) < 1e-8);

  const auto tw = twist_gauge(br, [](double t) { return 0.3 * t; }, [](double) { return 0.3; });
  for (double t : {0.3, 0.7, 1.0}) CHECK(std::abs(berry_phase(tw, t) - cplx(0.0, 0.3 * t)) < 1e-6);
  const PhaseSet ph = compute_phases(tw, 1.0, 1);
  for (const cplx& b : ph.beta) CHECK(std::abs(b.real()) < 1e-8);
}

TEST_CASE("nonlinear phase") {
  const auto& br = translating_branch();
  const double th = nonlinear_phase(br, 1.0, 1, 1.0);
  CHECK(std::abs(th - 1.0 / 3.0) < 1e-6);
  CHECK(nonlinear_phase(br, 0.0, 1, 1.0) == 0.0);
  CHECK(nonlinear_phase(br, -2.0, 1, 0.6) == -2.0 * nonlinear_phase(br, 1.0, 1, 0.6));
}

TEST_CASE("dynamic phase is additive over concatenated intervals") {
  const Grid1D g = standard_grid();
  const auto spec = translating_well();
  const auto whole = track_branch(spec, g, uniform_mesh(0.0, 1.0, 40), 0, GaugeMode::parallel_transport);
  const auto left = track_branch(spec, g, uniform_mesh(0.0, 0.5, 20), 0, GaugeMode::parallel_transport);
  const auto right = track_branch(spec, g, uniform_mesh(0.5, 1.0, 20), 0, GaugeMode::parallel_transport);
  CHECK(std::abs(dynamic_phase(whole, 1.0) - dynamic_phase(left, 0.5) - dynamic_phase(right, 1.0)) < 1e-10);
}

TEST_CASE("leading amplitude") {
  const auto& br = translating_branch();
  const PhaseSet lin = compute_phases(br, 0.0, 1);
  for (double t : {0.0, 0.5, 1.0}) {
    const int i = *br.index_of(t);
    CHECK(norm_l2(leading_amplitude(br, lin, t) - br.chi(i)) < 1e-12);
  }
  const PhaseSet nl = compute_phases(br, 1.0, 1);
  CHECK(norm_l2(leading_amplitude(br, nl, 1.0) - br.chi(br.size() - 1) * std::polar(1.0, -1.0 / 3.0)) < 1e-6);

  const PhaseSet scaled = compute_phases(br, 1.0, 1, 0.1);
  for (int i = 0; i < br.size(); i += 50) CHECK(scaled.theta(i) == doctest::Approx(0.1 * nl.theta(i)));
}

TEST_CASE("corrector v1 by forward application") {
  const auto& sb = static_branch();
  const PhaseSet lin = compute_phases(sb, 0.0, 1);
  CHECK(norm_l2(corrector_v1(sb, lin, 0.0, 1, 0.5)) < 1e-12);

  const PhaseSet nl = compute_phases(sb, 1.0, 1);
  const int i = *sb.index_of(0.5);
  const Hamiltonian H = Hamiltonian::at(sb.spec, 0.5, sb.grid);
  const Field v = corrector_v1(sb, nl, 1.0, 1, 0.5);
  const Field U0 = leading_amplitude(sb, nl, 0.5);
  Field rhs = U0;
  for (int j = 0; j < rhs.size(); ++j) rhs[j] *= -std::norm(U0[j]);
  const Field& chi = sb.chi(i);
  rhs -= inner_product(chi, rhs) * chi;
  // d_t U0 = -i theta' U0 is parallel to chi, so only the nonlinear term survives.
  CHECK(norm_l2(H.apply(v) - sb.energy(i) * v - rhs) < 1e-8);

  const auto& tb = translating_branch();
  const PhaseSet tl = compute_phases(tb, 0.0, 1);
  const int k = *tb.index_of(0.5);
  const Field vt = corrector_v1(tb, tl, 0.0, 1, 0.5);
  CHECK(norm_l2(vt) > 0.1);
  Field src = cplx(0.0, 1.0) * dchi_dt(tb, k);
  src -= inner_product(tb.chi(k), src) * tb.chi(k);
  const Hamiltonian Ht = Hamiltonian::at(tb.spec, 0.5, tb.grid);
  CHECK(norm_l2(Ht.apply(vt) - tb.energy(k) * vt - src) < 1e-8);
}

TEST_CASE("coefficient u1") {
  const auto& sb = static_branch();
  for (const cplx& u : coefficient_u1(sb, compute_phases(sb, 0.0, 1), 0.0, 1)) CHECK(std::abs(u) < 1e-12);

  // Closed form for lambda = 0 in parallel transport: u1 = -int <chi, d_t v1>,
  // and <chi, v1> = 0 turns the integrand into <d_t chi, v1>.
  const auto& br = translating_branch();
  const PhaseSet ph = compute_phases(br, 0.0, 1);
  const auto u1 = coefficient_u1(br, ph, 0.0, 1);
  std::vector<cplx> f;
  for (int i = 0; i < br.size(); ++i)
    f.push_back(inner_product(dchi_dt(br, i), corrector_v1(br, ph, 0.0, 1, br.times[static_cast<std::size_t>(i)])));
  const double dt = br.step();
  cplx simpson = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) simpson += (i % 2 ? 4.0 : 2.0) * f[i];
  simpson *= dt / 3.0;
  CHECK(std::abs(u1.back() - simpson) < 1e-6);
  CHECK(std::abs(u1.back()) > 1e-3);
}

TEST_CASE("u1 changes by O(dt^2) or better under mesh halving") {
  const Grid1D g = standard_grid();
  std::vector<cplx> ends;
  for (int steps : {25, 50, 100}) {
    const auto br = track_branch(translating_well(), g, uniform_mesh(0.0, 1.0, steps), 0, GaugeMode::parallel_transport);
    ends.push_back(coefficient_u1(br, compute_phases(br, 1.0, 1), 1.0, 1).back());
  }
  const double ratio = std::abs(ends[0] - ends[1]) / std::abs(ends[1] - ends[2]);
  MESSAGE("u1 self-convergence ratio " << ratio);
  CHECK(ratio > 3.5);
}

TEST_CASE("well-prepared initial data") {
  const auto& br = translating_branch();
  const auto a0 = build_approximant(br, opts(0, 1.0));
  CHECK(norm_l2(well_prepared_initial_data(a0, 0.1) - br.chi(0)) == 0.0);
  const auto as = build_approximant(static_branch(), opts(1, 0.0));
  CHECK(norm_l2(well_prepared_initial_data(as, 0.1) - static_branch().chi(0)) < 1e-12);
  const auto a1 = build_approximant(br, opts(1, 1.0));
  const double eps = 0.05;
  CHECK(norm_l2(well_prepared_initial_data(a1, eps) - br.chi(0)) ==
        doctest::Approx(eps * norm_l2(a1.v1.front())).epsilon(1e-12));
  CHECK(std::abs(inner_product(br.chi(0), a1.v1.front())) < 1e-10);
}

TEST_CASE("assemble closed forms") {
  const auto& br = translating_branch();
  const auto a = build_approximant(br, opts(0, 0.0));
  CHECK(norm_l2(assemble(a, 0.1, 0.0) - br.chi(0)) < 1e-14);

  const auto& sb = static_branch();
  const double E = sb.energy(0), eps = 0.05;
  const auto lin = build_approximant(sb, opts(1, 0.0));
  const auto nl = build_approximant(sb, opts(0, 1.0));
  const double q = std::pow(norm_lp(sb.chi(0), 4.0), 4.0);
  for (double t : {0.25, 0.5, 0.8125, 1.0}) {
    CHECK(norm_l2(assemble(lin, eps, t) - sb.chi(0) * std::polar(1.0, -E * t / eps)) < 1e-10);
    CHECK(norm_l2(assemble(nl, eps, t) - sb.chi(0) * std::polar(1.0, -E * t / eps - q * t)) < 1e-8);
  }
}

TEST_CASE("assembled approximant is gauge invariant") {
  const auto& br = translating_branch();
  const auto tw = twist_gauge(br, [](double t) { return 0.3 * t; }, [](double) { return 0.3; });
  const auto a = build_approximant(br, opts(2, 1.0));
  const auto b = build_approximant(tw, opts(2, 1.0));
  double worst = 0.0;
  for (double t : br.times) worst = std::max(worst, norm_l2(assemble(a, 0.05, t) - assemble(b, 0.05, t)));
  CHECK(worst < 1e-6);
}

TEST_CASE("intermediate exponent reduces to the closed-form phase") {
  const auto& sb = static_branch();
  const double eps = 0.1, E = sb.energy(0);
  const double q = std::pow(norm_lp(sb.chi(0), 4.0), 4.0);
  for (double alpha : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    const auto a = build_approximant(sb, opts(0, 1.0, alpha, eps));
    const double t = 0.75;
    const double phase = -E * t / eps - std::pow(eps, alpha - 1.0) * q * t;
    CHECK(norm_l2(assemble(a, eps, t) - sb.chi(0) * std::polar(1.0, phase)) < 1e-10);
  }
  const auto a = build_approximant(sb, opts(0, 1.0, 1.5, 0.1));
  CHECK_THROWS_AS(assemble(a, 0.05, 0.5), DomainError);
}

TEST_CASE("PDE residual examples") {
  const auto& sb = static_branch();
  const auto lin = build_approximant(sb, opts(0, 0.0));
  CHECK(pde_residual(lin, 0.05, 0.5, 0).norm < 1e-9);

  const auto& br = translating_branch();
  const auto a = build_approximant(br, opts(1, 0.0));
  const double eps = 0.05;
  for (int i : {50, 100, 150}) {
    const double t = br.times[static_cast<std::size_t>(i)];
    const Residual r0 = pde_residual(a, eps, t, 0);
    CHECK(r0.norm == doctest::Approx(eps * norm_l2(dchi_dt(br, i))).epsilon(0.05));
    CHECK_FALSE(pde_residual(a, eps, t, 1).differencing_dominated);
  }
}

TEST_CASE("first-order residual is well below the leading one at eps = 0.05") {
  // Constant-speed translation a(t) = t; the smoothstep ramp's acceleration
  // would put the gap close to 3 at this eps.
  const Grid1D g = standard_grid();
  const auto spec = PotentialSpec::translating(1.0, Path::linear(0.0, 1.0), 0.0, 1.0);
  const auto br = track_branch(spec, g, uniform_mesh(0.0, 1.0, 200), 0, GaugeMode::parallel_transport);
  const auto a = build_approximant(br, opts(1, 1.0));
  double r0 = 0.0, r1 = 0.0;
  for (double t : br.times) {
    r0 = std::max(r0, pde_residual(a, 0.05, t, 0).norm);
    r1 = std::max(r1, pde_residual(a, 0.05, t, 1).norm);
  }
  CHECK(r0 >= 5.0 * r1);
}

TEST_CASE("residual order under epsilon halving") {
  const auto& br = translating_branch();
  const auto lin = build_approximant(br, opts(1, 0.0));
  const auto nl = build_approximant(br, opts(1, 1.0));
  auto sup = [&](const Approximant& a, double eps, int order) {
    double m = 0.0;
    for (double t : br.times) m = std::max(m, pde_residual(a, eps, t, order).norm);
    return m;
  };
  const double o0 = std::log2(sup(lin, 0.05, 0) / sup(lin, 0.025, 0));
  const double o1 = std::log2(sup(nl, 0.05, 1) / sup(nl, 0.025, 1));
  MESSAGE("residual orders " << o0 << " " << o1);
  CHECK(o0 > 0.7);
  CHECK(o0 < 1.3);
  CHECK(o1 > 1.7);
  CHECK(o1 < 2.3);
}
