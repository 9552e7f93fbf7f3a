#include "adiab/boundstate.hpp"
#include "adiab/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace adiab;
using namespace testutil;

namespace {

EigenPair pt_pair(const Grid1D& g) { return lowest_eigenpairs(PotentialSpec::poeschl_teller(), 0.0, g, 1)[0]; }

/// f(x - a) through a Fourier multiplier.
Field spectral_shift(const Field& f, double a) {
  CVec c = transform(f);
  const auto k = f.grid().wavenumbers();
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= std::polar(1.0, -k[m] * a);
  if (f.grid().size() % 2 == 0) c[static_cast<std::size_t>(f.grid().nyquist_index())] = 0.0;
  return inverse_transform(f.grid(), c);
}

Field aligned(const Field& f, const Field& ref) {
  const cplx ov = inner_product(f, ref);
  return f * (ov / std::abs(ov));
}

}  // namespace

TEST_CASE("bifurcation predictor") {
  const Grid1D g = standard_grid();
  const EigenPair p = pt_pair(g);
  CHECK(norm_l2(bifurcation_predictor(p, 1.0, 1, p.E)) == 0.0);
  CHECK(nonlinear_mu(p.chi, 1.0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));

  const double eps = 0.01;
  CHECK(std::abs(norm_l2(bifurcation_predictor(p, 1.0, 1, p.E + eps / 3.0)) - std::sqrt(eps)) < 1e-8);

  const Field a = bifurcation_predictor(p, 1.0, 2, p.E + 0.01);
  const Field b = bifurcation_predictor(p, 2.0, 2, p.E + 0.02);
  CHECK(norm_l2(a - b) < 1e-14);

  CHECK_THROWS_AS(bifurcation_predictor(p, 1.0, 1, p.E - 0.01), DomainError);
  CHECK_THROWS_AS(bifurcation_predictor(p, -1.0, 1, p.E + 0.01), DomainError);
}

TEST_CASE("linear limit of the stationary solve") {
  const Grid1D g = standard_grid();
  const EigenPair p = pt_pair(g);
  const BoundState bs = solve_stationary(Hamiltonian::at(PotentialSpec::poeschl_teller(), 0.0, g), p, 0.0, 1, 0.3);
  CHECK(std::abs(bs.E_star - p.E) < 1e-9);
  CHECK(norm_l2(bs.Phi - 0.3 * aligned(p.chi, bs.Phi)) < 1e-9);
}

TEST_CASE("small-mass bound state obeys the inverted bifurcation law") {
  const Grid1D g = standard_grid();
  const double eps = 0.01;
  const BoundState bs = solve_stationary(PotentialSpec::poeschl_teller(), g, 0.0, 1.0, 1, std::sqrt(eps));
  CHECK(bs.E_star - bs.E_linear == doctest::Approx(eps / 3.0).epsilon(0.3));
  CHECK(bs.residual < 1e-9);
  CHECK(std::abs(norm_l2(bs.Phi) - std::sqrt(eps)) < 1e-10);
  CHECK(inner_product(bs.Phi, pt_pair(g).chi).real() > 0.0);

  const BoundState foc = solve_stationary(PotentialSpec::poeschl_teller(), g, 0.0, -1.0, 2, 0.4);
  CHECK(foc.E_star < foc.E_linear);
}

TEST_CASE("predictor error is first order in E* - E") {
  const Grid1D g = standard_grid();
  const auto spec = PotentialSpec::poeschl_teller();
  const Hamiltonian H = Hamiltonian::at(spec, 0.0, g);
  const EigenPair p = pt_pair(g);
  for (int sigma : {1, 2}) {
    std::vector<double> ratio;
    for (int k = 0; k < 4; ++k) {
      const double mass = 0.5 * std::pow(2.0, -k / (2.0 * sigma));
      const BoundState bs = solve_stationary(H, p, 1.0, sigma, mass);
      const double d = bs.E_star - p.E;
      ratio.push_back(norm_l2(bs.Phi - aligned(bifurcation_predictor(p, 1.0, sigma, bs.E_star), bs.Phi)) / d);
    }
    for (double r : ratio) CHECK(r <= 2.0 * ratio.front());
  }
}

TEST_CASE("fixed-mass sqrt(eps) families scale like eps^sigma") {
  const Grid1D g = standard_grid();
  const auto spec = PotentialSpec::poeschl_teller();
  for (int sigma : {1, 2}) {
    const double d1 = solve_stationary(spec, g, 0.0, 1.0, sigma, std::sqrt(0.025)).E_star + 0.5;
    const double d2 = solve_stationary(spec, g, 0.0, 1.0, sigma, std::sqrt(0.0125)).E_star + 0.5;
    CHECK(std::abs(std::log2(d1 / d2) - sigma) < 0.3);
  }
}

TEST_CASE("family continuation") {
  const Grid1D g = standard_grid();
  const auto times = uniform_mesh(0.0, 1.0, 10);
  const auto fam_static = track_family(PotentialSpec::poeschl_teller(), g, times, 1.0, 1, 0.3);
  for (const auto& b : fam_static) {
    CHECK(norm_l2(b.Phi - fam_static.front().Phi) < 1e-9);
    CHECK(b.residual < 1e-9);
    CHECK(std::abs(norm_l2(b.Phi) - 0.3) < 1e-10);
  }

  const auto spec = translating_well();
  const auto fam = track_family(spec, g, times, 1.0, 1, 0.3);
  for (const auto& b : fam) {
    const double a = spec.center.value(b.t, spec.t0, spec.t1);
    CHECK(norm_l2(b.Phi - spectral_shift(fam.front().Phi, a)) < 1e-6);
  }

  const auto br = track_branch(spec, g, times, 0, GaugeMode::real_aligned);
  const auto lin = track_family(br, 0.0, 1, 0.3);
  for (int i = 0; i < br.size(); ++i) {
    const Field& phi = lin[static_cast<std::size_t>(i)].Phi;
    CHECK(norm_l2(phi - 0.3 * aligned(br.chi(i), phi)) < 1e-9);
  }
}

TEST_CASE("mass above the configured maximum is rejected") {
  const Grid1D g = standard_grid();
  CHECK_THROWS_AS(solve_stationary(PotentialSpec::poeschl_teller(), g, 0.0, 1.0, 1, 0.7), DomainError);
}
