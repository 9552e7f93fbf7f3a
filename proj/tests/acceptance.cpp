// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "adiab/boundstate.hpp"
#include "adiab/experiments.hpp"
#include "adiab/propagator.hpp"

using namespace adiab;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = ADIAB_CONFIG_DIR;
const fs::path kOut = "acceptance_out";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

SweepReport run(const std::string& name) {
  ExperimentConfig c = load_config(kConfigs / (name + ".json"));
  c.output_dir = kOut / c.name;
  return run_experiment(c);
}

void describe(Outcome& o, const SweepReport& r) {
  o.detail << ' ' << r.name << ':';
  for (const auto& c : r.checks)
    o.detail << ' ' << c.metric << " slope " << c.fit.slope << " in [" << c.window.lo << ", " << c.window.hi << "]"
             << (c.pass ? "" : " NO");
  if (r.floor_pass) {
    double lo = 1e300;
    for (const auto& row : r.rows) lo = std::min(lo, row.metrics.at("err_t1"));
    o.detail << " min err(t1) " << lo << (*r.floor_pass ? "" : " NO");
  }
  if (r.predictor_bounded) {
    o.detail << " predictor ratios";
    for (double x : r.predictor_ratios) o.detail << ' ' << x;
  }
  o.detail << ';';
  o.require(r.pass, r.name);
}

Field unit(Field f) {
  f *= 1.0 / norm_l2(f);
  return f;
}

PotentialSpec translating_well() {
  return PotentialSpec::translating(1.0, Path::smoothstep(0.0, 1.0), 0.0, 1.0);
}

Outcome criterion1() {
  Outcome o;
  const Grid1D g(20.0, 512);
  const auto one = lowest_eigenpairs(PotentialSpec::poeschl_teller(1.0), 0.0, g, 1);
  const Field exact = Field::from_function(g, [](double x) { return 1.0 / (std::sqrt(2.0) * std::cosh(x)); });
  const cplx ov = inner_product(one.at(0).chi, exact);
  const double dE = std::abs(one[0].E + 0.5);
  const double dchi = norm_l2(one[0].chi * (ov / std::abs(ov)) - exact);
  const auto two = lowest_eigenpairs(PotentialSpec::poeschl_teller(3.0), 0.0, g, 2);
  const double d3 = std::max(std::abs(two.at(0).E + 2.0), std::abs(two.at(1).E + 0.5));
  o.detail << " |E + 0.5| = " << dE << ", chi error " << dchi << ", depth-3 error " << d3;
  o.require(dE < 1e-6 && dchi < 1e-6 && d3 < 1e-6, "oracle tolerance");
  return o;
}

Outcome criterion2() {
  Outcome o;
  describe(o, run("linear_adiabatic"));
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (const char* n : {"weakly_nonlinear_pos", "weakly_nonlinear_neg", "phase_falsification_pos",
                        "phase_falsification_neg"})
    describe(o, run(n));
  return o;
}

Outcome criterion4() {
  Outcome o;
  describe(o, run("projector"));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (const char* n : {"residual_n1", "residual_n0"}) {
    const SweepReport r = run(n);
    describe(o, r);
    for (const auto& row : r.rows) o.require(row.residual_guard_ok, "differencing guard");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const char* n : {"boundstate_sigma1", "boundstate_sigma2"}) describe(o, run(n));
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const char* n : {"bound_dynamics_sigma1", "bound_dynamics_sigma2"}) describe(o, run(n));
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (const char* n : {"subcritical", "intermediate"}) describe(o, run(n));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const Grid1D g(20.0, 512);
  const auto spec = translating_well();

  // Mass over 1e4 steps.
  SolverParams p;
  p.epsilon = 0.01;
  p.lambda = 1.0;
  const auto chi0 = lowest_eigenpairs(spec, 0.0, g, 1).at(0).chi;
  const auto tr = propagate(chi0, spec, p, 0.0, 1.0, 100);
  double drift = 0.0;
  for (double m : tr.mass) drift = std::max(drift, std::abs(m - tr.mass.front()));
  o.detail << " mass drift " << drift << " (" << tr.steps << " steps);";
  o.require(drift <= 1e-11 && tr.steps >= 10000, "mass conservation");

  // Gauge invariance, Re beta, resolvent orthogonality.
  const auto br = track_branch(spec, g, uniform_mesh(0.0, 1.0, 200), 0, GaugeMode::parallel_transport);
  const auto tw = twist_gauge(br, [](double t) { return 0.3 * t; }, [](double) { return 0.3; });
  ApproximantOptions ao;
  ao.order = 1;
  ao.lambda = 1.0;
  const auto a = build_approximant(br, ao);
  const auto b = build_approximant(tw, ao);
  double gauge = 0.0, re_beta = 0.0, orth = 0.0;
  for (int i = 0; i < br.size(); ++i) {
    const double t = br.times[static_cast<std::size_t>(i)];
    gauge = std::max(gauge, norm_l2(assemble(a, 0.05, t) - assemble(b, 0.05, t)));
    re_beta = std::max({re_beta, std::abs(a.phases.beta[static_cast<std::size_t>(i)].real()),
                        std::abs(b.phases.beta[static_cast<std::size_t>(i)].real())});
    orth = std::max(orth, std::abs(inner_product(br.chi(i), a.v1[static_cast<std::size_t>(i)])));
  }
  o.detail << " gauge " << gauge << ", Re beta " << re_beta << ", resolvent orthogonality " << orth << ';';
  o.require(gauge <= 1e-6, "gauge invariance");
  o.require(re_beta <= 1e-8, "Re beta");
  o.require(orth <= 1e-10, "resolvent orthogonality");

  // Projector distance against the assembled rank-2 operator at N = 64.
  const Grid1D gs(8.0, 64);
  std::mt19937 rng(21);
  std::normal_distribution<double> nd;
  double proj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Field psi(gs), phi(gs);
    for (int j = 0; j < gs.size(); ++j) {
      psi[j] = {nd(rng), nd(rng)};
      phi[j] = {nd(rng), nd(rng)};
    }
    psi = (0.5 + trial / 50.0) * unit(psi);
    phi = unit(phi);
    Eigen::VectorXcd x(gs.size()), y(gs.size());
    for (int j = 0; j < gs.size(); ++j) {
      x(j) = psi[j];
      y(j) = phi[j];
    }
    const Eigen::MatrixXcd D = gs.spacing() * (x * x.adjoint() - y * y.adjoint());
    const Eigen::MatrixXcd D2 = D * D;
    Eigen::VectorXcd v = x + cplx(0.3, 0.1) * y;
    double rq = 0.0;
    for (int it = 0; it < 5000; ++it) {
      const Eigen::VectorXcd w = D2 * v;
      rq = v.dot(w).real() / v.squaredNorm();
      v = w / w.norm();
    }
    proj = std::max(proj, std::abs(projector_distance(psi, phi) - std::sqrt(rq)));
  }
  o.detail << " projector vs dense " << proj << ';';
  o.require(proj <= 1e-10, "projector oracle");

  // Richardson ratio under dt halving.
  SolverParams q;
  q.epsilon = 0.05;
  q.lambda = 1.0;
  std::vector<Field> ends;
  for (double c : {0.04, 0.02, 0.01}) {
    q.c_dt = c;
    ends.push_back(propagate(chi0, spec, q, 0.0, 1.0, 1).fields.back());
  }
  const double ratio = norm_l2(ends[0] - ends[1]) / norm_l2(ends[1] - ends[2]);
  o.detail << " Richardson ratio " << ratio;
  o.require(ratio >= 3.5 && ratio <= 4.5, "Richardson ratio");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> all = {
      {1, "eigen oracle", 5, criterion1},
      {2, "linear adiabatic slope", 120, criterion2},
      {3, "weakly nonlinear slope and phase floor", 180, criterion3},
      {4, "projector slope", 180, criterion4},
      {5, "residual orders", 120, criterion5},
      {6, "bound-state bifurcation", 120, criterion6},
      {7, "bound-state adiabatics", 300, criterion7},
      {8, "criticality ladder", 180, criterion8},
      {9, "property suites", 120, criterion9},
  };
  int failures = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [runtime over " << c.budget_s << " s]";
    }
    std::printf("criterion %d (%s): %s  %.1f s |%s\n", c.id, c.title, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
