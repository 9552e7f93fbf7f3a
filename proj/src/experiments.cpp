#include "adiab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "adiab/boundstate.hpp"
#include "adiab/error.hpp"
#include "json.hpp"

namespace adiab {

namespace {

using Metrics = std::map<std::string, double>;

constexpr double kMassTol = 1e-11;
constexpr double kReflectedMassTol = 1e-8;
constexpr double kDtTol = 0.05;

bool is_dynamic(ExperimentKind k) {
  return k != ExperimentKind::residual_order && k != ExperimentKind::boundstate_tracking;
}

bool needs_bound_dynamics(const ExperimentConfig& c) {
  return c.kind == ExperimentKind::boundstate_tracking &&
         (c.windows.count("wave_bound") || c.windows.count("proj_bound") || c.windows.count("wave_star"));
}

struct Context {
  const ExperimentConfig& cfg;
  Grid1D grid;
  EigenBranch branch;
  std::optional<Approximant> shared;      // epsilon-independent tables
  std::optional<Approximant> theta_free;  // falsification reference
};

ApproximantOptions approximant_options(const ExperimentConfig& c, double eps) {
  ApproximantOptions o;
  o.order = std::max(c.order, c.data_order);
  o.lambda = c.lambda;
  o.sigma = c.sigma;
  o.epsilon = eps;
  switch (c.kind) {
    case ExperimentKind::subcritical:
      o.lambda = 0.0;  // theta-free linear approximant
      break;
    case ExperimentKind::intermediate:
      o.alpha = c.alpha;
      break;
    case ExperimentKind::boundstate_tracking:
      // ||Psi|| = sqrt(eps) means psi = Psi / sqrt(eps) carries lambda eps^sigma.
      o.alpha = c.sigma;
      break;
    default:
      break;
  }
  if (o.alpha == 1.0) o.epsilon = 1.0;
  return o;
}

bool approximant_depends_on_eps(const ExperimentConfig& c) {
  return approximant_options(c, 0.5).alpha != 1.0;
}

Field initial_data(const Approximant& a, double eps, int data_order) {
  Field psi = a.branch.chi(0);
  if (data_order >= 1) psi += eps * a.v1.front();
  if (data_order >= 2) psi += (eps * eps) * a.v2.front();
  return psi;
}

SolverParams solver_params(const ExperimentConfig& c, double eps, double c_dt) {
  SolverParams p;
  p.epsilon = eps;
  p.lambda = c.lambda;
  p.sigma = c.sigma;
  p.alpha = c.kind == ExperimentKind::boundstate_tracking ? static_cast<double>(c.sigma) : c.alpha;
  p.c_dt = c_dt;
  return p;
}

void residual_metrics(const Approximant& a, double eps, int order, Metrics& m, bool& guard_ok) {
  double r0 = 0.0, r1 = 0.0, r = 0.0;
  guard_ok = true;
  for (double t : a.branch.times) {
    r0 = std::max(r0, pde_residual(a, eps, t, 0).norm);
    if (a.order() >= 1) r1 = std::max(r1, pde_residual(a, eps, t, 1).norm);
    if (order >= 1) {
      const Residual res = pde_residual(a, eps, t, order);
      r = std::max(r, res.norm);
      guard_ok = guard_ok && !res.differencing_dominated;
    }
  }
  m["residual_n0"] = r0;
  if (a.order() >= 1) m["residual_n1"] = r1;
  m["residual"] = order >= 1 ? r : r0;
}

struct BoundData {
  std::vector<BoundState> family;
  std::vector<double> phi_star;  // int E* on the mesh
};

Metrics dynamics_metrics(const Context& ctx, const Approximant& a, const BoundData* bound, double eps,
                         const Trajectory& tr) {
  const ExperimentConfig& c = ctx.cfg;
  Metrics m;
  if (c.kind == ExperimentKind::boundstate_tracking) {
    const double s = std::sqrt(eps);
    double wave = 0.0, proj = 0.0, star = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const int k = *a.branch.index_of(tr.times[i]);
      const auto sk = static_cast<std::size_t>(k);
      const Field Psi = s * tr.fields[i];
      // Phi is real; rotate it onto the gauge of chi.
      const cplx ov = inner_product(bound->family[sk].Phi, a.branch.chi(k));
      const Field Phi = bound->family[sk].Phi * (ov / std::abs(ov));
      const cplx slow = std::exp(-a.phases.beta[sk] - cplx(0.0, a.phases.theta(k)));
      const Field ref = Phi * (slow * std::polar(1.0, -a.phases.phi[sk] / eps));
      // The phi* phase already carries the nonlinear phase, so theta is left out.
      const Field ref_star = Phi * (std::exp(-a.phases.beta[sk]) * std::polar(1.0, -bound->phi_star[sk] / eps));
      wave = std::max(wave, norm_l2(Psi - ref));
      star = std::max(star, norm_l2(Psi - ref_star));
      proj = std::max(proj, projector_distance(Psi, Phi));
    }
    m["wave_bound"] = wave;
    m["proj_bound"] = proj;
    m["wave_star"] = star;
    return m;
  }
  const Approximant& ref = c.kind == ExperimentKind::phase_falsification ? *ctx.theta_free : a;
  const int order = c.order;
  double l2 = 0.0, h1 = 0.0, proj = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const Field approx = assemble(ref, eps, tr.times[i], order);
    const Field d = tr.fields[i] - approx;
    l2 = std::max(l2, norm_l2(d));
    h1 = std::max(h1, sobolev_norm(d, 1));
    proj = std::max(proj, projector_distance(tr.fields[i], approx));
  }
  m["sup_err_l2"] = l2;
  m["sup_err_h1"] = h1;
  m["proj_dist"] = proj;
  m["err_t1"] = norm_l2(tr.fields.back() - assemble(ref, eps, tr.times.back(), order));
  return m;
}

SweepRow compute_row(const Context& ctx, double eps) {
  const ExperimentConfig& c = ctx.cfg;
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.epsilon = eps;
  row.c_dt = c.c_dt;

  std::optional<Approximant> local;
  if (c.kind != ExperimentKind::boundstate_tracking || needs_bound_dynamics(c)) {
    if (!ctx.shared) local = build_approximant(ctx.branch, approximant_options(c, eps));
  }
  const Approximant* a = ctx.shared ? &*ctx.shared : (local ? &*local : nullptr);

  BoundData bound;
  if (c.kind == ExperimentKind::boundstate_tracking) {
    BoundStateOptions bo;
    bo.which = c.which;
    bo.mass_max = c.mass_max;
    bound.family = track_family(ctx.branch, c.lambda, c.sigma, std::sqrt(eps), bo);
    double gap = 0.0;
    std::vector<double> es;
    for (const auto& b : bound.family) {
      gap = std::max(gap, b.E_star - b.E_linear);
      es.push_back(b.E_star);
    }
    row.metrics["epsest"] = gap;
    bound.phi_star = cumulative_integral(es, ctx.branch.step());
  }

  if (a) {
    const int order = c.kind == ExperimentKind::residual_order ? c.order : std::min(1, a->order());
    residual_metrics(*a, eps, order, row.metrics, row.residual_guard_ok);
    if (c.kind != ExperimentKind::residual_order) row.metrics.erase("residual");
  }

  if (is_dynamic(c.kind) || needs_bound_dynamics(c)) {
    const std::string primary =
        c.kind == ExperimentKind::boundstate_tracking ? std::string("wave_bound") : c.primary_metric();
    auto run = [&](double c_dt, Trajectory& tr) {
      tr = propagate(initial_data(*a, eps, c.data_order), c.potential, solver_params(c, eps, c_dt), ctx.branch.times);
      return dynamics_metrics(ctx, *a, &bound, eps, tr);
    };
    Trajectory tr;
    double c_dt = c.c_dt;
    Metrics m = run(c_dt, tr);
    if (c.refine_dt) {
      row.dt_converged = false;
      for (int r = 0; r < c.max_refinements; ++r) {
        Trajectory tr2;
        Metrics m2 = run(0.5 * c_dt, tr2);
        c_dt *= 0.5;
        const double change = std::abs(m.at(primary) - m2.at(primary));
        m = std::move(m2);
        tr = std::move(tr2);
        if (change < kDtTol * m.at(primary)) {
          row.dt_converged = true;
          break;
        }
      }
    }
    row.c_dt = c_dt;
    for (auto& [k, v] : m) row.metrics[k] = v;
    row.times = tr.times;
    row.mass = tr.mass;
    row.tail = tr.tail_mass;
    for (std::size_t i = 0; i < tr.mass.size(); ++i) {
      row.mass_drift = std::max(row.mass_drift, std::abs(tr.mass[i] - tr.mass.front()));
      row.max_tail = std::max(row.max_tail, tr.tail_mass[i]);
    }
  }
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

void predictor_study(const Context& ctx, SweepReport& rep) {
  const ExperimentConfig& c = ctx.cfg;
  const EigenPair& pair = ctx.branch.pairs.front();
  const Hamiltonian H = Hamiltonian::at(c.potential, pair.t, ctx.grid);
  BoundStateOptions bo;
  bo.which = c.which;
  bo.mass_max = c.mass_max;
  for (int k = 0; k < 4; ++k) {
    // E* - E is roughly mu M^{2 sigma}, so this halves the gap per refinement.
    const double mass = c.mass_max * std::pow(2.0, -k / (2.0 * c.sigma));
    const BoundState bs = solve_stationary(H, pair, c.lambda, c.sigma, mass, bo);
    const double gap = bs.E_star - pair.E;
    const Field pred = bifurcation_predictor(pair, c.lambda, c.sigma, bs.E_star);
    rep.predictor_gaps.push_back(gap);
    rep.predictor_ratios.push_back(norm_l2(bs.Phi - pred) / std::abs(gap));
  }
  double worst = 0.0;
  for (double r : rep.predictor_ratios) worst = std::max(worst, r);
  rep.predictor_bounded = worst <= 2.0 * rep.predictor_ratios.front();
}

std::string format_eps(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

}  // namespace

bool SweepRow::invariants_ok() const { return mass_drift <= kMassTol && residual_guard_ok && dt_converged; }

std::optional<double> SweepRow::metric(const std::string& name) const {
  const auto it = metrics.find(name);
  if (it == metrics.end()) return std::nullopt;
  return it->second;
}

SweepReport run_experiment(const ExperimentConfig& config, bool write_files) {
  config.validate();
  const ExperimentConfig& c = config;
  const std::string where = "experiment '" + c.name + "' (" + to_string(c.kind) + ")";
  Grid1D grid(c.L, c.N);
  const auto times = uniform_mesh(c.potential.t0, c.potential.t1, c.branch_steps);

  auto with_context = [&](const std::string& what, const std::string& msg) {
    return Error(where + ", " + what + ": " + msg);
  };
  EigenBranch branch = [&] {
    try {
      return track_branch(c.potential, grid, times, c.which, c.gauge);
    } catch (const Error& e) {
      throw with_context("eigenbranch", e.what());
    }
  }();
  for (int i = 0; i < branch.size(); ++i)
    if (tail_mass(branch.chi(i)) >= 1e-10)
      throw with_context("eigenbranch", "eigenfunction tail mass at the domain edge exceeds 1e-10 at t = " +
                                            std::to_string(branch.times[static_cast<std::size_t>(i)]));

  Context ctx{c, grid, std::move(branch), std::nullopt, std::nullopt};
  try {
    const bool need_tables = c.kind != ExperimentKind::boundstate_tracking || needs_bound_dynamics(c);
    if (need_tables && !approximant_depends_on_eps(c))
      ctx.shared = build_approximant(ctx.branch, approximant_options(c, c.epsilons.front()));
    if (c.kind == ExperimentKind::phase_falsification) {
      ApproximantOptions o = approximant_options(c, c.epsilons.front());
      o.include_theta = false;
      ctx.theta_free = build_approximant(ctx.branch, o);
    }
  } catch (const Error& e) {
    throw with_context("approximant", e.what());
  }

  SweepReport rep;
  rep.name = c.name;
  rep.kind = c.kind;
  const int n = static_cast<int>(c.epsilons.size());
  rep.rows.resize(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    try {
      rep.rows[si] = compute_row(ctx, c.epsilons[si]);
    } catch (const std::exception& e) {
      errors[si] = e.what();
    }
  }
  for (int i = 0; i < n; ++i)
    if (!errors[static_cast<std::size_t>(i)].empty())
      throw with_context("eps = " + format_eps(c.epsilons[static_cast<std::size_t>(i)]), errors[static_cast<std::size_t>(i)]);

  if (c.kind == ExperimentKind::boundstate_tracking) {
    try {
      predictor_study(ctx, rep);
    } catch (const Error& e) {
      throw with_context("predictor study", e.what());
    }
  }

  for (const auto& [metric, window] : c.windows) {
    std::vector<double> e, v;
    for (const auto& row : rep.rows)
      if (auto x = row.metric(metric)) {
        e.push_back(row.epsilon);
        v.push_back(*x);
      }
    SlopeCheck chk{metric, fit_slope(e, v), window, false};
    chk.pass = window.contains(chk.fit.slope);
    for (std::size_t k : chk.fit.excluded)
      rep.warnings.push_back(metric + ": eps = " + format_eps(e[k]) + " excluded from the fit (zero error)");
    rep.checks.push_back(chk);
  }
  if (c.kind == ExperimentKind::phase_falsification) {
    bool ok = true;
    for (const auto& row : rep.rows) ok = ok && row.metric("err_t1").value_or(0.0) > c.floor;
    rep.floor_pass = ok;
  }
  for (const auto& row : rep.rows) {
    const std::string e = "eps = " + format_eps(row.epsilon) + ": ";
    if (row.max_tail > kReflectedMassTol)
      rep.warnings.push_back(e + "tail mass " + format_eps(row.max_tail) + " near the domain edge exceeds 1e-8");
    if (!row.dt_converged) rep.warnings.push_back(e + "dt refinement did not settle within 5%");
    if (!row.residual_guard_ok) rep.warnings.push_back(e + "residual dominated by mesh differencing");
    if (row.mass_drift > kMassTol) rep.warnings.push_back(e + "mass drift " + format_eps(row.mass_drift));
  }
  for (const auto& row : rep.rows)
    if (row.invariants_ok()) {
      rep.epsilon0 = row.epsilon;
      break;
    }

  bool pass = true;
  for (const auto& chk : rep.checks) pass = pass && chk.pass;
  if (rep.floor_pass) pass = pass && *rep.floor_pass;
  if (rep.predictor_bounded) pass = pass && *rep.predictor_bounded;
  if (c.kind == ExperimentKind::residual_order)
    for (const auto& row : rep.rows) pass = pass && row.residual_guard_ok;
  rep.pass = pass;

  if (write_files) write_outputs(rep, c);
  return rep;
}

void write_outputs(const SweepReport& rep, const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  using nlohmann::ordered_json;
  fs::create_directories(c.output_dir);
  auto open = [&](const std::string& file) {
    std::ofstream out(c.output_dir / file);
    if (!out) throw Error("cannot write " + (c.output_dir / file).string());
    out.precision(17);
    return out;
  };

  // Timing is kept out of report.json so that the report is reproducible.
  ordered_json j;
  j["name"] = rep.name;
  j["kind"] = to_string(rep.kind);
  j["lambda"] = c.lambda;
  j["sigma"] = c.sigma;
  j["alpha"] = c.alpha;
  j["order"] = c.order;
  j["rows"] = ordered_json::array();
  for (const auto& row : rep.rows) {
    ordered_json r;
    r["epsilon"] = row.epsilon;
    for (const auto& [k, v] : row.metrics) r[k] = v;
    r["c_dt"] = row.c_dt;
    r["dt_converged"] = row.dt_converged;
    r["mass_drift"] = row.mass_drift;
    r["max_tail_mass"] = row.max_tail;
    r["residual_guard_ok"] = row.residual_guard_ok;
    r["invariants_ok"] = row.invariants_ok();
    j["rows"].push_back(r);
  }
  j["checks"] = ordered_json::array();
  for (const auto& chk : rep.checks)
    j["checks"].push_back({{"metric", chk.metric},
                           {"slope", chk.fit.slope},
                           {"intercept", chk.fit.intercept},
                           {"max_deviation", chk.fit.max_deviation},
                           {"points", chk.fit.points},
                           {"window", {chk.window.lo, chk.window.hi}},
                           {"pass", chk.pass}});
  if (rep.floor_pass) j["floor"] = {{"value", c.floor}, {"pass", *rep.floor_pass}};
  if (rep.predictor_bounded)
    j["predictor"] = {{"gaps", rep.predictor_gaps}, {"ratios", rep.predictor_ratios}, {"bounded", *rep.predictor_bounded}};
  j["epsilon0"] = rep.epsilon0 ? ordered_json(*rep.epsilon0) : ordered_json(nullptr);
  j["warnings"] = rep.warnings;
  j["pass"] = rep.pass;
  open("report.json") << j.dump(2) << '\n';

  auto csv = open("sweep.csv");
  csv << "epsilon,sup_err_l2,sup_err_h1,proj_dist,residual_n0,residual_n1,runtime_s\n";
  for (const auto& row : rep.rows) {
    csv << row.epsilon;
    for (const char* k : {"sup_err_l2", "sup_err_h1", "proj_dist", "residual_n0", "residual_n1"}) {
      csv << ',';
      if (auto v = row.metric(k)) csv << *v;
    }
    csv << ',' << row.runtime_s << '\n';
  }

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& row : rep.rows)
    for (const auto& [k, v] : row.metrics) series[k].emplace_back(row.epsilon, v);
  for (const auto& [k, pts] : series) {
    auto dat = open(k + ".dat");
    dat << "# epsilon " << k << '\n';
    for (const auto& [e, v] : pts) dat << e << ' ' << v << '\n';
  }
  for (const auto& row : rep.rows) {
    if (row.times.empty()) continue;
    auto tr = open("traj_eps_" + format_eps(row.epsilon) + ".csv");
    tr << "t,mass,tail_mass\n";
    for (std::size_t i = 0; i < row.times.size(); ++i)
      tr << row.times[i] << ',' << row.mass[i] << ',' << row.tail[i] << '\n';
  }
}

int exit_status(const SweepReport& report) { return report.pass ? 0 : 1; }

}  // namespace adiab
