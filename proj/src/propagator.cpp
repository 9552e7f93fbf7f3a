#include "adiab/propagator.hpp"

#include <cmath>
#include <fstream>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"

namespace adiab {

double SolverParams::coupling() const { return alpha == 1.0 ? lambda * epsilon : lambda * std::pow(epsilon, alpha); }

void SolverParams::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
  if (sigma < 1) throw DomainError("sigma must be a positive integer");
  if (!(alpha >= 1.0)) throw DomainError("alpha must be >= 1");
  if (!(c_dt > 0.0 && c_dt <= 0.05)) throw DomainError("c_dt must lie in (0, 0.05]");
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  if (max_steps < 1) throw DomainError("max_steps must be positive");
}

namespace {

class Stepper {
 public:
  Stepper(const PotentialSpec& spec, const SolverParams& params, const Grid1D& grid)
      : spec_(spec), p_(params), grid_(grid), g_(params.coupling()), buf_(static_cast<std::size_t>(grid.size())) {}

  // Kinetic flow over tau, exp(-i tau k^2 / (2 eps)).
  void kinetic(Field& psi, double tau) {
    const auto& m = multiplier(tau);
    grid_.forward(psi.values(), buf_);
    kernels::multiply(buf_, m);
    grid_.backward(buf_, psi.values());
  }

  void pointwise(Field& psi, double t_mid, double tau) {
    if (spec_.kind != PotentialKind::static_well || v_.empty()) v_ = sample_potential(spec_, t_mid, grid_);
    kernels::potential_phase(psi.values(), v_, tau / p_.epsilon, g_, p_.sigma);
  }

 private:
  const CVec& multiplier(double tau) {
    for (auto& [key, vec] : cache_)
      if (key == tau) return vec;
    CVec m(static_cast<std::size_t>(grid_.size()));
    const auto k = grid_.wavenumbers();
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = std::polar(1.0, -tau * k[j] * k[j] / (2.0 * p_.epsilon));
    if (cache_.size() > 8) cache_.erase(cache_.begin());
    cache_.emplace_back(tau, std::move(m));
    return cache_.back().second;
  }

  const PotentialSpec& spec_;
  SolverParams p_;
  Grid1D grid_;
  double g_;
  CVec buf_;
  std::vector<double> v_;
  std::vector<std::pair<double, CVec>> cache_;
};

void require_finite(const Field& psi, long step) {
  if (!psi.all_finite()) throw Error("non-finite wavefunction after step " + std::to_string(step));
}

}  // namespace

Field strang_step(const Field& psi, double t, double dt, const PotentialSpec& spec, const SolverParams& params) {
  params.validate();
  if (dt == 0.0) throw DomainError("time step must be nonzero");
  Stepper st(spec, params, psi.grid());
  Field out = psi;
  st.kinetic(out, 0.5 * dt);
  st.pointwise(out, t + 0.5 * dt, dt);
  st.kinetic(out, 0.5 * dt);
  require_finite(out, 1);
  return out;
}

Trajectory propagate(const Field& psi_in, const PotentialSpec& spec, const SolverParams& params,
                     const std::vector<double>& sample_times) {
  params.validate();
  if (sample_times.empty()) throw DomainError("propagate needs at least one sample time");
  Trajectory tr;
  Field psi = psi_in;
  Stepper st(spec, params, psi.grid());
  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.mass.push_back(norm_l2(psi));
    tr.tail_mass.push_back(tail_mass(psi));
    tr.fields.push_back(psi);
  };
  record(sample_times.front());
  const double dt_max = params.c_dt * params.epsilon;
  for (std::size_t s = 1; s < sample_times.size(); ++s) {
    const double ta = sample_times[s - 1], tb = sample_times[s];
    const double span = tb - ta;
    if (span == 0.0) {
      record(tb);
      continue;
    }
    if (s > 1 && (span > 0) != (sample_times[1] - sample_times[0] > 0))
      throw DomainError("sample times must be monotone");
    const long n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / dt_max - 1e-9)));
    if (tr.steps + n > params.max_steps) throw Error("step guard exceeded (" + std::to_string(params.max_steps) + ")");
    const double dt = span / static_cast<double>(n);
    // Adjacent kinetic half steps merge into full steps inside an interval.
    st.kinetic(psi, 0.5 * dt);
    for (long k = 0; k < n; ++k) {
      st.pointwise(psi, ta + (static_cast<double>(k) + 0.5) * dt, dt);
      st.kinetic(psi, k + 1 < n ? dt : 0.5 * dt);
    }
    tr.steps += n;
    require_finite(psi, tr.steps);
    record(tb);
  }
  return tr;
}

Trajectory propagate(const Field& psi_in, const PotentialSpec& spec, const SolverParams& params, double t0,
                     double t1, int samples) {
  if (samples < 1) throw DomainError("need at least one sample interval");
  std::vector<double> times(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) times[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / samples;
  times.back() = t1;
  return propagate(psi_in, spec, params, times);
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  out << "t,mass,tail_mass\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    out << traj.times[i] << ',' << traj.mass[i] << ',' << traj.tail_mass[i] << '\n';
}

}  // namespace adiab
