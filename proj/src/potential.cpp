#include "adiab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "adiab/error.hpp"

namespace adiab {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

double shape_value(WellShape s, double xi) {
  switch (s) {
    case WellShape::sech2: {
      if (std::abs(xi) > 350.0) return 0.0;
      const double c = sech(xi);
      return c * c;
    }
    case WellShape::gaussian:
      return std::exp(-xi * xi);
  }
  return 0.0;
}

double shape_slope(WellShape s, double xi) {
  switch (s) {
    case WellShape::sech2: {
      if (std::abs(xi) > 350.0) return 0.0;
      const double c = sech(xi);
      return -2.0 * c * c * std::tanh(xi);
    }
    case WellShape::gaussian:
      return -2.0 * xi * std::exp(-xi * xi);
  }
  return 0.0;
}

void require_in_interval(const PotentialSpec& spec, double t) {
  const double tol = 1e-12 * std::max(1.0, std::abs(spec.t1 - spec.t0));
  if (t < spec.t0 - tol || t > spec.t1 + tol)
    throw DomainError("time " + std::to_string(t) + " outside potential interval [" + std::to_string(spec.t0) +
                      ", " + std::to_string(spec.t1) + "]");
}

}  // namespace

double Path::value(double t, double t0, double t1) const {
  switch (kind) {
    case Kind::constant:
      return c0;
    case Kind::linear:
      return c0 + c1 * t;
    case Kind::smoothstep: {
      const double tau = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
      return c0 + c1 * tau * tau * (3.0 - 2.0 * tau);
    }
    case Kind::sine:
      return c0 + c1 * std::sin(omega * t);
  }
  return c0;
}

double Path::rate(double t, double t0, double t1) const {
  switch (kind) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return c1;
    case Kind::smoothstep: {
      const double tau = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
      return c1 * 6.0 * tau * (1.0 - tau) / (t1 - t0);
    }
    case Kind::sine:
      return c1 * omega * std::cos(omega * t);
  }
  return 0.0;
}

double PotentialSpec::value(double t, double x) const {
  const double a = center.value(t, t0, t1);
  const double w = width.value(t, t0, t1);
  return -depth * shape_value(shape, (x - a) / w);
}

double PotentialSpec::time_derivative(double t, double x) const {
  const double a = center.value(t, t0, t1);
  const double w = width.value(t, t0, t1);
  const double xi = (x - a) / w;
  const double dxi = -center.rate(t, t0, t1) / w - xi * width.rate(t, t0, t1) / w;
  return -depth * shape_slope(shape, xi) * dxi;
}

void PotentialSpec::validate(const Grid1D& grid, int samples) const {
  if (!(t1 > t0)) throw ConfigError("potential interval must satisfy t1 > t0");
  if (!(depth > 0.0)) throw ConfigError("well depth must be positive");
  switch (kind) {
    case PotentialKind::static_well:
      if (center.kind != Path::Kind::constant || width.kind != Path::Kind::constant)
        throw ConfigError("static well requires constant center and width");
      break;
    case PotentialKind::translating_well:
      if (width.kind != Path::Kind::constant) throw ConfigError("translating well requires a constant width");
      break;
    case PotentialKind::breathing_well:
      if (center.kind != Path::Kind::constant) throw ConfigError("breathing well requires a constant center");
      break;
  }
  const double L = grid.half_width();
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    const double w = width.value(t, t0, t1);
    if (!(w > 0.0)) throw ConfigError("well width must stay positive on the interval");
    const double tail = std::max(std::abs(value(t, -L)), std::abs(value(t, L - grid.spacing())));
    if (tail >= 1e-10)
      throw ConfigError("potential does not decay to the domain edge (|V| = " + std::to_string(tail) +
                        " at t = " + std::to_string(t) + ")");
    const double vmax = depth;
    double dvmax = 0.0;
    for (int j = 0; j < grid.size(); ++j) dvmax = std::max(dvmax, std::abs(time_derivative(t, grid.node(j))));
    if (!std::isfinite(vmax) || !std::isfinite(dvmax)) throw ConfigError("potential or its time derivative unbounded");
  }
}

PotentialSpec PotentialSpec::poeschl_teller(double depth) {
  PotentialSpec s;
  s.depth = depth;
  return s;
}

PotentialSpec PotentialSpec::translating(double depth, Path center, double t0, double t1) {
  PotentialSpec s;
  s.kind = PotentialKind::translating_well;
  s.depth = depth;
  s.center = center;
  s.t0 = t0;
  s.t1 = t1;
  return s;
}

PotentialSpec PotentialSpec::breathing(WellShape shape, double depth, Path width, double t0, double t1) {
  PotentialSpec s;
  s.kind = PotentialKind::breathing_well;
  s.shape = shape;
  s.depth = depth;
  s.width = width;
  s.t0 = t0;
  s.t1 = t1;
  return s;
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::static_well:
      return "static";
    case PotentialKind::translating_well:
      return "translating_well";
    case PotentialKind::breathing_well:
      return "breathing_well";
  }
  return "?";
}

std::string to_string(WellShape s) { return s == WellShape::sech2 ? "sech2" : "gaussian"; }

PotentialKind potential_kind_from_string(const std::string& s) {
  if (s == "static") return PotentialKind::static_well;
  if (s == "translating_well") return PotentialKind::translating_well;
  if (s == "breathing_well") return PotentialKind::breathing_well;
  throw ConfigError("unknown potential kind '" + s + "'");
}

WellShape well_shape_from_string(const std::string& s) {
  if (s == "sech2") return WellShape::sech2;
  if (s == "gaussian") return WellShape::gaussian;
  throw ConfigError("unknown well shape '" + s + "'");
}

std::vector<double> sample_potential(const PotentialSpec& spec, double t, const Grid1D& grid) {
  require_in_interval(spec, t);
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = spec.value(t, grid.node(j));
  return v;
}

std::vector<double> sample_potential_dt(const PotentialSpec& spec, double t, const Grid1D& grid) {
  require_in_interval(spec, t);
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = spec.time_derivative(t, grid.node(j));
  return v;
}

Field evaluate(const PotentialSpec& spec, double t, const Grid1D& grid) {
  const auto v = sample_potential(spec, t, grid);
  return Field(grid, CVec(v.begin(), v.end()));
}

Field evaluate_dt(const PotentialSpec& spec, double t, const Grid1D& grid) {
  const auto v = sample_potential_dt(spec, t, grid);
  return Field(grid, CVec(v.begin(), v.end()));
}

}  // namespace adiab
