#pragma once

#include <string>
#include <vector>

#include "adiab/grid.hpp"

namespace adiab {

enum class PotentialKind { static_well, translating_well, breathing_well };
enum class WellShape { sech2, gaussian };

/// C^1 closed-form path p(t) used for well centers and widths.
struct Path {
  enum class Kind { constant, linear, smoothstep, sine };
  Kind kind = Kind::constant;
  double c0 = 0.0;     // offset
  double c1 = 0.0;     // amplitude / slope
  double omega = 1.0;  // sine only

  /// smoothstep ramps over [t0, t1] with s = 3 tau^2 - 2 tau^3.
  double value(double t, double t0, double t1) const;
  double rate(double t, double t0, double t1) const;

  static Path constant(double c) { return {Kind::constant, c, 0.0, 1.0}; }
  static Path linear(double c0, double slope) { return {Kind::linear, c0, slope, 1.0}; }
  static Path smoothstep(double c0, double amplitude) { return {Kind::smoothstep, c0, amplitude, 1.0}; }
  static Path sine(double c0, double amplitude, double omega) { return {Kind::sine, c0, amplitude, omega}; }
};

/// V(t, x) = -depth * shape((x - center(t)) / width(t)) on t in [t0, t1].
struct PotentialSpec {
  PotentialKind kind = PotentialKind::static_well;
  WellShape shape = WellShape::sech2;
  double depth = 1.0;
  Path center = Path::constant(0.0);
  Path width = Path::constant(1.0);
  double t0 = 0.0;
  double t1 = 1.0;

  double value(double t, double x) const;
  double time_derivative(double t, double x) const;

  /// Checks kind/path consistency, a negative well, decay at +-L and bounded
  /// V, dV/dt on J (sampled).  Throws ConfigError.
  void validate(const Grid1D& grid, int samples = 64) const;

  static PotentialSpec poeschl_teller(double depth = 1.0);
  static PotentialSpec translating(double depth, Path center, double t0, double t1);
  static PotentialSpec breathing(WellShape shape, double depth, Path width, double t0, double t1);
};

std::string to_string(PotentialKind k);
std::string to_string(WellShape s);
PotentialKind potential_kind_from_string(const std::string& s);
WellShape well_shape_from_string(const std::string& s);

/// Real-valued samples of V(t, x_j); throws DomainError when t is outside J.
Field evaluate(const PotentialSpec& spec, double t, const Grid1D& grid);
Field evaluate_dt(const PotentialSpec& spec, double t, const Grid1D& grid);

/// Same samples as plain doubles, for the kernels.
std::vector<double> sample_potential(const PotentialSpec& spec, double t, const Grid1D& grid);
std::vector<double> sample_potential_dt(const PotentialSpec& spec, double t, const Grid1D& grid);

}  // namespace adiab
