#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adiab/eigen.hpp"
#include "adiab/potential.hpp"

namespace adiab {

enum class ExperimentKind {
  linear_adiabatic,
  weakly_nonlinear,
  phase_falsification,
  projector,
  residual_order,
  boundstate_tracking,
  subcritical,
  intermediate,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct SlopeWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double s) const { return s >= lo && s <= hi; }
};

/// One experiment, read from a JSON file (see README for the keys).
struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::linear_adiabatic;
  PotentialSpec potential;
  double L = 20.0;
  int N = 512;
  std::vector<double> epsilons{0.1, 0.05, 0.025, 0.0125};
  double lambda = 0.0;
  int sigma = 1;
  double alpha = 1.0;
  int order = 0;       // approximant order compared against
  int data_order = 1;  // order of the well-prepared initial data
  int which = 0;
  GaugeMode gauge = GaugeMode::parallel_transport;
  int branch_steps = 200;
  double c_dt = 0.01;
  bool refine_dt = true;
  int max_refinements = 4;
  double mass_max = 0.5;
  /// Acceptance windows keyed by metric name (sup_err_l2, sup_err_h1,
  /// proj_dist, residual, epsest, wave_bound, proj_bound, wave_star).
  std::map<std::string, SlopeWindow> windows;
  /// phase_falsification: every eps must show an error at t1 above this.
  double floor = 0.0;
  std::filesystem::path output_dir = "out";

  /// Module-level checks; throws ConfigError.
  void validate() const;
  /// Metric used for dt refinement and the headline slope.
  std::string primary_metric() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

}  // namespace adiab
