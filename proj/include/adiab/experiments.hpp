#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adiab/config.hpp"
#include "adiab/metrics.hpp"

namespace adiab {

/// Results for one epsilon.  Metrics that do not apply to the experiment kind
/// are absent from `metrics` and written as empty CSV cells.
struct SweepRow {
  double epsilon = 0.0;
  std::map<std::string, double> metrics;
  double runtime_s = 0.0;
  double c_dt = 0.0;        // step rule finally used
  bool dt_converged = true;  // halving changed the primary metric by < 5%
  double mass_drift = 0.0;   // max |‖psi(t)‖ - ‖psi(t0)‖|
  double max_tail = 0.0;     // max tail mass along the trajectory
  bool residual_guard_ok = true;
  std::vector<double> times, mass, tail;  // trajectory summary
  bool invariants_ok() const;
  std::optional<double> metric(const std::string& name) const;
};

struct SlopeCheck {
  std::string metric;
  SlopeFit fit;
  SlopeWindow window;
  bool pass = false;
};

struct SweepReport {
  std::string name;
  ExperimentKind kind = ExperimentKind::linear_adiabatic;
  std::vector<SweepRow> rows;
  std::vector<SlopeCheck> checks;
  /// phase_falsification: error at t1 above `floor` for every epsilon.
  std::optional<bool> floor_pass;
  /// boundstate_tracking: ||Phi - predictor|| / (E* - E) over dyadic E* - E.
  std::vector<double> predictor_gaps, predictor_ratios;
  std::optional<bool> predictor_bounded;
  /// Largest epsilon whose row satisfies every monitored invariant.
  std::optional<double> epsilon0;
  std::vector<std::string> warnings;
  bool pass = false;
};

/// Runs the sweep (epsilon values in parallel) and, if requested, writes
/// report.json, sweep.csv, <metric>.dat and traj_eps_<eps>.csv into
/// config.output_dir.  Module errors are rethrown with the experiment kind and
/// epsilon attached.
SweepReport run_experiment(const ExperimentConfig& config, bool write_files = true);

void write_outputs(const SweepReport& report, const ExperimentConfig& config);

/// 0 when every check passes, 1 otherwise.
int exit_status(const SweepReport& report);

}  // namespace adiab
