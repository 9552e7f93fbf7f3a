#include "adiab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "adiab/error.hpp"
#include "json.hpp"

namespace adiab {

using nlohmann::json;

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::linear_adiabatic, "linear_adiabatic"},
    {ExperimentKind::weakly_nonlinear, "weakly_nonlinear"},
    {ExperimentKind::phase_falsification, "phase_falsification"},
    {ExperimentKind::projector, "projector"},
    {ExperimentKind::residual_order, "residual_order"},
    {ExperimentKind::boundstate_tracking, "boundstate_tracking"},
    {ExperimentKind::subcritical, "subcritical"},
    {ExperimentKind::intermediate, "intermediate"},
};

const char* kMetrics[] = {"sup_err_l2", "sup_err_h1", "proj_dist", "residual",
                          "epsest", "wave_bound", "proj_bound", "wave_star"};

Path parse_path(const json& j) {
  const std::string kind = j.value("path", "constant");
  const double c0 = j.value("c0", 0.0), c1 = j.value("c1", 0.0), omega = j.value("omega", 1.0);
  if (kind == "constant") return Path::constant(c0);
  if (kind == "linear") return Path::linear(c0, c1);
  if (kind == "smoothstep") return Path::smoothstep(c0, c1);
  if (kind == "sine") return Path::sine(c0, c1, omega);
  throw ConfigError("unknown path kind '" + kind + "'");
}

PotentialSpec parse_potential(const json& j) {
  PotentialSpec s;
  s.kind = potential_kind_from_string(j.value("kind", "static"));
  s.shape = well_shape_from_string(j.value("shape", "sech2"));
  s.depth = j.value("depth", 1.0);
  if (j.contains("center")) s.center = parse_path(j.at("center"));
  if (j.contains("width")) s.width = parse_path(j.at("width"));
  s.t0 = j.value("t0", 0.0);
  s.t1 = j.value("t1", 1.0);
  return s;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (const auto& [kind, name] : kKindNames)
    if (s == name) return kind;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string ExperimentConfig::primary_metric() const {
  switch (kind) {
    case ExperimentKind::projector:
      return "proj_dist";
    case ExperimentKind::residual_order:
      return "residual";
    case ExperimentKind::boundstate_tracking:
      return windows.count("epsest") || windows.empty() ? "epsest" : windows.begin()->first;
    default:
      return "sup_err_l2";
  }
}

void ExperimentConfig::validate() const {
  if (epsilons.empty()) throw ConfigError("epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0 && epsilons[i] <= 1.0)) throw ConfigError("epsilon values must lie in (0, 1]");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("epsilon list must be strictly decreasing");
  }
  if (std::abs(lambda) > 2.0) throw ConfigError("|lambda| must not exceed 2");
  if (sigma < 1 || sigma > 4) throw ConfigError("sigma must be in 1..4");
  if (!(alpha >= 1.0)) throw ConfigError("alpha must be >= 1");
  if (order < 0 || order > 2 || data_order < 0 || data_order > 2) throw ConfigError("orders must be 0, 1 or 2");
  if (which < 0) throw ConfigError("branch index must be >= 0");
  if (branch_steps < 8) throw ConfigError("branch_steps must be at least 8");
  if (!(c_dt > 0.0 && c_dt <= 0.05)) throw ConfigError("c_dt must lie in (0, 0.05]");
  if (max_refinements < 0) throw ConfigError("max_refinements must be >= 0");
  if (!(mass_max > 0.0)) throw ConfigError("mass_max must be positive");
  for (const auto& [metric, w] : windows) {
    bool known = false;
    for (const char* m : kMetrics) known = known || metric == m;
    if (!known) throw ConfigError("unknown metric '" + metric + "' in windows");
    if (!(w.lo <= w.hi)) throw ConfigError("slope window for " + metric + " must satisfy lo <= hi");
  }
  if (!windows.empty() && epsilons.size() < 3) throw ConfigError("slope windows need at least three epsilon values");
  switch (kind) {
    case ExperimentKind::weakly_nonlinear:
    case ExperimentKind::phase_falsification:
      if (lambda == 0.0) throw ConfigError(to_string(kind) + " requires lambda != 0");
      break;
    case ExperimentKind::subcritical:
      if (alpha < 2.0) throw ConfigError("subcritical requires alpha >= 2");
      break;
    case ExperimentKind::intermediate:
      if (!(alpha > 1.0 && alpha < 2.0)) throw ConfigError("intermediate requires 1 < alpha < 2");
      break;
    case ExperimentKind::boundstate_tracking:
      if (lambda == 0.0) throw ConfigError("boundstate_tracking requires lambda != 0");
      if (std::sqrt(epsilons.front()) > mass_max) throw ConfigError("sqrt(epsilon) exceeds mass_max");
      break;
    default:
      break;
  }
  if (!(L > 0.0) || N < 16 || N % 2 != 0) throw ConfigError("grid needs L > 0 and even N >= 16");
  potential.validate(Grid1D(L, N));
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  try {
    ExperimentConfig c;
    c.name = j.value("name", "experiment");
    c.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("potential")) c.potential = parse_potential(j.at("potential"));
    if (j.contains("grid")) {
      c.L = j.at("grid").value("L", c.L);
      c.N = j.at("grid").value("N", c.N);
    }
    if (j.contains("epsilons")) c.epsilons = j.at("epsilons").get<std::vector<double>>();
    c.lambda = j.value("lambda", c.lambda);
    c.sigma = j.value("sigma", c.sigma);
    c.alpha = j.value("alpha", c.alpha);
    c.order = j.value("order", c.order);
    c.data_order = j.value("data_order", c.data_order);
    c.which = j.value("which", c.which);
    c.gauge = gauge_mode_from_string(j.value("gauge", std::string("parallel_transport")));
    c.branch_steps = j.value("branch_steps", c.branch_steps);
    c.c_dt = j.value("c_dt", c.c_dt);
    c.refine_dt = j.value("refine_dt", c.refine_dt);
    c.max_refinements = j.value("max_refinements", c.max_refinements);
    c.mass_max = j.value("mass_max", c.mass_max);
    c.floor = j.value("floor", c.floor);
    c.output_dir = j.value("output_dir", std::string("out/") + c.name);
    if (j.contains("windows"))
      for (const auto& [metric, w] : j.at("windows").items()) {
        const auto v = w.get<std::vector<double>>();
        if (v.size() != 2) throw ConfigError("slope window for " + metric + " needs [lo, hi]");
        c.windows[metric] = {v[0], v[1]};
      }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace adiab
