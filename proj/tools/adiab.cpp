// Command-line driver: run one experiment, a directory of them, or inspect the
// eigenbranch / bound-state family of a configuration.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "adiab/boundstate.hpp"
#include "adiab/error.hpp"
#include "adiab/experiments.hpp"

namespace fs = std::filesystem;
using namespace adiab;

namespace {

void print_report(const SweepReport& r) {
  std::printf("%s (%s)\n", r.name.c_str(), to_string(r.kind).c_str());
  for (const auto& row : r.rows) {
    std::printf("  eps = %-8g", row.epsilon);
    for (const auto& [k, v] : row.metrics) std::printf("  %s = %.4e", k.c_str(), v);
    std::printf("  [%.1f s]\n", row.runtime_s);
  }
  for (const auto& c : r.checks)
    std::printf("  slope %-11s %7.3f  window [%g, %g]  %s\n", c.metric.c_str(), c.fit.slope, c.window.lo, c.window.hi,
                c.pass ? "ok" : "FAIL");
  if (r.floor_pass) std::printf("  floor at t1: %s\n", *r.floor_pass ? "ok" : "FAIL");
  if (r.predictor_bounded) {
    std::printf("  predictor ratios:");
    for (double x : r.predictor_ratios) std::printf(" %.4g", x);
    std::printf("  %s\n", *r.predictor_bounded ? "bounded" : "FAIL");
  }
  if (r.epsilon0) std::printf("  empirical eps0 = %g\n", *r.epsilon0);
  for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
  std::printf("  => %s\n", r.pass ? "PASS" : "FAIL");
}

int cmd_run(const fs::path& config) {
  const ExperimentConfig c = load_config(config);
  const SweepReport r = run_experiment(c);
  print_report(r);
  return exit_status(r);
}

int cmd_suite(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no .json configurations in " + dir.string());
  int status = 0;
  for (const auto& f : files) status = std::max(status, cmd_run(f));
  return status;
}

int cmd_eig(const fs::path& config) {
  const ExperimentConfig c = load_config(config);
  const Grid1D grid(c.L, c.N);
  const auto times = uniform_mesh(c.potential.t0, c.potential.t1, c.branch_steps);
  const EigenBranch br = track_branch(c.potential, grid, times, c.which, c.gauge);
  fs::create_directories(c.output_dir);
  std::ofstream out(c.output_dir / "branch.csv");
  out.precision(17);
  out << "t,E,gap\n";
  double min_gap = INFINITY;
  for (int i = 0; i < br.size(); ++i) {
    const auto si = static_cast<std::size_t>(i);
    out << br.times[si] << ',' << br.energy(i) << ',' << br.gaps[si] << '\n';
    min_gap = std::min(min_gap, br.gaps[si]);
  }
  std::printf("branch %d: E(t0) = %.12f  E(t1) = %.12f  min gap = %.6f\n", c.which, br.energy(0),
              br.energy(br.size() - 1), min_gap);
  std::printf("wrote %s\n", (c.output_dir / "branch.csv").c_str());
  return 0;
}

int cmd_boundstate(const fs::path& config) {
  const ExperimentConfig c = load_config(config);
  const Grid1D grid(c.L, c.N);
  const auto times = uniform_mesh(c.potential.t0, c.potential.t1, c.branch_steps);
  BoundStateOptions bo;
  bo.which = c.which;
  bo.mass_max = c.mass_max;
  fs::create_directories(c.output_dir);
  for (double eps : c.epsilons) {
    const auto fam = track_family(c.potential, grid, times, c.lambda, c.sigma, std::sqrt(eps), bo);
    double gap = 0.0;
    for (const auto& b : fam) gap = std::max(gap, b.E_star - b.E_linear);
    std::ostringstream name;
    name << "family_eps_" << eps << ".csv";
    write_family_csv(fam, c.output_dir / name.str());
    std::printf("eps = %-8g mass = %.6f  max(E* - E) = %.6e\n", eps, std::sqrt(eps), gap);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic NLS experiments"};
  app.require_subcommand(1);
  fs::path path;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", path, "Experiment configuration (JSON)")->required();
  auto* suite = app.add_subcommand("suite", "Run every configuration in a directory");
  suite->add_option("--config-dir", path, "Directory of configurations")->required();
  auto* eig = app.add_subcommand("eig", "Track the eigenbranch and write branch.csv");
  eig->add_option("--config", path, "Experiment configuration (JSON)")->required();
  auto* bs = app.add_subcommand("boundstate", "Track fixed-mass bound-state families");
  bs->add_option("--config", path, "Experiment configuration (JSON)")->required();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(path);
    if (*suite) return cmd_suite(path);
    if (*eig) return cmd_eig(path);
    return cmd_boundstate(path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
