#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "adiab/grid.hpp"
#include "adiab/potential.hpp"

namespace adiab {

/// H = -1/2 d^2/dx^2 + V on the periodic grid (spectral Laplacian).
class Hamiltonian {
 public:
  Hamiltonian(Grid1D grid, std::vector<double> potential);
  static Hamiltonian at(const PotentialSpec& spec, double t, const Grid1D& grid);

  const Grid1D& grid() const { return grid_; }
  std::span<const double> potential() const { return v_; }

  void apply(std::span<const cplx> in, std::span<cplx> out) const;
  Field apply(const Field& f) const;

  /// out = (T + shift)^{-1} in, T the kinetic part; shift > 0.
  void apply_kinetic_inverse(std::span<const cplx> in, std::span<cplx> out, double shift) const;

 private:
  Grid1D grid_;
  std::vector<double> v_;
  std::vector<double> kinetic_;  // k_m^2 / 2
};

/// H(t) f for a real-valued potential field V_t.
Field apply_hamiltonian(const Field& V_t, const Field& f);

struct EigenPair {
  double t = 0.0;
  double E = 0.0;
  Field chi;
  double residual = 0.0;  // ||H chi - E chi||_{L2}
};

struct EigenOptions {
  double tol = 1e-11;       // residual tolerance for unit vectors
  int max_iter = 400;       // Davidson outer iterations
  int guard_vectors = 2;    // extra block vectors beyond the requested count
  int max_subspace = 64;
};

/// The m lowest eigenpairs of the discrete H, ascending; only bound states
/// (E < 0) are returned.  Matrix-free block Davidson with a kinetic
/// preconditioner; `guess` seeds the search space.  Throws ConvergenceError.
std::vector<EigenPair> lowest_eigenpairs(const Hamiltonian& H, int m, const EigenOptions& opts = {},
                                         const std::vector<Field>* guess = nullptr, double t = 0.0);
std::vector<EigenPair> lowest_eigenpairs(const PotentialSpec& spec, double t, const Grid1D& grid, int m,
                                         const EigenOptions& opts = {});

/// Same contract from a dense symmetric eigensolve; intended for N <= 128
/// and as a test oracle.
std::vector<EigenPair> dense_lowest_eigenpairs(const Hamiltonian& H, int m, double t = 0.0);

/// Spectral gap of pairs[which]: distance to the other bound states and to
/// the continuum edge at 0.
double gap(const std::vector<EigenPair>& pairs, int which);

enum class GaugeMode { parallel_transport, real_aligned };
std::string to_string(GaugeMode g);
GaugeMode gauge_mode_from_string(const std::string& s);

/// Time-sampled isolated eigenbranch (E(t_i), chi(t_i)) with gap record.
struct EigenBranch {
  PotentialSpec spec;
  Grid1D grid;
  int which = 0;
  GaugeMode gauge = GaugeMode::parallel_transport;
  std::vector<double> times;
  std::vector<EigenPair> pairs;
  std::vector<double> gaps;
  /// dS/dt of a gauge twist chi -> chi e^{iS(t)} applied after tracking;
  /// zero for branches produced by track_branch.
  std::vector<double> gauge_rate;

  int size() const { return static_cast<int>(times.size()); }
  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  double t0() const { return times.front(); }
  double t1() const { return times.back(); }
  const Field& chi(int i) const { return pairs[static_cast<std::size_t>(i)].chi; }
  double energy(int i) const { return pairs[static_cast<std::size_t>(i)].E; }
  /// Index of the mesh point equal to t, or nullopt.
  std::optional<int> index_of(double t) const;
};

struct BranchOptions {
  double min_gap = 0.05;
  double min_overlap = 0.5;
  EigenOptions eigen;
};

/// Continues eigenpair `which` along `times`.  Throws GapError when the gap
/// drops below min_gap and Error on a detected crossing.
EigenBranch track_branch(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& times, int which,
                         GaugeMode gauge, const BranchOptions& opts = {});

/// times = t0 + i (t1 - t0) / steps, i = 0..steps.
std::vector<double> uniform_mesh(double t0, double t1, int steps);

/// v = (1 - P)(H - E)^{-1}(1 - P) r with P = |chi><chi|, from the deflated
/// solve (H - E + P) v = (1 - P) r.
Field partial_resolvent_solve(const Hamiltonian& H, double E, const Field& chi, const Field& r);
Field partial_resolvent_solve(const Field& V_t, double E, const Field& chi, const Field& r);

/// d chi / dt at mesh point i: the part orthogonal to chi solves
/// (H - E) d_t chi = (dE/dt - d_t V) chi; the chi component is set by the gauge.
Field dchi_dt(const EigenBranch& branch, int i);

/// dE/dt = <chi, d_t V chi>.
double hellmann_feynman_Edot(const EigenBranch& branch, int i);

/// chi(t) -> chi(t) e^{i S(t)}.  Used to probe gauge dependence.
EigenBranch twist_gauge(const EigenBranch& branch, const std::function<double(double)>& S,
                        const std::function<double(double)>& S_rate);

}  // namespace adiab
