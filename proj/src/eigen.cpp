#include "adiab/eigen.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"
#include "adiab/krylov.hpp"

namespace adiab {

Hamiltonian::Hamiltonian(Grid1D grid, std::vector<double> potential) : grid_(std::move(grid)), v_(std::move(potential)) {
  if (static_cast<int>(v_.size()) != grid_.size()) throw GridMismatch();
  const auto k = grid_.wavenumbers();
  kinetic_.resize(k.size());
  for (std::size_t m = 0; m < k.size(); ++m) kinetic_[m] = 0.5 * k[m] * k[m];
}

Hamiltonian Hamiltonian::at(const PotentialSpec& spec, double t, const Grid1D& grid) {
  return Hamiltonian(grid, sample_potential(spec, t, grid));
}

void Hamiltonian::apply(std::span<const cplx> in, std::span<cplx> out) const {
  CVec c(in.size());
  grid_.forward(in, c);
  kernels::scale_by_real(c, kinetic_);
  grid_.backward(c, out);
  for (std::size_t j = 0; j < in.size(); ++j) out[j] += v_[j] * in[j];
}

Field Hamiltonian::apply(const Field& f) const {
  if (!(f.grid() == grid_)) throw GridMismatch();
  Field out(grid_);
  apply(f.values(), out.values());
  return out;
}

void Hamiltonian::apply_kinetic_inverse(std::span<const cplx> in, std::span<cplx> out, double shift) const {
  CVec c(in.size());
  grid_.forward(in, c);
  for (std::size_t m = 0; m < c.size(); ++m) c[m] /= kinetic_[m] + shift;
  grid_.backward(c, out);
}

Field apply_hamiltonian(const Field& V_t, const Field& f) {
  require_same_grid(V_t, f);
  std::vector<double> v(static_cast<std::size_t>(V_t.size()));
  for (int j = 0; j < V_t.size(); ++j) v[static_cast<std::size_t>(j)] = V_t[j].real();
  return Hamiltonian(V_t.grid(), std::move(v)).apply(f);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd apply_real(const Hamiltonian& H, const VectorXd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  CVec in(n), out(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = x(static_cast<Eigen::Index>(j));
  H.apply(in, out);
  VectorXd y(x.size());
  for (std::size_t j = 0; j < n; ++j) y(static_cast<Eigen::Index>(j)) = out[j].real();
  return y;
}

// Orthogonalizes x against the first `cols` columns of V (two passes) and
// normalizes it.  Returns false when x is numerically in their span.
bool orthonormalize_against(const MatrixXd& V, Eigen::Index cols, VectorXd& x) {
  const double n0 = x.norm();
  if (n0 == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    if (cols > 0) x -= V.leftCols(cols) * (V.leftCols(cols).transpose() * x);
  const double n1 = x.norm();
  if (n1 < 1e-10 * n0) return false;
  x /= n1;
  return true;
}

// Davidson correction (T - theta)^{-1} r with the denominator kept away from 0.
VectorXd precondition(const Hamiltonian& H, const VectorXd& r, double theta) {
  const Grid1D& g = H.grid();
  const auto n = static_cast<std::size_t>(r.size());
  CVec in(n), c(n), out(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = r(static_cast<Eigen::Index>(j));
  g.forward(in, c);
  const auto k = g.wavenumbers();
  for (std::size_t m = 0; m < n; ++m) {
    double d = 0.5 * k[m] * k[m] - theta;
    if (std::abs(d) < 0.05) d = d < 0 ? -0.05 : 0.05;
    c[m] /= d;
  }
  g.backward(c, out);
  VectorXd t(r.size());
  for (std::size_t j = 0; j < n; ++j) t(static_cast<Eigen::Index>(j)) = out[j].real();
  return t;
}

EigenPair make_pair(const Hamiltonian& H, const VectorXd& x, double t) {
  const Grid1D& g = H.grid();
  const double scale = 1.0 / std::sqrt(g.spacing());
  Eigen::Index imax = 0;
  x.cwiseAbs().maxCoeff(&imax);
  const double sign = x(imax) < 0 ? -1.0 : 1.0;
  Field chi(g);
  for (int j = 0; j < g.size(); ++j) chi[j] = sign * scale * x(j);
  const double nrm = norm_l2(chi);
  chi *= 1.0 / nrm;
  Field hchi = H.apply(chi);
  const double E = inner_product(chi, hchi).real();
  Field res = hchi - E * chi;
  return {t, E, std::move(chi), norm_l2(res)};
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const Hamiltonian& H, int m, const EigenOptions& opts,
                                         const std::vector<Field>* guess, double t) {
  if (m < 1) throw DomainError("lowest_eigenpairs requires m >= 1");
  const Grid1D& g = H.grid();
  const Eigen::Index n = g.size();
  const int block = std::min<int>(m + opts.guard_vectors, static_cast<int>(n));
  const int max_sub = std::max(opts.max_subspace, 3 * block);

  MatrixXd V(n, max_sub + block), W(n, max_sub + block);
  Eigen::Index cols = 0;
  auto append = [&](VectorXd x) {
    if (cols >= V.cols()) return false;
    if (!orthonormalize_against(V, cols, x)) return false;
    V.col(cols) = x;
    W.col(cols) = apply_real(H, x);
    ++cols;
    return true;
  };

  if (guess) {
    for (const Field& f : *guess) {
      VectorXd re(n), im(n);
      for (Eigen::Index j = 0; j < n; ++j) {
        re(j) = f[static_cast<int>(j)].real();
        im(j) = f[static_cast<int>(j)].imag();
      }
      append(re);
      if (im.norm() > 1e-8 * re.norm()) append(im);
    }
  }
  // Hermite-Gaussian seeds centred on the bottom of the well.
  const auto v = H.potential();
  const auto jmin = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  const double xc = g.node(jmin), w = 2.0;
  for (int k = 0; cols < block && k < 4 * block; ++k) {
    VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double y = (g.node(static_cast<int>(j)) - xc) / w;
      x(j) = std::pow(y, k) * std::exp(-0.5 * y * y);
    }
    append(x);
  }

  VectorXd theta;
  MatrixXd X, HX;
  double worst = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    MatrixXd S = V.leftCols(cols).transpose() * W.leftCols(cols);
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    const Eigen::Index kk = std::min<Eigen::Index>(block, cols);
    theta = es.eigenvalues().head(kk);
    X = V.leftCols(cols) * es.eigenvectors().leftCols(kk);
    HX = W.leftCols(cols) * es.eigenvectors().leftCols(kk);
    MatrixXd R = HX - X * theta.asDiagonal();

    worst = 0.0;
    std::vector<Eigen::Index> open;
    for (Eigen::Index i = 0; i < kk; ++i) {
      const double r = R.col(i).norm();
      if (i < m) worst = std::max(worst, r);
      if (r > opts.tol) open.push_back(i);
    }
    if (kk >= m && worst <= opts.tol) {
      std::vector<EigenPair> out;
      for (Eigen::Index i = 0; i < m; ++i) {
        EigenPair p = make_pair(H, X.col(i), t);
        if (p.E < 0.0) out.push_back(std::move(p));
      }
      return out;
    }

    if (cols + static_cast<Eigen::Index>(open.size()) > max_sub) {
      V.leftCols(kk) = X;
      W.leftCols(kk) = HX;
      cols = kk;
    }
    int added = 0;
    for (Eigen::Index i : open) added += append(precondition(H, R.col(i), theta(i))) ? 1 : 0;
    if (added == 0) {
      // Restart from the Ritz vectors once before declaring stagnation.
      if (cols > kk) {
        V.leftCols(kk) = X;
        W.leftCols(kk) = HX;
        cols = kk;
        for (Eigen::Index i : open) added += append(precondition(H, R.col(i), theta(i))) ? 1 : 0;
      }
      if (added == 0) break;
    }
  }
  throw ConvergenceError("Davidson eigensolver did not converge", worst);
}

std::vector<EigenPair> lowest_eigenpairs(const PotentialSpec& spec, double t, const Grid1D& grid, int m,
                                         const EigenOptions& opts) {
  return lowest_eigenpairs(Hamiltonian::at(spec, t, grid), m, opts, nullptr, t);
}

std::vector<EigenPair> dense_lowest_eigenpairs(const Hamiltonian& H, int m, double t) {
  const Eigen::Index n = H.grid().size();
  MatrixXd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXd e = VectorXd::Zero(n);
    e(j) = 1.0;
    A.col(j) = apply_real(H, e);
  }
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  std::vector<EigenPair> out;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(m, n); ++i) {
    EigenPair p = make_pair(H, es.eigenvectors().col(i), t);
    if (p.E < 0.0) out.push_back(std::move(p));
  }
  return out;
}

double gap(const std::vector<EigenPair>& pairs, int which) {
  if (pairs.empty() || which < 0 || which >= static_cast<int>(pairs.size()))
    throw DomainError("gap: eigenpair index out of range");
  const double E = pairs[static_cast<std::size_t>(which)].E;
  double g = std::abs(E);
  for (std::size_t j = 0; j < pairs.size(); ++j)
    if (static_cast<int>(j) != which) g = std::min(g, std::abs(E - pairs[j].E));
  return g;
}

std::string to_string(GaugeMode g) { return g == GaugeMode::parallel_transport ? "parallel_transport" : "real_aligned"; }

GaugeMode gauge_mode_from_string(const std::string& s) {
  if (s == "parallel_transport") return GaugeMode::parallel_transport;
  if (s == "real_aligned") return GaugeMode::real_aligned;
  throw ConfigError("unknown gauge mode '" + s + "'");
}

std::optional<int> EigenBranch::index_of(double t) const {
  if (times.empty()) return std::nullopt;
  const double dt = step();
  if (dt <= 0.0) return std::abs(t - times.front()) < 1e-12 ? std::optional<int>(0) : std::nullopt;
  const double s = (t - times.front()) / dt;
  const long i = std::lround(s);
  if (i < 0 || i >= static_cast<long>(times.size())) return std::nullopt;
  if (std::abs(s - static_cast<double>(i)) > 1e-7) return std::nullopt;
  return static_cast<int>(i);
}

std::vector<double> uniform_mesh(double t0, double t1, int steps) {
  if (steps < 1) throw DomainError("mesh needs at least one step");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / steps;
  t.back() = t1;
  return t;
}

EigenBranch track_branch(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& times, int which,
                         GaugeMode gauge, const BranchOptions& opts) {
  if (times.empty()) throw DomainError("track_branch needs at least one time");
  if (which < 0) throw DomainError("branch index must be >= 0");
  EigenBranch br{spec, grid, which, gauge, times, {}, {}, {}};
  br.pairs.reserve(times.size());
  std::vector<Field> guess;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Hamiltonian H = Hamiltonian::at(spec, t, grid);
    auto pairs = lowest_eigenpairs(H, which + 2, opts.eigen, guess.empty() ? nullptr : &guess, t);
    if (static_cast<int>(pairs.size()) <= which)
      throw GapError("eigenvalue " + std::to_string(which) + " is not bound at t = " + std::to_string(t), t);
    const double g = gap(pairs, which);
    if (g < opts.min_gap)
      throw GapError("spectral gap " + std::to_string(g) + " below minimum " + std::to_string(opts.min_gap) +
                         " at t = " + std::to_string(t),
                     t);
    EigenPair p = pairs[static_cast<std::size_t>(which)];
    if (!br.pairs.empty()) {
      const cplx ov = inner_product(p.chi, br.pairs.back().chi);
      if (std::abs(ov) < opts.min_overlap)
        throw Error("eigenvalue crossing suspected at t = " + std::to_string(t) +
                    " (overlap " + std::to_string(std::abs(ov)) + ")");
      if (gauge == GaugeMode::parallel_transport)
        p.chi *= ov / std::abs(ov);
      else if (ov.real() < 0.0)
        p.chi *= -1.0;
    }
    guess.clear();
    for (const auto& q : pairs) guess.push_back(q.chi);
    br.gaps.push_back(g);
    br.pairs.push_back(std::move(p));
    br.gauge_rate.push_back(0.0);
  }
  return br;
}

Field partial_resolvent_solve(const Hamiltonian& H, double E, const Field& chi, const Field& r) {
  require_same_grid(chi, r);
  const Grid1D& g = H.grid();
  const double h = g.spacing();
  auto project = [&](Field f) {
    const cplx c = inner_product(chi, f);
    kernels::axpy(-c, chi.values(), f.values());
    return f;
  };
  const Field rhs = project(r);
  const auto apply = [&](const CVec& in, CVec& out) {
    out.resize(in.size());
    H.apply(in, out);
    const cplx c = h * kernels::dot(chi.values(), in);
    for (std::size_t j = 0; j < in.size(); ++j) out[j] += -E * in[j] + c * chi.values()[j];
  };
  const double shift = std::max(1.0, std::abs(E));
  const auto precond = [&](const CVec& in, CVec& out) {
    out.resize(in.size());
    H.apply_kinetic_inverse(in, out, shift);
  };
  const auto dot = [h](const CVec& a, const CVec& b) { return h * kernels::dot(a, b); };

  CVec x(static_cast<std::size_t>(g.size()), 0.0);
  const auto res = minres(apply, precond, rhs.data(), x, dot, {1e-14, 4000});
  const double scale = std::max(1.0, norm_l2(rhs));
  if (res.residual > 1e-9 * scale) throw ConvergenceError("partial resolvent solve failed to converge", res.residual);
  return project(Field(g, std::move(x)));
}

Field partial_resolvent_solve(const Field& V_t, double E, const Field& chi, const Field& r) {
  require_same_grid(V_t, chi);
  std::vector<double> v(static_cast<std::size_t>(V_t.size()));
  for (int j = 0; j < V_t.size(); ++j) v[static_cast<std::size_t>(j)] = V_t[j].real();
  return partial_resolvent_solve(Hamiltonian(V_t.grid(), std::move(v)), E, chi, r);
}

Field dchi_dt(const EigenBranch& branch, int i) {
  const double t = branch.times[static_cast<std::size_t>(i)];
  const Field& chi = branch.chi(i);
  const auto dv = sample_potential_dt(branch.spec, t, branch.grid);
  Field rhs = chi;
  kernels::scale_by_real(rhs.values(), dv);
  rhs *= -1.0;
  Field out = partial_resolvent_solve(Hamiltonian::at(branch.spec, t, branch.grid), branch.energy(i), chi, rhs);
  const double rate = branch.gauge_rate.empty() ? 0.0 : branch.gauge_rate[static_cast<std::size_t>(i)];
  if (rate != 0.0) kernels::axpy(cplx(0.0, rate), chi.values(), out.values());
  return out;
}

double hellmann_feynman_Edot(const EigenBranch& branch, int i) {
  const double t = branch.times[static_cast<std::size_t>(i)];
  const Field& chi = branch.chi(i);
  const auto dv = sample_potential_dt(branch.spec, t, branch.grid);
  double s = 0.0;
  for (int j = 0; j < chi.size(); ++j) s += dv[static_cast<std::size_t>(j)] * std::norm(chi[j]);
  return s * branch.grid.spacing();
}

EigenBranch twist_gauge(const EigenBranch& branch, const std::function<double(double)>& S,
                        const std::function<double(double)>& S_rate) {
  EigenBranch out = branch;
  for (int i = 0; i < out.size(); ++i) {
    const double t = out.times[static_cast<std::size_t>(i)];
    out.pairs[static_cast<std::size_t>(i)].chi *= std::polar(1.0, S(t));
    out.gauge_rate[static_cast<std::size_t>(i)] += S_rate(t);
  }
  return out;
}

}  // namespace adiab
