#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace adiab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace detail {
struct FftPlans;
}

/// Periodic grid on [-L, L) with N equispaced nodes x_j = -L + j h.
///
/// Wavenumbers follow the FFTW index order: k_m = (pi/L) * m for
/// m = 0, 1, ..., N/2-1, -N/2, ..., -1.  Every spectral operation in the
/// library uses this ordering.
///
/// Copies are cheap; nodes, wavenumbers and transform plans are shared.
class Grid1D {
 public:
  Grid1D(double half_width, int num_points);

  double half_width() const { return L_; }
  int size() const { return n_; }
  double spacing() const { return h_; }
  double node(int j) const { return (*x_)[static_cast<std::size_t>(j)]; }
  std::span<const double> nodes() const { return *x_; }
  std::span<const double> wavenumbers() const { return *k_; }
  int nyquist_index() const { return n_ / 2; }

  /// Unnormalized DFT, F_m = sum_j f_j exp(-2 pi i j m / N).
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  /// Inverse of forward(), including the 1/N factor.
  void backward(std::span<const cplx> in, std::span<cplx> out) const;

  bool operator==(const Grid1D& other) const { return L_ == other.L_ && n_ == other.n_; }

 private:
  double L_;
  int n_;
  double h_;
  std::shared_ptr<const std::vector<double>> x_;
  std::shared_ptr<const std::vector<double>> k_;
  std::shared_ptr<const detail::FftPlans> plans_;
};

/// Complex samples psi(x_j) of a wavefunction on a Grid1D.
class Field {
 public:
  explicit Field(Grid1D grid);
  Field(Grid1D grid, CVec values);

  /// Samples f(x_j) of a complex function.
  template <class F>
  static Field from_function(const Grid1D& grid, F&& f) {
    CVec v(static_cast<std::size_t>(grid.size()));
    for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = cplx(f(grid.node(j)));
    return Field(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  int size() const { return grid_.size(); }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  const CVec& data() const { return values_; }
  cplx& operator[](int j) { return values_[static_cast<std::size_t>(j)]; }
  const cplx& operator[](int j) const { return values_[static_cast<std::size_t>(j)]; }

  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(cplx s);

 private:
  Grid1D grid_;
  CVec values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx s, Field a);
Field operator*(Field a, cplx s);

/// Throws GridMismatch unless both fields live on the same grid.
void require_same_grid(const Field& a, const Field& b);

/// <f, g> = h * sum_j conj(f_j) g_j  (conjugate-linear in f).
cplx inner_product(const Field& f, const Field& g);

/// (h * sum_j |f_j|^p)^(1/p); p >= 1.
double norm_lp(const Field& f, double p);
inline double norm_l2(const Field& f) { return norm_lp(f, 2.0); }

/// Spectral coefficients normalized so that sum_m |c_m|^2 = ||f||_{L2}^2,
/// i.e. c_m = (h / sqrt(2L)) * F_m in FFTW order.
CVec transform(const Field& f);
Field inverse_transform(const Grid1D& grid, std::span<const cplx> coeffs);

/// Fourier multiplier (i k_m)^order.  The Nyquist mode is dropped for odd
/// orders so derivatives of real fields stay real.
Field spectral_derivative(const Field& f, int order);

/// (sum_m (1 + k_m^2)^k |c_m|^2)^(1/2).
double sobolev_norm(const Field& f, int k);

/// Mass of f outside |x| <= (1 - fraction) L, used as a wrap-around monitor.
double tail_mass(const Field& f, double fraction = 0.1);

/// Little-endian interleaved (re, im) float64 dump plus a JSON sidecar
/// "<path>.json" holding {"L": ..., "N": ...}.
void write_field(const Field& f, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

}  // namespace adiab
