#include "adiab/grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "adiab/error.hpp"
#include "adiab/kernels.hpp"
#include "json.hpp"

namespace adiab {

namespace detail {

// FFTW planning is not thread-safe; execution through the new-array
// interface is.  Plans are built once per grid under a global lock.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftPlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  explicit FftPlans(int n) {
    std::lock_guard lock(planner_mutex());
    auto* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* b = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
  }
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

}  // namespace detail

namespace {

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

}  // namespace

Grid1D::Grid1D(double half_width, int num_points) : L_(half_width), n_(num_points) {
  if (!(half_width > 0.0)) throw DomainError("grid half-width must be positive");
  if (num_points < 2 || num_points % 2 != 0) throw DomainError("grid size must be even and >= 2");
  h_ = 2.0 * L_ / n_;
  auto x = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n_));
  auto k = std::make_shared<std::vector<double>>(static_cast<std::size_t>(n_));
  const double dk = std::numbers::pi / L_;
  for (int j = 0; j < n_; ++j) {
    (*x)[static_cast<std::size_t>(j)] = -L_ + j * h_;
    const int m = j < n_ / 2 ? j : j - n_;
    (*k)[static_cast<std::size_t>(j)] = dk * m;
  }
  x_ = std::move(x);
  k_ = std::move(k);
  plans_ = std::make_shared<const detail::FftPlans>(n_);
}

void Grid1D::forward(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.data() == out.data()) {
    CVec tmp(in.begin(), in.end());
    fftw_execute_dft(plans_->fwd, as_fftw(tmp.data()), as_fftw(out.data()));
    return;
  }
  fftw_execute_dft(plans_->fwd, as_fftw(in.data()), as_fftw(out.data()));
}

void Grid1D::backward(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.data() == out.data()) {
    CVec tmp(in.begin(), in.end());
    fftw_execute_dft(plans_->bwd, as_fftw(tmp.data()), as_fftw(out.data()));
  } else {
    fftw_execute_dft(plans_->bwd, as_fftw(in.data()), as_fftw(out.data()));
  }
  const double s = 1.0 / n_;
  for (auto& z : out) z *= s;
}

Field::Field(Grid1D grid) : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_.size())) {}

Field::Field(Grid1D grid, CVec values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) throw DomainError("field length does not match grid");
}

bool Field::all_finite() const {
  for (const auto& z : values_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(1.0, o.values_, values_);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  kernels::axpy(-1.0, o.values_, values_);
  return *this;
}

Field& Field::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx s, Field a) { return a *= s; }
Field operator*(Field a, cplx s) { return a *= s; }

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
}

cplx inner_product(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return f.grid().spacing() * kernels::dot(f.values(), g.values());
}

double norm_lp(const Field& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("norm_lp requires finite p >= 1");
  const double s = f.grid().spacing() * kernels::sum_abs_pow(f.values(), p);
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

CVec transform(const Field& f) {
  const Grid1D& g = f.grid();
  CVec c(static_cast<std::size_t>(g.size()));
  g.forward(f.values(), c);
  const double s = g.spacing() / std::sqrt(2.0 * g.half_width());
  for (auto& z : c) z *= s;
  return c;
}

Field inverse_transform(const Grid1D& grid, std::span<const cplx> coeffs) {
  if (static_cast<int>(coeffs.size()) != grid.size()) throw DomainError("coefficient length does not match grid");
  Field f(grid);
  grid.backward(coeffs, f.values());
  const double s = std::sqrt(2.0 * grid.half_width()) / grid.spacing();
  f *= s;
  return f;
}

Field spectral_derivative(const Field& f, int order) {
  if (order < 1) throw DomainError("derivative order must be >= 1");
  const Grid1D& g = f.grid();
  CVec c(static_cast<std::size_t>(g.size()));
  g.forward(f.values(), c);
  const auto k = g.wavenumbers();
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (order % 2 == 1 && static_cast<int>(m) == g.nyquist_index()) {
      c[m] = 0.0;
      continue;
    }
    cplx mult = 1.0;
    for (int o = 0; o < order; ++o) mult *= cplx(0.0, k[m]);
    c[m] *= mult;
  }
  Field out(g);
  g.backward(c, out.values());
  return out;
}

double sobolev_norm(const Field& f, int k) {
  if (k < 0) throw DomainError("Sobolev index must be >= 0");
  const CVec c = transform(f);
  const auto kk = f.grid().wavenumbers();
  double s = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) s += std::pow(1.0 + kk[m] * kk[m], k) * std::norm(c[m]);
  return std::sqrt(s);
}

double tail_mass(const Field& f, double fraction) {
  const Grid1D& g = f.grid();
  const double edge = (1.0 - fraction) * g.half_width();
  double s = 0.0;
  for (int j = 0; j < g.size(); ++j)
    if (std::abs(g.node(j)) > edge) s += std::norm(f[j]);
  return s * g.spacing();
}

void write_field(const Field& f, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  for (const auto& z : f.values()) {
    const double re = z.real(), im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof re);
    out.write(reinterpret_cast<const char*>(&im), sizeof im);
  }
  nlohmann::json side = {{"L", f.grid().half_width()}, {"N", f.grid().size()}};
  std::ofstream meta(path.string() + ".json");
  meta << side.dump(2) << '\n';
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream meta(path.string() + ".json");
  if (!meta) throw Error("missing sidecar for " + path.string());
  const auto side = nlohmann::json::parse(meta);
  Grid1D grid(side.at("L").get<double>(), side.at("N").get<int>());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  CVec v(static_cast<std::size_t>(grid.size()));
  for (auto& z : v) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof re);
    in.read(reinterpret_cast<char*>(&im), sizeof im);
    z = {re, im};
  }
  if (!in) throw Error("truncated field dump " + path.string());
  return Field(grid, std::move(v));
}

}  // namespace adiab
