#include "adiab/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <vector>

namespace adiab::kernels {

namespace {

inline double abs_pow(cplx z, double p) {
  if (p == 2.0) return std::norm(z);
  return std::pow(std::abs(z), p);
}

inline cplx phase_factor(double tau, double v, double g, int sigma, cplx z) {
  const double angle = tau * (v + g * abs_pow2s(z, sigma));
  return {std::cos(angle), -std::sin(angle)};
}

}  // namespace

namespace serial {

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::conj(a[j]) * b[j];
  return s;
}

double sum_abs_pow(std::span<const cplx> a, double p) {
  double s = 0.0;
  for (const cplx& z : a) s += abs_pow(z, p);
  return s;
}

void multiply(std::span<cplx> a, std::span<const cplx> m) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= m[j];
}

void scale_by_real(std::span<cplx> a, std::span<const double> m) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= m[j];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t j = 0; j < y.size(); ++j) y[j] += alpha * x[j];
}

void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= phase_factor(tau, v[j], g, sigma, a[j]);
}

}  // namespace serial

namespace parallel {

// Reductions accumulate per-thread partials and combine them in thread
// order, so results are reproducible for a fixed thread count.

template <class T, class Fn>
T ordered_sum(std::size_t n, Fn&& term) {
  std::vector<T> partial(static_cast<std::size_t>(omp_get_max_threads()), T{});
#pragma omp parallel
  {
    const auto tid = static_cast<std::size_t>(omp_get_thread_num());
    const auto nt = static_cast<std::size_t>(omp_get_num_threads());
    const std::size_t lo = n * tid / nt, hi = n * (tid + 1) / nt;
    T s{};
    for (std::size_t j = lo; j < hi; ++j) s += term(j);
    partial[tid] = s;
  }
  T s{};
  for (const T& p : partial) s += p;
  return s;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return ordered_sum<cplx>(a.size(), [&](std::size_t j) { return std::conj(a[j]) * b[j]; });
}

double sum_abs_pow(std::span<const cplx> a, double p) {
  return ordered_sum<double>(a.size(), [&](std::size_t j) { return abs_pow(a[j], p); });
}

void multiply(std::span<cplx> a, std::span<const cplx> m) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] *= m[static_cast<std::size_t>(j)];
}

void scale_by_real(std::span<cplx> a, std::span<const double> m) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] *= m[static_cast<std::size_t>(j)];
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] += alpha * x[static_cast<std::size_t>(j)];
}

void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const auto k = static_cast<std::size_t>(j);
    a[k] *= phase_factor(tau, v[k], g, sigma, a[k]);
  }
}

}  // namespace parallel

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return a.size() >= kParallelThreshold ? parallel::dot(a, b) : serial::dot(a, b);
}

double sum_abs_pow(std::span<const cplx> a, double p) {
  return a.size() >= kParallelThreshold ? parallel::sum_abs_pow(a, p) : serial::sum_abs_pow(a, p);
}

void multiply(std::span<cplx> a, std::span<const cplx> m) {
  if (a.size() >= kParallelThreshold)
    parallel::multiply(a, m);
  else
    serial::multiply(a, m);
}

void scale_by_real(std::span<cplx> a, std::span<const double> m) {
  if (a.size() >= kParallelThreshold)
    parallel::scale_by_real(a, m);
  else
    serial::scale_by_real(a, m);
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  if (y.size() >= kParallelThreshold)
    parallel::axpy(alpha, x, y);
  else
    serial::axpy(alpha, x, y);
}

void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma) {
  if (a.size() >= kParallelThreshold)
    parallel::potential_phase(a, v, tau, g, sigma);
  else
    serial::potential_phase(a, v, tau, g, sigma);
}

}  // namespace adiab::kernels
