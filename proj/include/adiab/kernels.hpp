#pragma once

#include <complex>
#include <span>

// Pointwise and reduction kernels shared by the transforms, the Hamiltonian
// and the split-step propagator.  Each kernel has a plain serial version
// (kept as the reference for tests and benchmarks) and an OpenMP version.
// The unqualified entry points dispatch to OpenMP above kParallelThreshold
// points and fall back to serial otherwise.

namespace adiab::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t kParallelThreshold = 4096;

namespace serial {
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs_pow(std::span<const cplx> a, double p);
void multiply(std::span<cplx> a, std::span<const cplx> m);
void scale_by_real(std::span<cplx> a, std::span<const double> m);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
/// a_j <- a_j * exp(-i * tau * (v_j + g |a_j|^(2 sigma)))
void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma);
}  // namespace serial

namespace parallel {
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double sum_abs_pow(std::span<const cplx> a, double p);
void multiply(std::span<cplx> a, std::span<const cplx> m);
void scale_by_real(std::span<cplx> a, std::span<const double> m);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma);
}  // namespace parallel

/// sum_j conj(a_j) b_j
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
/// sum_j |a_j|^p
double sum_abs_pow(std::span<const cplx> a, double p);
void multiply(std::span<cplx> a, std::span<const cplx> m);
void scale_by_real(std::span<cplx> a, std::span<const double> m);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void potential_phase(std::span<cplx> a, std::span<const double> v, double tau, double g, int sigma);

/// |z|^(2 sigma) for integer sigma without calling pow.
inline double abs_pow2s(cplx z, int sigma) {
  const double r2 = std::norm(z);
  double out = 1.0;
  for (int s = 0; s < sigma; ++s) out *= r2;
  return out;
}

}  // namespace adiab::kernels
