#include <omp.h>

#include <random>

#include "adiab/kernels.hpp"
#include "doctest.h"

namespace k = adiab::kernels;
using adiab::kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = {d(rng), d(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("OpenMP kernels agree with the serial reference") {
  std::mt19937 rng(5);
  for (std::size_t n : {std::size_t{7}, std::size_t{512}, std::size_t{10000}}) {
    const auto a = random_vec(n, rng), b = random_vec(n, rng);
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = std::sin(0.1 * static_cast<double>(j));

    CHECK(std::abs(k::serial::dot(a, b) - k::parallel::dot(a, b)) < 1e-10 * static_cast<double>(n));
    CHECK(k::serial::sum_abs_pow(a, 4.0) == doctest::Approx(k::parallel::sum_abs_pow(a, 4.0)).epsilon(1e-12));

    auto s1 = a, p1 = a;
    k::serial::multiply(s1, b);
    k::parallel::multiply(p1, b);
    CHECK(max_diff(s1, p1) == 0.0);

    auto s2 = a, p2 = a;
    k::serial::scale_by_real(s2, v);
    k::parallel::scale_by_real(p2, v);
    CHECK(max_diff(s2, p2) == 0.0);

    auto s3 = b, p3 = b;
    k::serial::axpy({0.3, -1.1}, a, s3);
    k::parallel::axpy({0.3, -1.1}, a, p3);
    CHECK(max_diff(s3, p3) == 0.0);

    auto s4 = a, p4 = a;
    k::serial::potential_phase(s4, v, 0.01, 0.7, 2);
    k::parallel::potential_phase(p4, v, 0.01, 0.7, 2);
    CHECK(max_diff(s4, p4) == 0.0);
  }
}

TEST_CASE("parallel reductions are reproducible for a fixed thread count") {
  std::mt19937 rng(9);
  const auto a = random_vec(50000, rng), b = random_vec(50000, rng);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const cplx first = k::parallel::dot(a, b);
  for (int r = 0; r < 5; ++r) CHECK(k::parallel::dot(a, b) == first);
  omp_set_num_threads(saved);
}

TEST_CASE("potential phase is unimodular and exact for a constant state") {
  std::vector<cplx> a(16, cplx(0.5, 0.0));
  const std::vector<double> v(16, -1.0);
  k::potential_phase(a, v, 0.2, 2.0, 1);
  // exp(-i 0.2 (-1 + 2 * 0.25))
  const cplx expect = 0.5 * std::polar(1.0, 0.1);
  for (const cplx& z : a) CHECK(std::abs(z - expect) < 1e-15);
  CHECK(k::abs_pow2s(cplx(0.0, 2.0), 3) == 64.0);
}
