#pragma once

#include <functional>

#include "adiab/grid.hpp"

namespace adiab {

using VecOp = std::function<void(const CVec& in, CVec& out)>;
using VecDot = std::function<cplx(const CVec& a, const CVec& b)>;

struct KrylovOptions {
  double rel_tol = 1e-13;
  int max_iter = 2000;
};

struct KrylovResult {
  int iterations = 0;
  double residual = 0.0;  // true residual ||b - A x|| in the dot norm
  bool converged = false;
};

/// Preconditioned MINRES for A x = b with A self-adjoint and the
/// preconditioner (if any) positive definite, both with respect to `dot`.
/// `x` holds the initial guess on entry.
KrylovResult minres(const VecOp& apply, const VecOp& precondition, const CVec& b, CVec& x, const VecDot& dot,
                    const KrylovOptions& opts = {});

}  // namespace adiab
