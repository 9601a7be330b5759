#pragma once

#include <cstddef>

#include "evadopt/model.hpp"

namespace evadopt {

struct PowerIterationOptions {
    double relative_tolerance = 1e-13;
    std::size_t max_iterations = 100'000;
};

/// Spectral radius of a square nonnegative matrix by shifted power iteration.
///
/// The iteration runs on B = A + sI with s = 1e-12 + ||A||_inf / 2. Since A is
/// nonnegative, rho(B) = rho(A) + s and rho(B) strictly dominates every other
/// eigenvalue modulus of B whenever A is irreducible, which removes the
/// oscillation that plain power iteration shows on periodic matrices (e.g. a
/// permutation). Strict positivity of the iterate keeps reducible inputs safe.
/// Stops when an Aitken estimate of the remaining error falls under the
/// relative tolerance; throws NonConvergence otherwise.
double spectral_radius(const Matrix& A, const PowerIterationOptions& options = {});

}  // namespace evadopt
