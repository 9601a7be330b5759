#include "evadopt/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "evadopt/errors.hpp"

namespace evadopt {

double spectral_radius(const Matrix& A, const PowerIterationOptions& options) {
    if (A.rows() != A.cols() || A.rows() == 0)
        throw InvalidModel("spectral_radius needs a non-empty square matrix");
    if (!A.allFinite() || (A.array() < 0.0).any())
        throw InvalidModel("spectral_radius needs a finite nonnegative matrix");

    const Eigen::Index n = A.rows();
    const double row_norm = A.rowwise().sum().maxCoeff();
    if (row_norm == 0.0) return 0.0;

    const double shift = 1e-12 + 0.5 * row_norm;
    Vector x = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double mu = 0.0;
    double prev_gap = 0.0;

    for (std::size_t k = 1; k <= options.max_iterations; ++k) {
        Vector y = A * x + shift * x;
        const double next_mu = y.norm();
        y /= next_mu;
        const double gap = std::abs(next_mu - mu);
        const double move = (y - x).cwiseAbs().maxCoeff();
        mu = next_mu;
        x = std::move(y);

        if (k >= 3 && move <= 1e-9) {
            // converged to rounding: the gap ratio is meaningless here
            if (gap <= 8.0 * std::numeric_limits<double>::epsilon() * mu) return mu - shift;
            if (prev_gap > 0.0) {
                const double ratio = gap / prev_gap;
                if (ratio < 1.0) {
                    const double remaining = gap * ratio / (1.0 - ratio);
                    if (remaining <= options.relative_tolerance * mu &&
                        gap <= options.relative_tolerance * mu)
                        return mu - shift;
                }
            }
        }
        prev_gap = gap;
    }
    std::ostringstream os;
    os << "power iteration did not converge after " << options.max_iterations
       << " iterations; last estimate " << (mu - shift);
    throw NonConvergence(os.str());
}

}  // namespace evadopt
