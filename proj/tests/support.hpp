#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "evadopt/dynamics.hpp"
#include "evadopt/model.hpp"

namespace testing {

using evadopt::CommunityModel;
using evadopt::InfluenceMode;
using evadopt::Matrix;
using evadopt::ModelParameters;
using evadopt::SystemState;
using evadopt::Vector;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(gen_() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Vector vector(int n, double lo, double hi) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 gen_;
};

/// Row-stochastic matrix with zero diagonal (n >= 2) and random sparsity.
inline Matrix random_stochastic(Rng& rng, int n, double density = 0.6) {
    Matrix W = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (n == 1) {
            W(0, 0) = 1.0;
            break;
        }
        for (int j = 0; j < n; ++j)
            if (j != i && rng.uniform() < density) W(i, j) = rng.uniform(0.05, 1.0);
        if (W.row(i).sum() == 0.0) W(i, (i + 1) % n) = 1.0;
        W.row(i) /= W.row(i).sum();
    }
    return W;
}

inline Vector random_simplex(Rng& rng, int n) {
    Vector f = rng.vector(n, 0.05, 1.0);
    return f / f.sum();
}

/// sup of c * w^T a over the unit box, computed from the parameters alone.
inline double pressure_bound(const Vector& f, const Vector& m, InfluenceMode mode) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index j = 0; j < f.size(); ++j) {
        num += mode == InfluenceMode::Unweighted ? m[j] : m[j] * f[j];
        den += m[j] * f[j];
    }
    return num / den;
}

struct RandomInstance {
    ModelParameters params;
    Vector x0;
};

/// Parameters that satisfy the adoption-probability bound and keep opinions
/// inside [0,1] for the drawn x0. `beta_fraction` scales beta relative to the
/// largest admissible value.
inline RandomInstance random_instance(Rng& rng, int n, InfluenceMode mode, double beta_fraction = -1.0) {
    RandomInstance r;
    ModelParameters& p = r.params;
    p.influence = mode;
    p.f = random_simplex(rng, n);
    p.m = rng.vector(n, 0.5, 5.0);
    const double pbar = pressure_bound(p.f, p.m, mode);
    const double beta_max = std::min(1.0, 1.0 / (p.m.maxCoeff() * pbar));
    p.beta = beta_max * (beta_fraction < 0.0 ? rng.uniform(0.01, 1.0) : beta_fraction);
    p.gamma = rng.uniform(0.0, 0.99);
    p.delta = rng.vector(n, 0.0, 1.0);
    p.W = random_stochastic(rng, n);
    r.x0 = rng.vector(n, 0.0, 1.0);
    p.lambda = rng.vector(n, 0.0, 0.8);
    p.xi = Vector(n);
    for (int i = 0; i < n; ++i) {
        // alpha x0 + lambda + xi pbar <= 1 with alpha = 1 - lambda - xi
        const double room = (1.0 - p.lambda[i]) * (1.0 - r.x0[i]) / std::max(pbar - r.x0[i], 1e-12);
        p.xi[i] = std::min(room, 1.0 - p.lambda[i]) * rng.uniform(0.0, 0.999);
    }
    return r;
}

inline SystemState random_state(Rng& rng, const Vector& x0) {
    const auto n = x0.size();
    Vector a(n), d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a[i] = rng.uniform();
        d[i] = rng.uniform() * (1.0 - a[i]);
    }
    return SystemState::from(a, d, x0);
}

/// Largest real root of det(lambda I - A) for a square matrix, found by
/// Faddeev-LeVerrier coefficients, a downward scan and bisection. For a
/// nonnegative matrix this is the spectral radius.
inline double perron_root_oracle(const Matrix& A) {
    const auto n = A.rows();
    // coefficients c[k] of lambda^{n-k}
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    c[0] = 1.0;
    Matrix M = Matrix::Zero(n, n);
    const Matrix I = Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        M = A * M + c[static_cast<std::size_t>(k - 1)] * I;
        c[static_cast<std::size_t>(k)] = -(A * M).trace() / static_cast<double>(k);
    }
    auto poly = [&](double x) {
        double v = 0.0;
        for (double ck : c) v = v * x + ck;
        return v;
    };
    double hi = A.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    const double step = hi * 1e-5;
    double lo = hi;
    while (lo > -step && poly(lo) > 0.0) lo -= step;
    hi = lo + step;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (poly(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testing
