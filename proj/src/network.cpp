#include "evadopt/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evadopt/errors.hpp"

namespace evadopt {

namespace {

Matrix pairwise_distances(const std::vector<OpinionProfile>& profiles) {
    const auto n = static_cast<Eigen::Index>(profiles.size());
    Matrix dist = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& u = profiles[static_cast<std::size_t>(i)].values;
            const auto& v = profiles[static_cast<std::size_t>(j)].values;
            if (u.size() != v.size()) throw DegenerateProfiles("profiles differ in length");
            dist(i, j) = dist(j, i) = (u - v).norm();
        }
    }
    return dist;
}

}  // namespace

double median_bandwidth(const std::vector<OpinionProfile>& profiles) {
    if (profiles.size() < 2) throw DegenerateProfiles("need at least two profiles");
    const Matrix dist = pairwise_distances(profiles);
    std::vector<double> pairs;
    pairs.reserve(profiles.size() * (profiles.size() - 1) / 2);
    for (Eigen::Index i = 0; i < dist.rows(); ++i)
        for (Eigen::Index j = i + 1; j < dist.cols(); ++j) pairs.push_back(dist(i, j));
    std::sort(pairs.begin(), pairs.end());
    if (pairs.back() == 0.0)
        throw DegenerateProfiles("all pairwise profile distances are zero");
    const std::size_t mid = pairs.size() / 2;
    return pairs.size() % 2 == 1 ? pairs[mid] : 0.5 * (pairs[mid - 1] + pairs[mid]);
}

SimilarityGraph build_similarity(const std::vector<OpinionProfile>& profiles, double sigma,
                                 double cutoff) {
    if (!(sigma > 0.0)) throw InvalidModel("kernel bandwidth must be positive");
    const Matrix dist = pairwise_distances(profiles);
    const auto n = dist.rows();

    SimilarityGraph g;
    g.sigma = sigma;
    g.cutoff = cutoff;
    g.kernel = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d = dist(i, j);
            if (d <= cutoff) g.kernel(i, j) = g.kernel(j, i) = std::exp(-d * d / (2.0 * sigma * sigma));
        }
    }

    g.W = g.kernel;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double total = g.W.row(i).sum();
        if (total > 0.0) {
            g.W.row(i) /= total;
        } else {
            g.W(i, i) = 1.0;
            g.isolated.push_back(static_cast<int>(i));
        }
    }
    return g;
}

Centrality in_degree_centrality(const Matrix& W) {
    Centrality c;
    c.raw = W.colwise().sum().transpose();
    const double total = c.raw.sum();
    c.normalized = total > 0.0 ? Vector(c.raw / total)
                               : Vector::Constant(c.raw.size(), 1.0 / static_cast<double>(c.raw.size()));
    return c;
}

Vector pagerank(const Matrix& W, double damping, double tol) {
    const auto n = W.rows();
    if (n == 0 || W.cols() != n) throw InvalidModel("pagerank needs a non-empty square matrix");
    if (!(damping >= 0.0 && damping < 1.0)) throw InvalidModel("damping must lie in [0,1)");
    const double teleport = (1.0 - damping) / static_cast<double>(n);
    const Matrix transition = W.transpose();

    Vector pi = Vector::Constant(n, 1.0 / static_cast<double>(n));
    for (int k = 0; k < 100'000; ++k) {
        Vector next = damping * (transition * pi);
        next.array() += teleport;
        next /= next.sum();
        const double change = (next - pi).cwiseAbs().sum();
        pi = std::move(next);
        if (change < tol) return pi;
    }
    std::ostringstream os;
    os << "pagerank did not converge to " << tol << " in 100000 iterations";
    throw NonConvergence(os.str());
}

}  // namespace evadopt
