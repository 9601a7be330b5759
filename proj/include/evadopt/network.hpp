#pragma once

#include <vector>

#include "evadopt/model.hpp"

namespace evadopt {

inline constexpr double kDefaultCutoff = 0.9;
inline constexpr double kDefaultDamping = 0.85;

/// Standardized survey-item means of one community, each in [0,1].
struct OpinionProfile {
    CommunityIndex community;
    Vector values;
};

struct SimilarityGraph {
    Matrix kernel;  // symmetric, zero diagonal, zero beyond the cutoff
    Matrix W;       // row-normalized kernel
    double sigma = 0.0;
    double cutoff = kDefaultCutoff;
    std::vector<int> isolated;  // rows that fell back to a self-loop
};

/// Median Euclidean distance over all unordered pairs of distinct profiles.
/// Throws DegenerateProfiles if fewer than two profiles or all distances are 0.
double median_bandwidth(const std::vector<OpinionProfile>& profiles);

/// Gaussian kernel exp(-d^2 / (2 sigma^2)) for d <= cutoff (inclusive), 0
/// otherwise, with the diagonal zeroed. A row with no neighbour within the
/// cutoff becomes a unit self-loop in W and is listed in `isolated`.
SimilarityGraph build_similarity(const std::vector<OpinionProfile>& profiles, double sigma,
                                 double cutoff = kDefaultCutoff);

struct Centrality {
    Vector raw;
    Vector normalized;  // sums to 1
};

/// Weighted in-degree: column sums of W.
Centrality in_degree_centrality(const Matrix& W);
inline Centrality in_degree_centrality(const SimilarityGraph& g) { return in_degree_centrality(g.W); }

/// Stationary vector of the walk that follows W with probability `damping`
/// and teleports uniformly otherwise, i.e. pi = damping W^T pi + (1-damping)/n.
Vector pagerank(const Matrix& W, double damping = kDefaultDamping, double tol = 1e-12);
inline Vector pagerank(const SimilarityGraph& g, double damping = kDefaultDamping,
                       double tol = 1e-12) {
    return pagerank(g.W, damping, tol);
}

}  // namespace evadopt
