#pragma once

#include <cstdint>
#include <vector>

#include "evadopt/model.hpp"

namespace evadopt {

struct KMeansResult {
    std::vector<int> assignments;  // row -> cluster id in [0, k)
    Matrix centroids;              // k x dims
    double wcss = 0.0;
    int restart = 0;               // index of the winning restart
};

/// Lloyd's algorithm with k-means++ seeding. Restart r draws from a
/// generator seeded with seed + r; the lowest WCSS wins (ties: lowest r).
/// Throws DegenerateData when the rows hold fewer than k distinct points.
KMeansResult kmeans(const Matrix& data, int k, std::uint64_t seed, int restarts = 10);

/// Mean silhouette; singleton clusters contribute 0. Throws SingleCluster
/// with fewer than two non-empty clusters.
double silhouette(const Matrix& data, const std::vector<int>& assignments);

struct ClusterDiagnostics {
    std::vector<int> k_range;
    std::vector<double> wcss;
    std::vector<double> silhouette;
    int best_k = 0;                // argmax silhouette, first on ties
    std::vector<int> assignments;  // for best_k
};

ClusterDiagnostics cluster_diagnostics(const Matrix& data, int k_min, int k_max,
                                       std::uint64_t seed, int restarts = 10);

/// Columns shifted to zero mean and scaled to unit variance (constant
/// columns are only centred).
Matrix standardize_columns(const Matrix& data);

}  // namespace evadopt
