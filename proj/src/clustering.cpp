#include "evadopt/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "evadopt/errors.hpp"

namespace evadopt {

namespace {

// Portable uniform in [0,1): distributions in <random> differ between
// standard libraries, raw engine output does not.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sq_dist(const Matrix& data, Eigen::Index row, const Matrix& centroids, Eigen::Index c) {
    return (data.row(row) - centroids.row(c)).squaredNorm();
}

std::size_t distinct_rows(const Matrix& data) {
    std::set<std::vector<double>> rows;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        std::vector<double> r;
        r.reserve(static_cast<std::size_t>(data.cols()));
        for (Eigen::Index j = 0; j < data.cols(); ++j) r.push_back(data(i, j));
        rows.insert(std::move(r));
    }
    return rows.size();
}

Matrix plus_plus_seed(const Matrix& data, int k, std::mt19937_64& rng) {
    const Eigen::Index n = data.rows();
    Matrix centroids(k, data.cols());
    auto first = static_cast<Eigen::Index>(unit(rng) * static_cast<double>(n));
    centroids.row(0) = data.row(std::min(first, n - 1));

    Vector nearest = Vector::Constant(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], sq_dist(data, i, centroids, c - 1));
        const double total = nearest.sum();
        Eigen::Index pick = n - 1;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= nearest[i];
                if (target < 0.0 && nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            while (nearest[pick] == 0.0) --pick;  // float slack at the end
        }
        centroids.row(c) = data.row(pick);
    }
    return centroids;
}

KMeansResult lloyd(const Matrix& data, Matrix centroids) {
    const Eigen::Index n = data.rows();
    const auto k = centroids.rows();
    std::vector<int> assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < 10'000; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(data, i, centroids, 0);
            for (Eigen::Index c = 1; c < k; ++c) {
                const double d = sq_dist(data, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (assign[static_cast<std::size_t>(i)] != best) {
                assign[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed) break;

        Matrix sums = Matrix::Zero(k, data.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = assign[static_cast<std::size_t>(i)];
            sums.row(c) += data.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (Eigen::Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: move it onto the point farthest from its centroid.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = sq_dist(data, i, centroids, assign[static_cast<std::size_t>(i)]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centroids.row(c) = data.row(far);
            assign[static_cast<std::size_t>(far)] = static_cast<int>(c);
        }
    }

    KMeansResult r;
    r.assignments = std::move(assign);
    r.centroids = std::move(centroids);
    for (Eigen::Index i = 0; i < n; ++i) r.wcss += sq_dist(data, i, r.centroids, r.assignments[static_cast<std::size_t>(i)]);
    return r;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, int k, std::uint64_t seed, int restarts) {
    if (k < 1) throw InvalidModel("k must be at least 1");
    if (restarts < 1) throw InvalidModel("need at least one restart");
    if (data.rows() < k) throw DegenerateData("fewer rows than clusters");
    if (distinct_rows(data) < static_cast<std::size_t>(k))
        throw DegenerateData("fewer distinct points than clusters (k = " + std::to_string(k) + ")");

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
        KMeansResult cand = lloyd(data, plus_plus_seed(data, k, rng));
        if (cand.wcss < best.wcss) {
            cand.restart = r;
            best = std::move(cand);
        }
    }
    return best;
}

double silhouette(const Matrix& data, const std::vector<int>& assignments) {
    const Eigen::Index n = data.rows();
    if (static_cast<std::size_t>(n) != assignments.size())
        throw InvalidModel("one assignment per row required");
    const int k = assignments.empty() ? 0 : *std::max_element(assignments.begin(), assignments.end()) + 1;
    std::vector<int> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
    for (int a : assignments) {
        if (a < 0) throw InvalidModel("negative cluster id");
        ++sizes[static_cast<std::size_t>(a)];
    }
    if (std::count_if(sizes.begin(), sizes.end(), [](int s) { return s > 0; }) < 2)
        throw SingleCluster("silhouette needs at least two non-empty clusters");

    double total = 0.0;
    std::vector<double> sum_to(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto own = static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)]);
        if (sizes[own] == 1) continue;
        std::fill(sum_to.begin(), sum_to.end(), 0.0);
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) sum_to[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] += (data.row(i) - data.row(j)).norm();
        const double a = sum_to[own] / (sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < sum_to.size(); ++c)
            if (c != own && sizes[c] > 0) b = std::min(b, sum_to[c] / sizes[c]);
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

ClusterDiagnostics cluster_diagnostics(const Matrix& data, int k_min, int k_max,
                                       std::uint64_t seed, int restarts) {
    if (k_min < 2 || k_max < k_min) throw InvalidModel("cluster sweep needs 2 <= k_min <= k_max");
    ClusterDiagnostics diag;
    double best = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        KMeansResult r = kmeans(data, k, seed, restarts);
        const double s = silhouette(data, r.assignments);
        diag.k_range.push_back(k);
        diag.wcss.push_back(r.wcss);
        diag.silhouette.push_back(s);
        if (s > best) {
            best = s;
            diag.best_k = k;
            diag.assignments = std::move(r.assignments);
        }
    }
    return diag;
}

Matrix standardize_columns(const Matrix& data) {
    Matrix z = data;
    const double rows = static_cast<double>(data.rows());
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const double mean = data.col(j).mean();
        z.col(j).array() -= mean;
        const double sd = std::sqrt(z.col(j).squaredNorm() / rows);
        if (sd > 0.0) z.col(j) /= sd;
    }
    return z;
}

}  // namespace evadopt
