#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "ctvae/dataset.hpp"
#include "ctvae/matrix.hpp"

namespace ctvae {

struct KMeansResult {
    std::size_t k = 0;
    Matrix centroids;                     // k x d
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
};

/// Lloyd iterations from k-means++ seeding, until assignment fixpoint or
/// max_iters. Empty clusters are reseeded at the point farthest from its
/// centroid; distance ties go to the lowest cluster id.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 300);

/// Mean silhouette over all samples; singleton-cluster samples score 0.
/// Exact O(n^2) over the given points.
double silhouette(const Matrix& points, const std::vector<std::size_t>& assignments);

struct RelabelResult {
    Dataset data;
    std::size_t chosen_k = 0;
    /// chosen_k new ids for the old majority class, then the other old classes
    /// in order: mapping[i] = {old_label, new_label} rows for reporting.
    std::vector<std::pair<int, int>> mapping;
    std::vector<std::pair<std::size_t, double>> silhouette_by_k;
};

/// Split the majority class c* into k* pseudo-classes, k* chosen by the best
/// mean silhouette over the candidates. For silhouette scoring only, classes
/// larger than `silhouette_cap` points are uniformly subsampled.
RelabelResult relabel_majority(const Dataset& data, int majority_class,
                               const std::set<std::size_t>& k_candidates, std::uint64_t seed,
                               std::size_t silhouette_cap = 2000);

}  // namespace ctvae
