#include "ctvae/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ctvae/rng.hpp"

namespace ctvae {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (k < 2) throw std::invalid_argument("kmeans: k must be >= 2");
    if (k > n) throw std::invalid_argument("kmeans: k > n");

    Rng rng(seed);
    Matrix centroids(k, d);

    // k-means++ seeding
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    std::size_t first = rng.index(n);
    centroids.set_row(0, points.row(first));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dist = sq_dist(points.row_ptr(i), centroids.row_ptr(c - 1), d);
            min_dist[i] = std::min(min_dist[i], dist);
            total += min_dist[i];
        }
        std::size_t chosen = 0;
        if (total > 0.0) {
            const double target = rng.uniform(0.0, total);
            double run = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                run += min_dist[i];
                if (run >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = rng.index(n);
        }
        centroids.set_row(c, points.row(chosen));
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<std::size_t> prev(n, k);  // impossible id forces first update
    for (std::size_t it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = sq_dist(points.row_ptr(i), centroids.row_ptr(0), d);
            for (std::size_t c = 1; c < k; ++c) {
                const double dist = sq_dist(points.row_ptr(i), centroids.row_ptr(c), d);
                if (dist < best_d) {
                    best_d = dist;
                    best = c;
                }
            }
            assign[i] = best;
            if (assign[i] != prev[i]) changed = true;
        }
        if (!changed) break;
        prev = assign;

        Matrix sums(k, d);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            const double* p = points.row_ptr(i);
            double* s = sums.row_ptr(assign[i]);
            for (std::size_t f = 0; f < d; ++f) s[f] += p[f];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed at the point farthest from its current centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dist =
                        sq_dist(points.row_ptr(i), centroids.row_ptr(assign[i]), d);
                    if (dist > far_d) {
                        far_d = dist;
                        far = i;
                    }
                }
                centroids.set_row(c, points.row(far));
            } else {
                for (std::size_t f = 0; f < d; ++f)
                    centroids(c, f) = sums(c, f) / static_cast<double>(counts[c]);
            }
        }
    }

    KMeansResult result;
    result.k = k;
    result.centroids = std::move(centroids);
    result.assignments = std::move(assign);
    result.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        result.inertia +=
            sq_dist(points.row_ptr(i), result.centroids.row_ptr(result.assignments[i]), d);
    return result;
}

double silhouette(const Matrix& points, const std::vector<std::size_t>& assignments) {
    const std::size_t n = points.rows();
    if (assignments.size() != n) throw std::invalid_argument("silhouette: length mismatch");
    std::size_t k = 0;
    for (std::size_t a : assignments) k = std::max(k, a + 1);
    if (k < 2) throw std::invalid_argument("silhouette: need >= 2 clusters");

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c)
        if (counts[c] == 0) throw std::invalid_argument("silhouette: empty cluster");

    double total = 0.0;
    std::vector<double> sum_by_cluster(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignments[i]] == 1) continue;  // singleton scores 0
        std::fill(sum_by_cluster.begin(), sum_by_cluster.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_by_cluster[assignments[j]] +=
                std::sqrt(sq_dist(points.row_ptr(i), points.row_ptr(j), points.cols()));
        }
        const std::size_t own = assignments[i];
        const double a = sum_by_cluster[own] / static_cast<double>(counts[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (c == own) continue;
            b = std::min(b, sum_by_cluster[c] / static_cast<double>(counts[c]));
        }
        const double denom = std::max(a, b);
        total += denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return total / static_cast<double>(n);
}

RelabelResult relabel_majority(const Dataset& data, int majority_class,
                               const std::set<std::size_t>& k_candidates, std::uint64_t seed,
                               std::size_t silhouette_cap) {
    data.validate();
    if (majority_class < 0 || majority_class >= data.n_classes())
        throw std::invalid_argument("relabel_majority: majority class does not exist");

    std::vector<std::size_t> maj_idx;
    for (std::size_t i = 0; i < data.n(); ++i)
        if (data.labels[i] == majority_class) maj_idx.push_back(i);
    if (maj_idx.empty()) throw std::invalid_argument("relabel_majority: empty majority class");

    Matrix points(maj_idx.size(), data.d_input());
    for (std::size_t i = 0; i < maj_idx.size(); ++i)
        points.set_row(i, data.features.row(maj_idx[i]));

    // uniform subsample for silhouette scoring only
    std::vector<std::size_t> score_idx(points.rows());
    std::iota(score_idx.begin(), score_idx.end(), 0);
    if (score_idx.size() > silhouette_cap) {
        Rng rng(seed ^ 0x5111u);
        std::shuffle(score_idx.begin(), score_idx.end(), rng.engine());
        score_idx.resize(silhouette_cap);
        std::sort(score_idx.begin(), score_idx.end());
    }

    RelabelResult result;
    double best_score = -std::numeric_limits<double>::infinity();
    std::size_t best_k = 0;
    KMeansResult best_fit;
    bool any_feasible = false;
    bool degenerate = true;
    for (std::size_t r = 1; r < points.rows() && degenerate; ++r)
        for (std::size_t c = 0; c < points.cols(); ++c)
            if (points(r, c) != points(0, c)) {
                degenerate = false;
                break;
            }

    for (std::size_t k : k_candidates) {
        if (k < 2 || k > points.rows()) continue;
        any_feasible = true;
        if (degenerate) continue;
        KMeansResult fit = kmeans(points, k, seed + k);
        std::size_t clusters_used = 0;
        {
            std::vector<bool> seen(k, false);
            for (std::size_t a : fit.assignments)
                if (!seen[a]) {
                    seen[a] = true;
                    ++clusters_used;
                }
        }
        double score;
        if (clusters_used < 2) {
            score = -1.0;
        } else {
            Matrix sub(score_idx.size(), points.cols());
            std::vector<std::size_t> sub_assign(score_idx.size());
            // compact cluster ids on the subsample so none is empty
            std::vector<long> remap(k, -1);
            long next = 0;
            for (std::size_t i = 0; i < score_idx.size(); ++i) {
                sub.set_row(i, points.row(score_idx[i]));
                const std::size_t a = fit.assignments[score_idx[i]];
                if (remap[a] < 0) remap[a] = next++;
                sub_assign[i] = static_cast<std::size_t>(remap[a]);
            }
            score = next >= 2 ? silhouette(sub, sub_assign) : -1.0;
        }
        result.silhouette_by_k.emplace_back(k, score);
        if (score > best_score) {
            best_score = score;
            best_k = k;
            best_fit = std::move(fit);
        }
    }
    if (!any_feasible) throw std::invalid_argument("relabel_majority: no feasible k candidate");

    if (degenerate || best_k == 0) {
        std::cerr << "relabel_majority: degenerate majority class; picking smallest k\n";
        for (std::size_t k : k_candidates)
            if (k >= 2 && k <= points.rows()) {
                best_k = k;
                break;
            }
        best_fit = kmeans(points, best_k, seed + best_k);
    }

    // majority splits take ids 0..k*-1; other old classes follow in order
    result.chosen_k = best_k;
    std::vector<int> new_id_of_old(static_cast<std::size_t>(data.n_classes()), -1);
    int next_id = static_cast<int>(best_k);
    for (int c = 0; c < data.n_classes(); ++c) {
        if (c == majority_class) continue;
        new_id_of_old[static_cast<std::size_t>(c)] = next_id++;
    }
    for (std::size_t j = 0; j < best_k; ++j)
        result.mapping.emplace_back(majority_class, static_cast<int>(j));
    for (int c = 0; c < data.n_classes(); ++c)
        if (c != majority_class)
            result.mapping.emplace_back(c, new_id_of_old[static_cast<std::size_t>(c)]);

    result.data = data;
    result.data.class_names.clear();
    for (std::size_t i = 0; i < data.n(); ++i)
        if (data.labels[i] != majority_class)
            result.data.labels[i] = new_id_of_old[static_cast<std::size_t>(data.labels[i])];
    for (std::size_t i = 0; i < maj_idx.size(); ++i)
        result.data.labels[maj_idx[i]] = static_cast<int>(best_fit.assignments[i]);
    return result;
}

}  // namespace ctvae
