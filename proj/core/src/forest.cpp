#include "ctvae/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ctvae {

namespace {

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double acc = 1.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc -= p * p;
    }
    return acc;
}

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    int n_classes;
    std::size_t max_depth;
    std::size_t min_samples_split;
    std::size_t features_per_split;
    Rng& rng;
    DecisionTree tree;

    BestSplit find_split(const std::vector<std::size_t>& idx,
                         const std::vector<int>& features) const {
        BestSplit best;
        std::vector<std::size_t> order;
        std::vector<std::size_t> left_counts(static_cast<std::size_t>(n_classes));
        std::vector<std::size_t> right_counts(static_cast<std::size_t>(n_classes));

        for (int f : features) {
            order = idx;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = x(a, static_cast<std::size_t>(f));
                const double vb = x(b, static_cast<std::size_t>(f));
                return va < vb;
            });
            std::fill(left_counts.begin(), left_counts.end(), 0);
            std::fill(right_counts.begin(), right_counts.end(), 0);
            for (std::size_t i : order) ++right_counts[static_cast<std::size_t>(y[i])];

            const std::size_t n = order.size();
            for (std::size_t pos = 0; pos + 1 < n; ++pos) {
                const auto cls = static_cast<std::size_t>(y[order[pos]]);
                ++left_counts[cls];
                --right_counts[cls];
                const double v = x(order[pos], static_cast<std::size_t>(f));
                const double v_next = x(order[pos + 1], static_cast<std::size_t>(f));
                if (v == v_next) continue;  // midpoints of consecutive unique values only
                const std::size_t n_left = pos + 1;
                const std::size_t n_right = n - n_left;
                const double score =
                    (static_cast<double>(n_left) * gini(left_counts, n_left) +
                     static_cast<double>(n_right) * gini(right_counts, n_right)) /
                    static_cast<double>(n);
                // strict < keeps the lowest feature index / lowest threshold on ties
                if (score < best.score) {
                    best.score = score;
                    best.feature = f;
                    best.threshold = 0.5 * (v + v_next);
                }
            }
        }
        return best;
    }

    int build(std::vector<std::size_t> idx, std::size_t depth) {
        std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
        for (std::size_t i : idx) ++counts[static_cast<std::size_t>(y[i])];

        const bool pure = std::count_if(counts.begin(), counts.end(),
                                        [](std::size_t c) { return c > 0; }) <= 1;
        const bool depth_stop = max_depth != 0 && depth >= max_depth;
        BestSplit best;
        if (!pure && !depth_stop && idx.size() >= min_samples_split) {
            const std::size_t d = x.cols();
            std::vector<int> feats(d);
            std::iota(feats.begin(), feats.end(), 0);
            if (features_per_split < d) {
                // partial Fisher-Yates, then ascending for deterministic ties
                for (std::size_t i = 0; i < features_per_split; ++i)
                    std::swap(feats[i], feats[i + rng.index(d - i)]);
                feats.resize(features_per_split);
                std::sort(feats.begin(), feats.end());
            }
            best = find_split(idx, feats);
            if (best.feature < 0 && feats.size() < d) {
                // sampled features all constant here; widen to the full set
                feats.resize(d);
                std::iota(feats.begin(), feats.end(), 0);
                best = find_split(idx, feats);
            }
        }

        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (best.feature < 0) {
            auto& node = tree.nodes.back();
            node.proba.assign(static_cast<std::size_t>(n_classes), 0.0);
            for (std::size_t c = 0; c < counts.size(); ++c)
                node.proba[c] = static_cast<double>(counts[c]) / static_cast<double>(idx.size());
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (x(i, static_cast<std::size_t>(best.feature)) <= best.threshold ? left_idx
                                                                            : right_idx)
                .push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        const int left = build(std::move(left_idx), depth + 1);
        const int right = build(std::move(right_idx), depth + 1);
        auto& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left;
        node.right = right;
        return node_id;
    }
};

}  // namespace

const std::vector<double>& DecisionTree::leaf_proba(const double* x) const {
    int cur = 0;
    while (nodes[static_cast<std::size_t>(cur)].feature >= 0) {
        const Node& n = nodes[static_cast<std::size_t>(cur)];
        cur = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(cur)].proba;
}

DecisionTree fit_tree(const Matrix& x, const std::vector<int>& y, std::size_t max_depth,
                      std::size_t min_samples_split, std::size_t features_per_split, Rng& rng) {
    if (x.rows() == 0) throw std::invalid_argument("fit_tree: empty input");
    if (y.size() != x.rows()) throw std::invalid_argument("fit_tree: labels length mismatch");
    int k = 0;
    for (int c : y) {
        if (c < 0) throw std::invalid_argument("fit_tree: negative label");
        k = std::max(k, c + 1);
    }
    if (features_per_split == 0)
        features_per_split =
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));
    features_per_split = std::min(features_per_split, x.cols());

    TreeBuilder builder{x, y, k, max_depth, std::max<std::size_t>(2, min_samples_split),
                        features_per_split, rng, {}};
    builder.tree.n_classes = k;
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    builder.build(std::move(idx), 0);
    return std::move(builder.tree);
}

RandomForest fit_forest(const Matrix& x, const std::vector<int>& y, const ForestConfig& cfg) {
    if (cfg.n_estimators < 1) throw std::invalid_argument("fit_forest: need >= 1 tree");
    if (y.size() != x.rows()) throw std::invalid_argument("fit_forest: labels length mismatch");

    RandomForest forest;
    Rng master(cfg.seed);
    for (std::size_t t = 0; t < cfg.n_estimators; ++t) {
        Rng tree_rng = master.fork();
        if (cfg.bootstrap) {
            std::vector<std::size_t> sample(x.rows());
            for (std::size_t& s : sample) s = tree_rng.index(x.rows());
            Matrix bx(x.rows(), x.cols());
            std::vector<int> by(x.rows());
            for (std::size_t i = 0; i < sample.size(); ++i) {
                bx.set_row(i, x.row(sample[i]));
                by[i] = y[sample[i]];
            }
            forest.trees.push_back(
                fit_tree(bx, by, cfg.max_depth, cfg.min_samples_split, 0, tree_rng));
        } else {
            forest.trees.push_back(
                fit_tree(x, y, cfg.max_depth, cfg.min_samples_split, 0, tree_rng));
        }
        forest.n_classes = std::max(forest.n_classes, forest.trees.back().n_classes);
    }
    return forest;
}

Matrix predict_proba(const RandomForest& model, const Matrix& x) {
    const auto k = static_cast<std::size_t>(model.n_classes);
    Matrix proba(x.rows(), k);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double* out = proba.row_ptr(r);
        for (const DecisionTree& tree : model.trees) {
            const std::vector<double>& p = tree.leaf_proba(x.row_ptr(r));
            for (std::size_t c = 0; c < p.size(); ++c) out[c] += p[c];
        }
        for (std::size_t c = 0; c < k; ++c) out[c] /= static_cast<double>(model.trees.size());
    }
    return proba;
}

std::vector<int> predict(const RandomForest& model, const Matrix& x) {
    Matrix proba = predict_proba(model, x);
    std::vector<int> labels(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double* p = proba.row_ptr(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < proba.cols(); ++c)
            if (p[c] > p[best]) best = c;  // ties keep the lowest id
        labels[r] = static_cast<int>(best);
    }
    return labels;
}

}  // namespace ctvae
