#pragma once

#include <cstdint>
#include <vector>

#include "ctvae/matrix.hpp"
#include "ctvae/rng.hpp"

namespace ctvae {

/// CART-style classification tree, greedy Gini splits.
struct DecisionTree {
    struct Node {
        int feature = -1;          // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::vector<double> proba;  // leaves only; sums to 1
    };
    std::vector<Node> nodes;
    int n_classes = 0;

    const std::vector<double>& leaf_proba(const double* x) const;
};

struct ForestConfig {
    std::size_t n_estimators = 100;
    std::size_t max_depth = 0;         // 0 = unlimited
    std::size_t min_samples_split = 2;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    int n_classes = 0;
};

/// Feature subset per split defaults to ceil(sqrt(d)) when
/// features_per_split == 0 is passed.
DecisionTree fit_tree(const Matrix& x, const std::vector<int>& y, std::size_t max_depth,
                      std::size_t min_samples_split, std::size_t features_per_split, Rng& rng);

RandomForest fit_forest(const Matrix& x, const std::vector<int>& y, const ForestConfig& cfg);

std::vector<int> predict(const RandomForest& model, const Matrix& x);
Matrix predict_proba(const RandomForest& model, const Matrix& x);

}  // namespace ctvae
