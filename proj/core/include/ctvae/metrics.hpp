#pragma once

#include <vector>

#include "ctvae/matrix.hpp"

namespace ctvae {

/// One-vs-rest confusion counts per class.
struct ConfusionCounts {
    struct PerClass {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    };
    std::vector<PerClass> per_class;
    std::size_t n = 0;
};

ConfusionCounts confusion_counts(const std::vector<int>& truth, const std::vector<int>& pred);

/// Fraction of exact matches (micro accuracy; reduces to the binary
/// TP+TN over all formula).
double accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

/// Per-class P/R/F with the zero-denominator convention (report 0), macro
/// averaged across classes.
Prf precision_recall_fscore(const std::vector<int>& truth, const std::vector<int>& pred);

/// Between/within-class variance of a representation.
struct SeparabilityReport {
    std::vector<double> between;  // B, component-wise
    std::vector<double> within;   // T, component-wise
    double d_bet = 0.0;
    double d_wit = 0.0;
};

SeparabilityReport separability(const Matrix& points, const std::vector<int>& labels);

}  // namespace ctvae
