#include "ctvae/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ctvae {

ConfusionCounts confusion_counts(const std::vector<int>& truth, const std::vector<int>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw std::invalid_argument("confusion_counts: length mismatch or empty");
    int k = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        k = std::max({k, truth[i] + 1, pred[i] + 1});

    ConfusionCounts cc;
    cc.n = truth.size();
    cc.per_class.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& pc = cc.per_class[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < truth.size(); ++i) {
            const bool is_c = truth[i] == c;
            const bool said_c = pred[i] == c;
            if (is_c && said_c) ++pc.tp;
            else if (!is_c && said_c) ++pc.fp;
            else if (is_c && !said_c) ++pc.fn;
            else ++pc.tn;
        }
    }
    return cc;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw std::invalid_argument("accuracy: length mismatch or empty");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (truth[i] == pred[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

Prf precision_recall_fscore(const std::vector<int>& truth, const std::vector<int>& pred) {
    const ConfusionCounts cc = confusion_counts(truth, pred);
    Prf macro;
    for (const auto& pc : cc.per_class) {
        const double p =
            pc.tp + pc.fp == 0 ? 0.0 : static_cast<double>(pc.tp) / double(pc.tp + pc.fp);
        const double r =
            pc.tp + pc.fn == 0 ? 0.0 : static_cast<double>(pc.tp) / double(pc.tp + pc.fn);
        const double f = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        macro.precision += p;
        macro.recall += r;
        macro.fscore += f;
    }
    const auto k = static_cast<double>(cc.per_class.size());
    macro.precision /= k;
    macro.recall /= k;
    macro.fscore /= k;
    return macro;
}

SeparabilityReport separability(const Matrix& points, const std::vector<int>& labels) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (labels.size() != n || n == 0)
        throw std::invalid_argument("separability: length mismatch or empty");
    int k = 0;
    for (int c : labels) k = std::max(k, c + 1);

    Matrix means(static_cast<std::size_t>(k), d);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(labels[i])];
        for (std::size_t j = 0; j < d; ++j)
            means(static_cast<std::size_t>(labels[i]), j) += points(i, j);
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c) {
        if (counts[c] == 0) throw std::invalid_argument("separability: empty class");
        for (std::size_t j = 0; j < d; ++j) means(c, j) /= static_cast<double>(counts[c]);
    }

    SeparabilityReport rep;
    rep.between.assign(d, 0.0);
    rep.within.assign(d, 0.0);

    // B: half the double sum over ordered class pairs of |mu_c - mu_c'|^2
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
        for (std::size_t c2 = 0; c2 < static_cast<std::size_t>(k); ++c2)
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = means(c, j) - means(c2, j);
                rep.between[j] += 0.5 * diff * diff;
            }

    // T: (1/n) sum over samples of |x - mu_class|^2
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = points(i, j) - means(c, j);
            rep.within[j] += diff * diff;
        }
    }
    for (std::size_t j = 0; j < d; ++j) rep.within[j] /= static_cast<double>(n);

    for (std::size_t j = 0; j < d; ++j) {
        rep.d_bet += rep.between[j];
        rep.d_wit += rep.within[j];
    }
    rep.d_bet /= static_cast<double>(d);
    rep.d_wit /= static_cast<double>(d);
    return rep;
}

}  // namespace ctvae
