#include "ctvae/priors.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "ctvae/eigen.hpp"

namespace ctvae {

namespace {
constexpr double kSigmaFloor = 1e-6;
}

std::vector<double> PcaProjector::project(const std::vector<double>& x) const {
    if (x.size() != mean_vector.size())
        throw std::invalid_argument("PcaProjector::project: dimension mismatch");
    std::vector<double> centered(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) centered[i] = x[i] - mean_vector[i];
    return matvec(components, centered);
}

Matrix PcaProjector::project_all(const Matrix& features) const {
    Matrix out(features.rows(), d_z());
    for (std::size_t r = 0; r < features.rows(); ++r)
        out.set_row(r, project(features.row(r)));
    return out;
}

PcaProjector fit_pca(const Dataset& train, std::size_t d_z) {
    const std::size_t n = train.n();
    const std::size_t d = train.d_input();
    if (d_z > d) throw std::invalid_argument("fit_pca: d_z > d_input");
    if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 samples");

    std::vector<double> mean(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) mean[c] += train.features(r, c);
    for (double& m : mean) m /= static_cast<double>(n);

    // sample covariance of centered features (1/(n-1))
    Matrix cov(d, d);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> x = train.features.row(r);
        for (std::size_t c = 0; c < d; ++c) x[c] -= mean[c];
        for (std::size_t i = 0; i < d; ++i) {
            if (x[i] == 0.0) continue;
            for (std::size_t j = i; j < d; ++j) cov(i, j) += x[i] * x[j];
        }
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            cov(i, j) /= static_cast<double>(n - 1);
            cov(j, i) = cov(i, j);
        }

    EigenDecomposition eig = sym_eigen(cov);
    PcaProjector pca;
    pca.mean_vector = std::move(mean);
    pca.components = Matrix(d_z, d);
    pca.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<long>(d_z));
    for (std::size_t k = 0; k < d_z; ++k)
        for (std::size_t i = 0; i < d; ++i) pca.components(k, i) = eig.vectors(i, k);
    return pca;
}

ClassStats class_stats(const Matrix& projected, const std::vector<int>& labels) {
    if (projected.rows() != labels.size())
        throw std::invalid_argument("class_stats: labels length mismatch");
    int k = 0;
    for (int c : labels) k = std::max(k, c + 1);
    const std::size_t d = projected.cols();

    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int c : labels) ++counts[static_cast<std::size_t>(c)];
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0)
            throw std::invalid_argument("class_stats: empty class " + std::to_string(c));

    ClassStats stats;
    stats.mu = Matrix(static_cast<std::size_t>(k), d);
    stats.sigma = Matrix(static_cast<std::size_t>(k), d);
    stats.mu_bar.assign(d, 0.0);

    for (std::size_t r = 0; r < projected.rows(); ++r) {
        const auto c = static_cast<std::size_t>(labels[r]);
        for (std::size_t j = 0; j < d; ++j) stats.mu(c, j) += projected(r, j);
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
        for (std::size_t j = 0; j < d; ++j) stats.mu(c, j) /= static_cast<double>(counts[c]);

    // population variance: divide by n_c
    for (std::size_t r = 0; r < projected.rows(); ++r) {
        const auto c = static_cast<std::size_t>(labels[r]);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = projected(r, j) - stats.mu(c, j);
            stats.sigma(c, j) += dev * dev;
        }
    }
    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
        for (std::size_t j = 0; j < d; ++j)
            stats.sigma(c, j) = std::sqrt(stats.sigma(c, j) / static_cast<double>(counts[c]));

    for (std::size_t c = 0; c < static_cast<std::size_t>(k); ++c)
        for (std::size_t j = 0; j < d; ++j) stats.mu_bar[j] += stats.mu(c, j);
    for (double& m : stats.mu_bar) m /= static_cast<double>(k);
    return stats;
}

namespace {

ClassPriors priors_from(const ClassStats& stats, double scale) {
    ClassPriors p;
    p.mu_raw = stats.mu;
    p.sigma = stats.sigma;
    for (double& s : p.sigma.data()) s = std::max(s, kSigmaFloor);
    p.mu_bar = stats.mu_bar;
    p.scale = scale;
    p.mu_hat = Matrix(stats.mu.rows(), stats.mu.cols());
    return p;
}

}  // namespace

ClassPriors transform_means(const ClassStats& stats, double scale) {
    ClassPriors p = priors_from(stats, scale);
    const std::size_t d = p.d_z();
    for (std::size_t c = 0; c < stats.mu.rows(); ++c) {
        std::vector<double> dir(d);
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            dir[j] = stats.mu(c, j) - stats.mu_bar[j];
            norm += dir[j] * dir[j];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            std::cerr << "transform_means: class " << c
                      << " mean coincides with the center; using unit basis direction\n";
            dir.assign(d, 0.0);
            dir[c % d] = 1.0;
            norm = 1.0;
        }
        const double radius = static_cast<double>(c + 1) * scale;
        for (std::size_t j = 0; j < d; ++j)
            p.mu_hat(c, j) = stats.mu_bar[j] + radius * dir[j] / norm;
    }
    return p;
}

ClassPriors fixed_means(const ClassStats& stats, double scale) {
    ClassPriors p = priors_from(stats, scale);
    for (std::size_t c = 0; c < p.mu_hat.rows(); ++c)
        for (std::size_t j = 0; j < p.d_z(); ++j)
            p.mu_hat(c, j) = scale * static_cast<double>(c);
    return p;
}

ClassPriors fit_priors(const Dataset& train, std::size_t d_z, double scale, bool fixed) {
    PcaProjector pca = fit_pca(train, d_z);
    Matrix projected = pca.project_all(train.features);
    ClassStats stats = class_stats(projected, train.labels);
    return fixed ? fixed_means(stats, scale) : transform_means(stats, scale);
}

}  // namespace ctvae
