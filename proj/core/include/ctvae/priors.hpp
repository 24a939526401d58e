#pragma once

#include <vector>

#include "ctvae/dataset.hpp"
#include "ctvae/matrix.hpp"

namespace ctvae {

/// Linear PCA projector fitted on training features.
struct PcaProjector {
    std::vector<double> mean_vector;  // d_input
    Matrix components;                // d_z x d_input, rows = top eigenvectors
    std::vector<double> eigenvalues;  // top d_z, descending

    std::size_t d_z() const { return components.rows(); }
    std::vector<double> project(const std::vector<double>& x) const;
    Matrix project_all(const Matrix& features) const;
};

/// Per-class target Gaussians in latent space: raw class means, per-component
/// standard deviations, dispersed means, and the global center.
struct ClassPriors {
    Matrix mu_raw;                 // |C| x d_z
    Matrix sigma;                  // |C| x d_z, component-wise std
    Matrix mu_hat;                 // |C| x d_z, dispersed target means
    std::vector<double> mu_bar;    // d_z, unweighted mean of class means
    double scale = 0.0;            // S

    int n_classes() const { return static_cast<int>(mu_hat.rows()); }
    std::size_t d_z() const { return mu_hat.cols(); }
};

struct ClassStats {
    Matrix mu;                   // |C| x d_z, per-class mean
    Matrix sigma;                // |C| x d_z, per-class population std
    std::vector<double> mu_bar;  // d_z
};

PcaProjector fit_pca(const Dataset& train, std::size_t d_z);

/// Per-class mean / population std (divide by n_c) and the unweighted center
/// of class means, over points already in latent coordinates.
ClassStats class_stats(const Matrix& projected, const std::vector<int>& labels);

/// Step 3 of the prior construction: push each class mean out along the ray
/// from the center through it, to radius (c+1)*S. Sigma components are floored
/// at 1e-6 so sampling stays well-defined for constant features.
ClassPriors transform_means(const ClassStats& stats, double scale);

/// Ablation variant: mu_hat^(c) = (S*c, ..., S*c); sigmas from `stats`.
ClassPriors fixed_means(const ClassStats& stats, double scale);

/// Full pipeline: PCA -> class stats -> mean transform (or fixed means).
ClassPriors fit_priors(const Dataset& train, std::size_t d_z, double scale,
                       bool fixed = false);

}  // namespace ctvae
