#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctvae/matrix.hpp"
#include "ctvae/rng.hpp"

namespace ctvae {

/// Labeled feature matrix. Labels are contiguous class ids 0..n_classes-1;
/// class_names keeps the original label strings in id order.
struct Dataset {
    Matrix features;              // n x d_input
    std::vector<int> labels;      // length n
    std::vector<std::string> class_names;

    std::size_t n() const { return features.rows(); }
    std::size_t d_input() const { return features.cols(); }
    int n_classes() const;
    std::vector<std::size_t> class_counts() const;
    std::vector<std::vector<std::size_t>> indices_by_class() const;

    void validate() const;  // throws on broken invariants
};

/// Per-feature min/max computed on the training split only.
struct NormStats {
    std::vector<double> min;
    std::vector<double> max;
};

/// Synthetic Gaussian-blob dataset description.
struct BlobSpec {
    int n_classes = 3;
    std::size_t n_train = 3500;
    std::size_t n_test = 1500;
    std::size_t d = 10;
    double std_dev = 0.2;
    double center_low = 0.0;
    double center_high = 1.0;
    std::uint64_t seed = 0;
};

/// Parse a CSV of numeric features plus one label column. Labels are remapped
/// to contiguous ids (string labels sorted lexicographically). `label_column`
/// may be a zero-based index or a header name when has_header is true.
Dataset load_csv(const std::string& path, const std::string& label_column, bool has_header);

/// Write a dataset back out in the same CSV shape (features then label).
void save_csv(const Dataset& data, const std::string& path, bool write_header = true);

NormStats fit_normalizer(const Dataset& train);
/// Min-max scale to [0,1] per feature; constant features map to 0. Values
/// outside the training range are preserved (no clipping).
Dataset apply_normalizer(const NormStats& stats, const Dataset& data);

/// Deterministic train/test split; per-class stratified when requested.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed, bool stratified);

/// Gaussian blobs: class centers uniform in the center box, samples
/// N(center, std^2 I), near-equal class allocation.
std::pair<Dataset, Dataset> make_blobs(const BlobSpec& spec);

Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx);

}  // namespace ctvae
