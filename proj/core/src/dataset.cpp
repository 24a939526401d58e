#include "ctvae/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ctvae {

int Dataset::n_classes() const {
    int maxc = -1;
    for (int c : labels) maxc = std::max(maxc, c);
    return maxc + 1;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes()), 0);
    for (int c : labels) ++counts[static_cast<std::size_t>(c)];
    return counts;
}

std::vector<std::vector<std::size_t>> Dataset::indices_by_class() const {
    std::vector<std::vector<std::size_t>> idx(static_cast<std::size_t>(n_classes()));
    for (std::size_t i = 0; i < labels.size(); ++i)
        idx[static_cast<std::size_t>(labels[i])].push_back(i);
    return idx;
}

void Dataset::validate() const {
    if (labels.size() != n()) throw std::invalid_argument("Dataset: labels length != n");
    const int k = n_classes();
    for (int c : labels)
        if (c < 0 || c >= k) throw std::invalid_argument("Dataset: label out of range");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e && b != e;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column, bool has_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    std::vector<std::string> header;
    std::size_t row_no = 0;

    if (has_header) {
        if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file " + path);
        header = split_line(line);
        ++row_no;
    }

    std::size_t label_idx = std::string::npos;
    {
        // numeric index always accepted; header name when a header exists
        std::size_t idx;
        bool numeric = false;
        try {
            std::size_t pos = 0;
            idx = std::stoul(label_column, &pos);
            numeric = pos == label_column.size();
        } catch (...) {
            numeric = false;
        }
        if (numeric) {
            label_idx = idx;
        } else if (has_header) {
            auto it = std::find(header.begin(), header.end(), label_column);
            if (it == header.end())
                throw std::runtime_error("load_csv: label column '" + label_column +
                                         "' not in header");
            label_idx = static_cast<std::size_t>(it - header.begin());
        } else {
            throw std::runtime_error("load_csv: label column '" + label_column +
                                     "' needs a header or numeric index");
        }
    }

    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t arity = header.empty() ? 0 : header.size();

    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (arity == 0) arity = cells.size();
        if (cells.size() != arity)
            throw std::runtime_error("load_csv: ragged row at line " + std::to_string(row_no));
        if (label_idx >= cells.size())
            throw std::runtime_error("load_csv: label column out of range at line " +
                                     std::to_string(row_no));
        std::vector<double> feats;
        feats.reserve(cells.size() - 1);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == label_idx) continue;
            double v;
            if (!parse_double(cells[c], v))
                throw std::runtime_error("load_csv: non-numeric feature '" + cells[c] +
                                         "' at line " + std::to_string(row_no));
            feats.push_back(v);
        }
        rows.push_back(std::move(feats));
        raw_labels.push_back(cells[label_idx]);
    }
    if (rows.empty()) throw std::runtime_error("load_csv: no data rows in " + path);

    // Map labels to contiguous ids. Integer label sets sort numerically,
    // anything else lexicographically.
    std::vector<std::string> uniq = raw_labels;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    bool all_int = true;
    std::vector<long long> as_int(uniq.size());
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        try {
            std::size_t pos = 0;
            as_int[i] = std::stoll(uniq[i], &pos);
            if (pos != uniq[i].size()) all_int = false;
        } catch (...) {
            all_int = false;
        }
    }
    if (all_int) {
        std::vector<std::size_t> order(uniq.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return as_int[a] < as_int[b]; });
        std::vector<std::string> sorted;
        for (std::size_t o : order) sorted.push_back(uniq[o]);
        uniq = std::move(sorted);
    }
    std::map<std::string, int> id_of;
    for (std::size_t i = 0; i < uniq.size(); ++i) id_of[uniq[i]] = static_cast<int>(i);

    Dataset out;
    out.features = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.features.set_row(r, rows[r]);
    out.labels.reserve(raw_labels.size());
    for (const std::string& s : raw_labels) out.labels.push_back(id_of[s]);
    out.class_names = uniq;
    out.validate();
    return out;
}

void save_csv(const Dataset& data, const std::string& path, bool write_header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_csv: cannot open " + path);
    out.precision(17);
    if (write_header) {
        for (std::size_t c = 0; c < data.d_input(); ++c) out << "f" << c << ",";
        out << "label\n";
    }
    for (std::size_t r = 0; r < data.n(); ++r) {
        for (std::size_t c = 0; c < data.d_input(); ++c) out << data.features(r, c) << ",";
        out << data.labels[r] << "\n";
    }
}

NormStats fit_normalizer(const Dataset& train) {
    if (train.n() == 0) throw std::invalid_argument("fit_normalizer: empty dataset");
    const std::size_t d = train.d_input();
    NormStats stats;
    stats.min.assign(d, 0.0);
    stats.max.assign(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double lo = train.features(0, c);
        double hi = lo;
        for (std::size_t r = 1; r < train.n(); ++r) {
            lo = std::min(lo, train.features(r, c));
            hi = std::max(hi, train.features(r, c));
        }
        stats.min[c] = lo;
        stats.max[c] = hi;
    }
    return stats;
}

Dataset apply_normalizer(const NormStats& stats, const Dataset& data) {
    if (stats.min.size() != data.d_input())
        throw std::invalid_argument("apply_normalizer: dimension mismatch");
    Dataset out = data;
    for (std::size_t c = 0; c < data.d_input(); ++c) {
        const double range = stats.max[c] - stats.min[c];
        for (std::size_t r = 0; r < data.n(); ++r) {
            const double x = data.features(r, c);
            out.features(r, c) = range == 0.0 ? 0.0 : (x - stats.min[c]) / range;
        }
    }
    return out;
}

Dataset subset(const Dataset& data, const std::vector<std::size_t>& idx) {
    Dataset out;
    out.features = Matrix(idx.size(), data.d_input());
    out.labels.reserve(idx.size());
    out.class_names = data.class_names;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        out.features.set_row(r, data.features.row(idx[r]));
        out.labels.push_back(data.labels[idx[r]]);
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed, bool stratified) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("split: fraction must be in (0,1)");
    Rng rng(seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    if (stratified) {
        for (const auto& cls : data.indices_by_class()) {
            if (cls.size() < 2)
                throw std::invalid_argument("split: class with < 2 samples under stratification");
            std::vector<std::size_t> idx = cls;
            std::shuffle(idx.begin(), idx.end(), rng.engine());
            const std::size_t n_train =
                static_cast<std::size_t>(std::llround(train_fraction * double(idx.size())));
            for (std::size_t i = 0; i < idx.size(); ++i)
                (i < n_train ? train_idx : test_idx).push_back(idx[i]);
        }
    } else {
        std::vector<std::size_t> idx(data.n());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng.engine());
        const std::size_t n_train =
            static_cast<std::size_t>(std::llround(train_fraction * double(idx.size())));
        for (std::size_t i = 0; i < idx.size(); ++i)
            (i < n_train ? train_idx : test_idx).push_back(idx[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {subset(data, train_idx), subset(data, test_idx)};
}

namespace {

// round-robin remainder over classes
std::vector<std::size_t> allocate(std::size_t total, int k) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), total / std::size_t(k));
    for (std::size_t i = 0; i < total % std::size_t(k); ++i) ++counts[i];
    return counts;
}

}  // namespace

std::pair<Dataset, Dataset> make_blobs(const BlobSpec& spec) {
    if (spec.n_classes < 2) throw std::invalid_argument("make_blobs: need >= 2 classes");
    if (spec.std_dev <= 0.0) throw std::invalid_argument("make_blobs: std must be > 0");
    if (spec.center_low >= spec.center_high)
        throw std::invalid_argument("make_blobs: empty center box");

    Rng rng(spec.seed);
    Matrix centers(static_cast<std::size_t>(spec.n_classes), spec.d);
    for (double& x : centers.data()) x = rng.uniform(spec.center_low, spec.center_high);

    auto gen = [&](const std::vector<std::size_t>& counts) {
        std::size_t total = 0;
        for (std::size_t c : counts) total += c;
        Dataset out;
        out.features = Matrix(total, spec.d);
        out.labels.reserve(total);
        std::size_t r = 0;
        for (int c = 0; c < spec.n_classes; ++c) {
            for (std::size_t i = 0; i < counts[static_cast<std::size_t>(c)]; ++i, ++r) {
                for (std::size_t f = 0; f < spec.d; ++f)
                    out.features(r, f) =
                        centers(static_cast<std::size_t>(c), f) + spec.std_dev * rng.gaussian();
                out.labels.push_back(c);
            }
        }
        return out;
    };

    Dataset train = gen(allocate(spec.n_train, spec.n_classes));
    Dataset test = gen(allocate(spec.n_test, spec.n_classes));
    return {std::move(train), std::move(test)};
}

}  // namespace ctvae
