#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "ctvae/dataset.hpp"

using namespace ctvae;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        static int counter = 0;
        path = (std::filesystem::temp_directory_path() /
                ("ctvae_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++) + ".csv"))
                   .string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_csv basics") {
    TempFile f("a,b,label\n1,2,benign\n3,4,attack\n5,6,benign\n");
    Dataset d = load_csv(f.path, "label", true);
    CHECK(d.n() == 3);
    CHECK(d.d_input() == 2);
    CHECK(d.n_classes() == 2);
    auto counts = d.class_counts();
    // lexicographic: attack=0, benign=1
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 2);
    CHECK(d.class_names[0] == "attack");
    CHECK(d.labels == std::vector<int>{1, 0, 1});
}

TEST_CASE("load_csv errors") {
    TempFile empty("");
    CHECK_THROWS(load_csv(empty.path, "label", true));

    TempFile ragged("a,b,label\n1,2,x\n1,x\n");
    CHECK_THROWS_WITH_AS(load_csv(ragged.path, "label", true),
                         doctest::Contains("line 3"), std::runtime_error);

    TempFile nonnum("a,b,label\n1,huh,x\n");
    CHECK_THROWS_AS(load_csv(nonnum.path, "label", true), std::runtime_error);
}

TEST_CASE("load_csv 115-feature row") {
    std::string row;
    for (int i = 0; i < 115; ++i) row += std::to_string(i) + ",";
    TempFile f(row + "0\n" + row + "1\n");
    Dataset d = load_csv(f.path, "115", false);
    CHECK(d.d_input() == 115);
    CHECK(d.n_classes() == 2);
}

TEST_CASE("csv round trip preserves values") {
    TempFile f("a,b,label\n1.5,-2.25,0\n0.125,7,1\n");
    Dataset d = load_csv(f.path, "label", true);
    TempFile out("");
    save_csv(d, out.path);
    Dataset d2 = load_csv(out.path, "label", true);
    CHECK(d2.features.data() == d.features.data());
    CHECK(d2.labels == d.labels);
}

TEST_CASE("min-max normalizer") {
    Dataset d;
    d.features = Matrix(3, 2);
    d.features(0, 0) = 0;  d.features(0, 1) = 7;
    d.features(1, 0) = 5;  d.features(1, 1) = 7;
    d.features(2, 0) = 10; d.features(2, 1) = 7;
    d.labels = {0, 0, 1};

    NormStats stats = fit_normalizer(d);
    Dataset scaled = apply_normalizer(stats, d);
    CHECK(scaled.features(0, 0) == 0.0);
    CHECK(scaled.features(1, 0) == 0.5);
    CHECK(scaled.features(2, 0) == 1.0);
    // constant column maps to 0
    for (std::size_t r = 0; r < 3; ++r) CHECK(scaled.features(r, 1) == 0.0);

    // out-of-range test values are preserved, not clipped
    Dataset test;
    test.features = Matrix(1, 2);
    test.features(0, 0) = 20.0;
    test.labels = {0};
    Dataset ts = apply_normalizer(stats, test);
    CHECK(ts.features(0, 0) == 2.0);
}

TEST_CASE("normalizer maps train to [0,1] per non-constant feature") {
    BlobSpec spec;
    spec.seed = 3;
    auto [train, test] = make_blobs(spec);
    NormStats stats = fit_normalizer(train);
    Dataset scaled = apply_normalizer(stats, train);
    for (std::size_t c = 0; c < scaled.d_input(); ++c) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t r = 0; r < scaled.n(); ++r) {
            lo = std::min(lo, scaled.features(r, c));
            hi = std::max(hi, scaled.features(r, c));
        }
        CHECK(lo == doctest::Approx(0.0));
        CHECK(hi == doctest::Approx(1.0));
    }
}

TEST_CASE("split sizes, stratification, determinism, partition") {
    BlobSpec spec;
    spec.n_classes = 2;
    spec.n_train = 100;
    spec.n_test = 10;
    spec.seed = 1;
    auto [data, unused] = make_blobs(spec);

    auto [train, test] = split(data, 0.7, 9, false);
    CHECK(train.n() == 70);
    CHECK(test.n() == 30);

    auto [strain, stest] = split(data, 0.7, 9, true);
    auto tc = strain.class_counts();
    CHECK(std::abs(int(tc[0]) - int(tc[1])) <= 1);

    auto [t2, s2] = split(data, 0.7, 9, true);
    CHECK(t2.features.data() == strain.features.data());
    CHECK(s2.labels == stest.labels);

    // partition: counts add up and nothing is lost
    CHECK(strain.n() + stest.n() == data.n());

    CHECK_THROWS_AS(split(data, 1.5, 0, false), std::invalid_argument);
}

TEST_CASE("split rejects tiny classes under stratification") {
    Dataset d;
    d.features = Matrix(3, 1);
    d.labels = {0, 0, 1};
    CHECK_THROWS_AS(split(d, 0.5, 0, true), std::invalid_argument);
}

TEST_CASE("make_blobs shapes, determinism, degenerate spread") {
    BlobSpec spec;  // paper simulation defaults
    spec.seed = 123;
    auto [train, test] = make_blobs(spec);
    CHECK(train.n() == 3500);
    CHECK(test.n() == 1500);
    CHECK(train.d_input() == 10);
    CHECK(train.n_classes() == 3);

    auto [t2, s2] = make_blobs(spec);
    CHECK(t2.features.data() == train.features.data());
    CHECK(s2.features.data() == test.features.data());

    BlobSpec tight = spec;
    tight.std_dev = 1e-6;
    tight.n_train = 300;
    tight.n_test = 30;
    auto [tt, unused] = make_blobs(tight);
    // nearest-centroid classifies the train set perfectly
    Matrix centroids(3, tight.d);
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < tt.n(); ++i) {
        ++counts[std::size_t(tt.labels[i])];
        for (std::size_t f = 0; f < tight.d; ++f)
            centroids(std::size_t(tt.labels[i]), f) += tt.features(i, f);
    }
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t f = 0; f < tight.d; ++f) centroids(c, f) /= double(counts[c]);
    for (std::size_t i = 0; i < tt.n(); ++i) {
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (std::size_t f = 0; f < tight.d; ++f) {
                const double diff = tt.features(i, f) - centroids(c, f);
                acc += diff * diff;
            }
            if (acc < best_d) { best_d = acc; best = c; }
        }
        CHECK(int(best) == tt.labels[i]);
    }
}
