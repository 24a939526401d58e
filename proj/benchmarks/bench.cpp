#include <benchmark/benchmark.h>

#include "ctvae/dataset.hpp"
#include "ctvae/forest.hpp"
#include "ctvae/kmeans.hpp"
#include "ctvae/metrics.hpp"
#include "ctvae/models.hpp"
#include "ctvae/priors.hpp"

using namespace ctvae;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    return m;
}

std::pair<Dataset, Dataset> bench_blobs(std::size_t n_train, std::size_t d) {
    BlobSpec spec;
    spec.n_train = n_train;
    spec.n_test = n_train / 4;
    spec.d = d;
    spec.seed = 42;
    return make_blobs(spec);
}

void BM_matmul(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    Matrix a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_matmul)->Arg(32)->Arg(128);

void BM_ctvae_training_epoch(benchmark::State& state) {
    auto [train_raw, test_raw] = bench_blobs(1000, 10);
    Dataset train_ds = apply_normalizer(fit_normalizer(train_raw), train_raw);
    ArchSpec arch = ArchSpec::derive(train_ds.d_input(), 2);
    ClassPriors priors = fit_priors(train_ds, arch.d_z, 20.0);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 1;
    for (auto _ : state) {
        Model model = make_model(ModelKind::CTVAE, arch, 1, priors);
        benchmark::DoNotOptimize(train(model, train_ds, cfg));
    }
}
BENCHMARK(BM_ctvae_training_epoch)->Unit(benchmark::kMillisecond);

void BM_extract(benchmark::State& state) {
    auto [train_raw, test_raw] = bench_blobs(4000, 10);
    Dataset train_ds = apply_normalizer(fit_normalizer(train_raw), train_raw);
    ArchSpec arch = ArchSpec::derive(train_ds.d_input(), 2);
    ClassPriors priors = fit_priors(train_ds, arch.d_z, 20.0);
    Model model = make_model(ModelKind::CTVAE, arch, 1, priors);
    for (auto _ : state) benchmark::DoNotOptimize(extract(model, train_ds.features));
}
BENCHMARK(BM_extract)->Unit(benchmark::kMillisecond);

void BM_kmeans(benchmark::State& state) {
    auto [train_raw, test_raw] = bench_blobs(std::size_t(state.range(0)), 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(kmeans(train_raw.features, 4, 7));
}
BENCHMARK(BM_kmeans)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_forest_fit(benchmark::State& state) {
    auto [train_raw, test_raw] = bench_blobs(2000, 10);
    ForestConfig cfg;
    cfg.n_estimators = std::size_t(state.range(0));
    cfg.seed = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_forest(train_raw.features, train_raw.labels, cfg));
}
BENCHMARK(BM_forest_fit)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_separability(benchmark::State& state) {
    auto [train_raw, test_raw] = bench_blobs(4000, 10);
    for (auto _ : state)
        benchmark::DoNotOptimize(separability(train_raw.features, train_raw.labels));
}
BENCHMARK(BM_separability)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
