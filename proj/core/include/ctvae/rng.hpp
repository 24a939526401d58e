#pragma once

#include <cstdint>
#include <random>

namespace ctvae {

/// Seeded random source. All stochastic code in the toolkit draws from one of
/// these so that a run is fully determined by its seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }

    double gaussian() { return normal_(gen_); }

    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_);
    }

    /// Derive an independent child stream (for per-tree / per-stage seeding).
    Rng fork() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ULL); }

    std::uint64_t next_raw() { return gen_(); }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ctvae
