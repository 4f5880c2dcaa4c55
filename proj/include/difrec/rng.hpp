#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "difrec/array.hpp"

namespace difrec {

/// Deterministic random stream. The engine is std::mt19937_64 (bit-stable
/// across platforms by the standard); all distributions on top of it are
/// hand-pinned here rather than taken from <random>, whose distribution
/// implementations are free to differ between standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer on [0, n) by rejection.
    std::uint64_t uniform_u64(std::uint64_t n);

    int uniform_int(int n) { return static_cast<int>(uniform_u64(static_cast<std::uint64_t>(n))); }

    // Standard normal via Box-Muller (cosine branch only; no cached spare,
    // so one draw always consumes exactly two engine outputs).
    double normal();

    void fill_normal(NumericArray& a) {
        for (double& v : a.data) v = normal();
    }
    void fill_uniform(NumericArray& a, double lo, double hi) {
        for (double& v : a.data) v = uniform(lo, hi);
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_u64(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

// Stable seed derivation: FNV-1a over (master seed bytes, stage name
// [, item index bytes]) followed by a splitmix64 finalizer, so stages and
// per-item streams can rerun independently with identical results.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index);

}  // namespace difrec
