#include "difrec/rng.hpp"

#include <cmath>

namespace difrec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t fnv1a_bytes(const void* data, std::size_t len, std::uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix64_finalize(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::uniform_u64(std::uint64_t n) {
    if (n == 0) throw DegenerateInputError("uniform_u64(0)");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        const std::uint64_t r = engine_();
        if (r >= threshold) return r % n;
    }
}

double Rng::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a_bytes(&master, sizeof(master), h);
    h = fnv1a_bytes(stage.data(), stage.size(), h);
    return splitmix64_finalize(h);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a_bytes(&master, sizeof(master), h);
    h = fnv1a_bytes(stage.data(), stage.size(), h);
    h = fnv1a_bytes(&index, sizeof(index), h);
    return splitmix64_finalize(h);
}

}  // namespace difrec
