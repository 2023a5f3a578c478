// random.hpp - seed splitting and the Gaussian stream behind every sampler
//
// All random content in the library is produced by GaussianStream:
//   uniform 64-bit words from std::mt19937_64 -> (0, 1] doubles -> Box-Muller.
// Independent streams are keyed by derive_seed(root, labels...), a SplitMix64
// chain over the labels, so a stream depends only on *what* it samples
// (e.g. the block indices i, j, a, b) and never on iteration order.
#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>

namespace thermostat::rng {

// SplitMix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// h_0 = splitmix64(root); h_{k+1} = splitmix64(h_k ^ splitmix64(label_k + k + 1)).
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> labels) noexcept;

class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed);

    // Uniform on (0, 1], 53 bits of resolution.
    double uniform_open();
    double standard_normal();
    // Real and imaginary parts independent, each with variance `variance / 2`.
    std::complex<double> complex_normal(double variance = 1.0);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

} // namespace thermostat::rng
