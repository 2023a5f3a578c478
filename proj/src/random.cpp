// random.cpp - SplitMix64 seed chains and Box-Muller sampling
#include "thermostat/random.hpp"

#include <cmath>
#include <numbers>

namespace thermostat::rng {

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> labels) noexcept {
    std::uint64_t h = splitmix64(root);
    std::uint64_t k = 0;
    for (auto label : labels) {
        h = splitmix64(h ^ splitmix64(label + (++k)));
    }
    return h;
}

GaussianStream::GaussianStream(std::uint64_t seed) : engine_(seed) {}

double GaussianStream::uniform_open() {
    constexpr double scale = 1.0 / 9007199254740992.0; // 2^-53
    return static_cast<double>((engine_() >> 11) + 1) * scale;
}

double GaussianStream::standard_normal() {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    return r * std::cos(phi);
}

std::complex<double> GaussianStream::complex_normal(double variance) {
    const double s = std::sqrt(0.5 * variance);
    const double re = standard_normal();
    const double im = standard_normal();
    return {s * re, s * im};
}

} // namespace thermostat::rng
