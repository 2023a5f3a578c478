// generators.hpp - small random models and states for property tests
#pragma once

#include "thermostat/model.hpp"
#include "thermostat/observables.hpp"
#include "thermostat/random.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace gen {

struct Source {
    std::mt19937_64 engine;
    explicit Source(std::uint64_t seed) : engine(thermostat::rng::splitmix64(seed)) {}

    std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(engine); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    bool coin() { return pick(0, 1) == 1; }
};

// 1-3 levels, 1-3 bands of 1-6 states, random subset of blocks.
inline thermostat::ModelSpec small_model(Source& s, std::size_t max_band = 6) {
    thermostat::ModelSpec spec;
    const auto ns = s.pick(1, 3);
    double e = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        spec.system.levels.push_back(e);
        e += s.uniform(0.5, 30.0);
    }
    const auto nb = s.pick(1, 3);
    for (std::size_t a = 0; a < nb; ++a) {
        spec.bands.push_back({s.uniform(-10.0, 40.0), s.uniform(0.1, 2.0), s.pick(1, max_band), ""});
    }
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = i; j < ns; ++j)
            for (std::size_t a = 0; a < nb; ++a)
                for (std::size_t b = (i == j ? a : 0); b < nb; ++b)
                    if (s.coin()) spec.blocks.push_back({thermostat::BlockKey{i, j, a, b}, s.uniform(0.0, 0.05)});
    return spec;
}

// Two levels, bands with integer gaps so that canonical blocks are resonant.
inline thermostat::ModelSpec resonant_model(Source& s) {
    thermostat::ModelSpec spec;
    const double gap = 25.0;
    spec.system.levels = {0.0, gap};
    const auto nb = s.pick(2, 3);
    for (std::size_t a = 0; a < nb; ++a) {
        spec.bands.push_back({gap * static_cast<double>(a), 0.5, s.pick(5, 400), ""});
    }
    for (std::size_t a = 0; a + 1 < nb; ++a) {
        spec.blocks.push_back({thermostat::BlockKey{0, 1, a + 1, a}, s.uniform(1e-4, 1e-3)});
        if (s.coin()) spec.blocks.push_back({thermostat::BlockKey{0, 0, a, a}, s.uniform(0.0, 1e-3)});
    }
    return spec;
}

// Random valid HAM state: populations summing to 1, coherences within the
// Cauchy-Schwarz bound |P_ij,a|^2 <= P_ii,a P_jj,a.
inline thermostat::ObservableSet valid_observables(Source& s, std::size_t levels, std::size_t bands) {
    thermostat::ObservableSet p(levels, bands);
    double total = 0.0;
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t a = 0; a < bands; ++a) {
            const double w = s.uniform(0.0, 1.0);
            p(i, i, a) = w;
            total += w;
        }
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t a = 0; a < bands; ++a) p(i, i, a) = p(i, i, a).real() / total;
    for (std::size_t i = 0; i < levels; ++i)
        for (std::size_t j = i + 1; j < levels; ++j)
            for (std::size_t a = 0; a < bands; ++a) {
                const double bound = std::sqrt(p.population(i, a) * p.population(j, a));
                const auto c = std::polar(s.uniform(0.0, bound), s.uniform(0.0, 6.283185307179586));
                p(i, j, a) = c;
                p(j, i, a) = std::conj(c);
            }
    return p;
}

} // namespace gen
