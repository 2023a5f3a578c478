// model.cpp - model validation, basis layout, local operators
#include "thermostat/model.hpp"

#include "thermostat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace thermostat {

BlockKey BlockKey::normalized() const noexcept {
    if (i > j || (i == j && a > b)) return adjoint();
    return *this;
}

std::string to_string(const BlockKey& key) {
    return "(" + std::to_string(key.i) + std::to_string(key.j) + "," + std::to_string(key.a + 1) +
           std::to_string(key.b + 1) + ")";
}

const char* to_string(CouplingKind kind) noexcept {
    return kind == CouplingKind::canonical ? "canonical" : "microcanonical";
}

void ModelSpec::normalize() {
    for (auto& blk : blocks) blk.key = blk.key.normalized();
}

void ModelSpec::validate() const {
    if (system.levels.empty()) throw SpecificationError("system must have at least one level");
    for (std::size_t k = 0; k < system.levels.size(); ++k) {
        if (!std::isfinite(system.levels[k])) throw SpecificationError("system level energies must be finite");
        if (k > 0 && system.levels[k] < system.levels[k - 1]) {
            throw SpecificationError("system levels must be listed in non-decreasing order");
        }
    }
    if (bands.empty()) throw SpecificationError("environment must have at least one band");
    for (std::size_t a = 0; a < bands.size(); ++a) {
        const auto& band = bands[a];
        const std::string tag = "band " + std::to_string(a + 1);
        if (!std::isfinite(band.mean_energy)) throw SpecificationError(tag + ": mean energy must be finite");
        if (!(band.width > 0.0) || !std::isfinite(band.width)) {
            throw SpecificationError(tag + ": width must be positive");
        }
        if (band.level_count == 0) throw SpecificationError(tag + ": level count must be at least 1");
    }
    std::set<BlockKey> seen;
    for (const auto& blk : blocks) {
        const auto& k = blk.key;
        if (k.i >= system.dimension() || k.j >= system.dimension()) {
            throw SpecificationError("block " + to_string(k) + ": system level out of range");
        }
        if (k.a >= bands.size() || k.b >= bands.size()) {
            throw SpecificationError("block " + to_string(k) + ": band out of range");
        }
        if (!(blk.strength >= 0.0) || !std::isfinite(blk.strength)) {
            throw SpecificationError("block " + to_string(k) + ": strength must be finite and non-negative");
        }
        if (k != k.normalized()) {
            throw SpecificationError("block " + to_string(k) + " is not normalized (expected " +
                                     to_string(k.normalized()) + ")");
        }
        if (!seen.insert(k).second) throw SpecificationError("duplicate block " + to_string(k));
    }
}

std::size_t ModelSpec::environment_dimension() const noexcept {
    std::size_t n = 0;
    for (const auto& b : bands) n += b.level_count;
    return n;
}

std::size_t ModelSpec::total_dimension() const noexcept { return system.dimension() * environment_dimension(); }

const CouplingBlockSpec* ModelSpec::find_block(BlockKey key) const noexcept {
    const auto k = key.normalized();
    for (const auto& blk : blocks) {
        if (blk.key == k) return &blk;
    }
    return nullptr;
}

double ModelSpec::max_band_width() const noexcept {
    double w = 0.0;
    for (const auto& b : bands) w = std::max(w, b.width);
    return w;
}

BasisLayout::BasisLayout(const ModelSpec& spec) : system_dim_(spec.system.dimension()) {
    for (const auto& b : spec.bands) {
        offsets_.push_back(env_dim_);
        sizes_.push_back(b.level_count);
        env_dim_ += b.level_count;
    }
}

std::size_t BasisLayout::index(std::size_t level, std::size_t band, std::size_t slot) const {
    if (level >= system_dim_ || band >= sizes_.size() || slot >= sizes_[band]) {
        throw std::out_of_range("BasisLayout::index: coordinates out of range");
    }
    return level * env_dim_ + offsets_[band] + slot;
}

std::size_t BasisLayout::sector_start(std::size_t level, std::size_t band) const { return index(level, band, 0); }

BasisLayout::Coordinates BasisLayout::decode(std::size_t k) const {
    if (k >= total_dimension()) throw std::out_of_range("BasisLayout::decode: index out of range");
    const std::size_t level = k / env_dim_;
    const std::size_t e = k % env_dim_;
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), e);
    const auto band = static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
    return {level, band, e - offsets_[band]};
}

Eigen::VectorXd build_local_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    const BasisLayout layout(spec);
    Eigen::VectorXd h(static_cast<Eigen::Index>(layout.total_dimension()));
    for (std::size_t i = 0; i < layout.system_dimension(); ++i) {
        for (std::size_t a = 0; a < layout.band_count(); ++a) {
            const auto& band = spec.bands[a];
            for (std::size_t n = 0; n < band.level_count; ++n) {
                h(static_cast<Eigen::Index>(layout.index(i, a, n))) = spec.system.levels[i] + band.level_energy(n);
            }
        }
    }
    return h;
}

SparseOperator composite_projector(const BasisLayout& layout, std::size_t i, std::size_t j, std::size_t a) {
    if (i >= layout.system_dimension() || j >= layout.system_dimension() || a >= layout.band_count()) {
        throw std::out_of_range("composite_projector: index out of range");
    }
    const auto n = static_cast<Eigen::Index>(layout.total_dimension());
    SparseOperator p(n, n);
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    entries.reserve(layout.band_size(a));
    for (std::size_t s = 0; s < layout.band_size(a); ++s) {
        entries.emplace_back(static_cast<Eigen::Index>(layout.index(i, a, s)),
                             static_cast<Eigen::Index>(layout.index(j, a, s)), 1.0);
    }
    p.setFromTriplets(entries.begin(), entries.end());
    return p;
}

SparseOperator band_projector(const BasisLayout& layout, std::size_t a) {
    if (a >= layout.band_count()) throw std::out_of_range("band_projector: band out of range");
    const auto n = static_cast<Eigen::Index>(layout.environment_dimension());
    SparseOperator p(n, n);
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    for (std::size_t s = 0; s < layout.band_size(a); ++s) {
        const auto k = static_cast<Eigen::Index>(layout.band_offset(a) + s);
        entries.emplace_back(k, k, 1.0);
    }
    p.setFromTriplets(entries.begin(), entries.end());
    return p;
}

std::vector<BlockClassification> classify_blocks(const ModelSpec& spec, std::optional<double> tolerance) {
    if (tolerance && !(*tolerance >= 0.0)) throw SpecificationError("resonance tolerance must be non-negative");
    std::vector<BlockClassification> out;
    out.reserve(spec.blocks.size());
    for (const auto& blk : spec.blocks) {
        const auto& k = blk.key;
        const double detuning = spec.system.levels[k.i] + spec.bands[k.a].mean_energy - spec.system.levels[k.j] -
                                spec.bands[k.b].mean_energy;
        const double tol = tolerance.value_or(std::max(spec.bands[k.a].width, spec.bands[k.b].width));
        out.push_back({blk, detuning, std::abs(detuning) <= tol, blk.kind()});
    }
    return out;
}

} // namespace thermostat
