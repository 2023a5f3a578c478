// model.hpp - declarative model specification, composite basis layout and local operators
//
// Conventions: hbar = 1, energies in an arbitrary unit u, times in hbar/u.
// System levels and bands are 0-based in code; model files and CSV column
// names number bands from 1.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace thermostat {

struct SystemSpec {
    std::vector<double> levels; // E_i, non-decreasing

    std::size_t dimension() const noexcept { return levels.size(); }
};

struct BandSpec {
    double mean_energy = 0.0; // E_a
    double width = 0.0;       // delta epsilon
    std::size_t level_count = 0;
    std::string name;

    // Slot n = 0 .. N_a-1 holds E_a + width * (n + 1) / N_a.
    double level_energy(std::size_t slot) const noexcept {
        return mean_energy + width * static_cast<double>(slot + 1) / static_cast<double>(level_count);
    }
};

// Identifies C_{ij,ab} = Pi_a C_ij Pi_b, which maps (j, b) onto (i, a).
struct BlockKey {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t a = 0;
    std::size_t b = 0;

    BlockKey adjoint() const noexcept { return {j, i, b, a}; }
    // Representative of the {block, adjoint} pair: i < j, or i == j and a <= b.
    BlockKey normalized() const noexcept;
    bool is_self_adjoint() const noexcept { return i == j && a == b; }

    auto operator<=>(const BlockKey&) const = default;
};

std::string to_string(const BlockKey& key); // "(01,21)" with 1-based bands

enum class CouplingKind { canonical, microcanonical };

const char* to_string(CouplingKind kind) noexcept;

struct CouplingBlockSpec {
    BlockKey key;
    double strength = 0.0; // lambda_{ij,ab}

    CouplingKind kind() const noexcept {
        return key.i == key.j ? CouplingKind::microcanonical : CouplingKind::canonical;
    }
};

struct ModelSpec {
    SystemSpec system;
    std::vector<BandSpec> bands;
    std::vector<CouplingBlockSpec> blocks;

    // Throws SpecificationError. Blocks are expected in normalized form; use
    // normalize() on hand-built specs.
    void validate() const;
    // Rewrites every block key into its normalized representative.
    void normalize();

    std::size_t band_count() const noexcept { return bands.size(); }
    std::size_t environment_dimension() const noexcept;
    std::size_t total_dimension() const noexcept;
    const CouplingBlockSpec* find_block(BlockKey key) const noexcept;
    // Smallest band width; the natural correlation-time scale is 1 / max width.
    double max_band_width() const noexcept;
};

// Flat index k = i * N_E + offset(a) + n for system level i, band a, slot n.
class BasisLayout {
public:
    struct Coordinates {
        std::size_t level;
        std::size_t band;
        std::size_t slot;
        bool operator==(const Coordinates&) const = default;
    };

    BasisLayout() = default;
    explicit BasisLayout(const ModelSpec& spec);

    std::size_t system_dimension() const noexcept { return system_dim_; }
    std::size_t band_count() const noexcept { return sizes_.size(); }
    std::size_t environment_dimension() const noexcept { return env_dim_; }
    std::size_t total_dimension() const noexcept { return system_dim_ * env_dim_; }
    std::size_t band_size(std::size_t band) const { return sizes_.at(band); }
    std::size_t band_offset(std::size_t band) const { return offsets_.at(band); }
    const std::vector<std::size_t>& band_sizes() const noexcept { return sizes_; }

    std::size_t index(std::size_t level, std::size_t band, std::size_t slot) const;
    // First flat index of the (level, band) sector; the sector is contiguous.
    std::size_t sector_start(std::size_t level, std::size_t band) const;
    Coordinates decode(std::size_t k) const;

private:
    std::size_t system_dim_ = 0;
    std::size_t env_dim_ = 0;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;

// Diagonal of H_loc = H_S x 1 + 1 x H_E, length N_tot.
Eigen::VectorXd build_local_hamiltonian(const ModelSpec& spec);

// P_ij^a = |i><j| x Pi_a on the composite space.
SparseOperator composite_projector(const BasisLayout& layout, std::size_t i, std::size_t j, std::size_t a);

// Pi_a on the environment alone (N_E x N_E).
SparseOperator band_projector(const BasisLayout& layout, std::size_t a);

struct BlockClassification {
    CouplingBlockSpec block;
    double detuning = 0.0; // E_i + E_a - E_j - E_b
    bool resonant = false;
    CouplingKind kind = CouplingKind::canonical;
};

// Resonant iff |detuning| <= tolerance; the default tolerance per block is
// the larger of the two band widths involved.
std::vector<BlockClassification> classify_blocks(const ModelSpec& spec,
                                                 std::optional<double> tolerance = std::nullopt);

} // namespace thermostat
