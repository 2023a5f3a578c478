// interaction.hpp - block random interaction matrices V = sum_ij P_ij x C_ij
#pragma once

#include "thermostat/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace thermostat {

// Stores each active block C_{ij,ab} once under its normalized key; the
// adjoint C_{ji,ba} = C_{ij,ab}^dagger is produced on access, so V = V^dagger
// holds exactly.
class InteractionMatrix {
public:
    InteractionMatrix() = default;
    InteractionMatrix(BasisLayout layout, std::uint64_t seed);

    const BasisLayout& layout() const noexcept { return layout_; }
    std::uint64_t seed() const noexcept { return seed_; }

    bool contains(BlockKey key) const;
    // N_a x N_b matrix mapping band b of level j onto band a of level i; zero
    // if the block is not active.
    Eigen::MatrixXcd block(BlockKey key) const;
    void set_block(BlockKey key, Eigen::MatrixXcd c);
    std::vector<BlockKey> keys() const; // normalized, sorted

    // Adds V restricted to the given flat indices (rows and columns in the
    // order listed) to `target`. `local` maps a flat index to its position
    // in the index list or -1.
    void accumulate(Eigen::MatrixXcd& target, const std::vector<Eigen::Index>& local) const;
    Eigen::MatrixXcd dense() const;

private:
    BasisLayout layout_;
    std::uint64_t seed_ = 0;
    std::map<BlockKey, Eigen::MatrixXcd> blocks_;
};

InteractionMatrix sample_interaction(const ModelSpec& spec, std::uint64_t seed);

// sqrt(trace(C_{ij,ab} C_{ji,ba}) / (N_a N_b)); 0 for absent blocks.
double empirical_coupling(const InteractionMatrix& v, BlockKey key);

struct CrossCorrelation {
    BlockKey first;  // directed
    BlockKey second; // directed, same band pair as `first`
    double value = 0.0;
};

struct DecorrelationReport {
    std::vector<CrossCorrelation> pairs;
    double max_value = 0.0;
};

// For every pair of distinct active blocks and every orientation with a
// common band pair (a, b): |trace(X Y^dagger)| / (lambda_X lambda_Y N_a N_b).
// A block and its own adjoint are never paired; that combination is 1 by
// construction.
DecorrelationReport decorrelation_report(const InteractionMatrix& v);

// Text dump: header, then per block `block i j a b rows cols` followed by
// row-major `re im` pairs, one matrix row per line. Bands are 0-based here.
void save_interaction(const InteractionMatrix& v, const std::string& path);
InteractionMatrix load_interaction(const ModelSpec& spec, const std::string& path);

} // namespace thermostat
