// propagator.hpp - exact Schroedinger evolution by dense diagonalization
#pragma once

#include "thermostat/interaction.hpp"
#include "thermostat/model.hpp"
#include "thermostat/observables.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <variant>
#include <vector>

namespace thermostat {

struct PureState {
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

// H = H_loc + V splits into blocks wherever V has no entries between
// (level, band) sectors. Each connected set of sectors is diagonalized on
// its own; the result is the same eigendecomposition, block-diagonal.
struct EigenComponent {
    std::vector<Eigen::Index> indices; // flat basis indices, ascending
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors; // columns are eigenvectors in `indices` order
};

class EigenSystem {
public:
    EigenSystem() = default;
    EigenSystem(BasisLayout layout, std::vector<EigenComponent> components);

    const BasisLayout& layout() const noexcept { return layout_; }
    const std::vector<EigenComponent>& components() const noexcept { return components_; }
    std::size_t dimension() const noexcept { return layout_.total_dimension(); }
    Eigen::VectorXd eigenvalues() const; // all, ascending
    // Largest ||H v - E v|| over all pairs; needs the H it came from.
    double max_residual(const Eigen::VectorXd& h_loc, const InteractionMatrix& v) const;
    double max_unitarity_error() const;

private:
    BasisLayout layout_;
    std::vector<EigenComponent> components_;
};

inline constexpr std::size_t default_dimension_cap = 5000;

// Throws RefusalError if N_tot > cap.
EigenSystem diagonalize(const Eigen::VectorXd& h_loc, const InteractionMatrix& v,
                        std::size_t cap = default_dimension_cap);

// psi(t) = U exp(-i E t) U^dagger psi0, with U^dagger psi0 computed once.
class Evolver {
public:
    Evolver(const EigenSystem& eig, const PureState& psi0);

    PureState state(double t) const;
    // One snapshot per time, evaluated in batches with dense products.
    Trajectory observe(const std::vector<double>& times) const;
    // rho_ii(t) only; touches just the rows of system level i.
    std::vector<double> level_population(const std::vector<double>& times, std::size_t level) const;

private:
    struct Active {
        std::size_t component;
        Eigen::VectorXcd coefficients;
    };
    const EigenSystem* eig_;
    std::vector<Active> active_;
};

PureState evolve(const EigenSystem& eig, const PureState& psi0, double t);

ObservableSet measure(const PureState& psi, const BasisLayout& layout, double t = 0.0);
ObservableSet measure(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisLayout& layout, double t = 0.0);

// A system state sum_i c_i |i> times one environment vector drawn Haar-random
// inside the bands listed in band_weights (weights summing to 1).
struct ProductRecipe {
    std::vector<std::complex<double>> system_amplitudes; // normalized
    std::vector<double> band_weights;                   // length = band count
};

// sum_k sqrt(w_k) |i_k> |phi_k>, each phi_k Haar-random and independent in band a_k.
struct CorrelatedComponent {
    std::size_t level = 0;
    std::size_t band = 0;
    double weight = 0.0;
};
struct CorrelatedRecipe {
    std::vector<CorrelatedComponent> components;
};

using InitialStateRecipe = std::variant<ProductRecipe, CorrelatedRecipe>;

PureState sample_initial_state(const InitialStateRecipe& recipe, const BasisLayout& layout, std::uint64_t seed);

} // namespace thermostat
