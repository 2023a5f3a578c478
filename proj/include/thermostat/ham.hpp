// ham.hpp - Hilbert-space-average rate equations and their closed forms
#pragma once

#include "thermostat/model.hpp"
#include "thermostat/observables.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace thermostat {

// One energy shell: all (level, band) sectors with E_i + E_a equal within
// the resonance tolerance.
struct Shell {
    double energy = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> sectors; // (level, band)
};

// gamma(i, m, a, b): golden-rule rate for (m, b) -> (i, a).
class RateTable {
public:
    RateTable() = default;
    RateTable(const ModelSpec& spec, double shell_tolerance);

    std::size_t levels() const noexcept { return ns_; }
    std::size_t bands() const noexcept { return nb_; }
    std::size_t band_size(std::size_t a) const { return band_sizes_.at(a); }
    const std::vector<std::size_t>& band_sizes() const noexcept { return band_sizes_; }
    double level_energy(std::size_t i) const { return level_energies_.at(i); }
    double band_energy(std::size_t a) const { return band_energies_.at(a); }
    // Largest band width; 1 / this is the correlation-time estimate.
    double max_band_width() const noexcept { return max_width_; }

    double& operator()(std::size_t i, std::size_t m, std::size_t a, std::size_t b);
    double operator()(std::size_t i, std::size_t m, std::size_t a, std::size_t b) const;

    // sum_{m b} gamma(m, i, b, a): total rate out of sector (i, a).
    double total_out(std::size_t i, std::size_t a) const;
    double max_total_rate() const;

    // Re f_{im,ab}(tau) = gamma_{im,ab} N_b tau / 2
    double re_f(std::size_t i, std::size_t m, std::size_t a, std::size_t b, double tau) const;

    const std::vector<Shell>& shells() const noexcept { return shells_; }
    std::size_t shell_of(std::size_t i, std::size_t a) const;
    // gamma_im^E: rate m -> i inside shell E (0 if either level has no band there)
    double shell_rate(std::size_t shell, std::size_t i, std::size_t m) const;

private:
    std::size_t ns_ = 0;
    std::size_t nb_ = 0;
    std::vector<std::size_t> band_sizes_;
    std::vector<double> level_energies_;
    std::vector<double> band_energies_;
    double max_width_ = 0.0;
    std::vector<double> rates_;
    std::vector<Shell> shells_;
    std::vector<std::size_t> shell_index_;
};

// gamma_{ij,ab} = 2 pi lambda^2 N_a / delta for resonant blocks, with delta
// the larger width of bands a and b; the reverse direction uses N_b.
// Non-resonant blocks contribute nothing. The tolerance defaults as in
// classify_blocks.
RateTable golden_rates(const ModelSpec& spec, std::optional<double> tolerance = std::nullopt);

// RK4 on the population equations and on |P_ij,a|^2, starting from p0 at
// grid.front(). The step is the
// largest value <= min(grid spacing, 1 / (50 max total rate)) that divides
// each grid interval evenly. The returned snapshots are phase-free.
Trajectory integrate_rates(const RateTable& rates, const ObservableSet& p0, const std::vector<double>& grid);

struct MapResult {
    Trajectory trajectory;
    std::vector<std::string> warnings;
};

// Discrete update with step tau, fed by Re f(tau) from the rate table.
// Warns when tau is below the correlation time 1/delta_eps or above the
// shortest truncation horizon among occupied shells.
MapResult iterate_map(const RateTable& rates, const ObservableSet& p0, double tau, std::size_t steps);

// Shortest N_S / sum_{mi} gamma_mi^E over shells occupied in p; infinity
// when no occupied shell has any rate.
double truncation_horizon(const RateTable& rates, const ObservableSet& p);

struct ThreeBandParams {
    double lambda_can = 0.0;
    double lambda_mic = 0.0;
    std::size_t levels_per_band = 0; // N
    double band_width = 0.0;         // delta eps
    double beta = 0.0;

    double xi() const noexcept { return lambda_mic / lambda_can; }
    void validate() const;
    double thermalization_time() const; // delta eps / (4 pi lambda_can^2 N)
    double decoherence_time() const;    // 2 T_th / (1 + xi^2)
};

struct ClosedFormResult {
    Trajectory trajectory; // 2 levels, one aggregated band, phase-free
    double thermalization_time = 0.0;
    double decoherence_time = 0.0;
};

ClosedFormResult closed_form_three_band(const ThreeBandParams& p, const Eigen::Matrix2cd& rho0,
                                        const std::vector<double>& grid);

// d rho_ii/dt = sum_m [gamma(i, m) rho_mm - gamma(m, i) rho_ii]. For the
// canonical form gamma(m, i) = exp(beta (E_i - E_m)) gamma(i, m).
struct ReducedRateSystem {
    Eigen::MatrixXd gamma; // gamma(i, m): rate m -> i, zero diagonal
    Eigen::VectorXd energies;
    double beta = 0.0;

    // Fills the reverse of every nonzero forward(i, m) from the exponential factor.
    static ReducedRateSystem canonical(const Eigen::MatrixXd& forward, const Eigen::VectorXd& energies, double beta);

    Eigen::VectorXd derivative(const Eigen::VectorXd& rho) const;
    Eigen::VectorXd equilibrium() const;
    std::vector<Eigen::VectorXd> integrate(const Eigen::VectorXd& rho0, const std::vector<double>& grid) const;
};

// Refuses (RefusalError) unless either p0 occupies a single shell, or the
// shell rates are shell-independent and N_a e^{-beta E_a} is constant, both
// within the relative tolerance.
ReducedRateSystem reduce_canonical(const RateTable& rates, double beta, const ObservableSet* p0 = nullptr,
                                   double tolerance = 0.05);

// alpha = sum_{ija} (P_{ji,a} / N_a) P_ij^a
SparseOperator hilbert_average_state(const ObservableSet& p, const BasisLayout& layout);

} // namespace thermostat
