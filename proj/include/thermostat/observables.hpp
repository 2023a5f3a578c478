// observables.hpp - P_{ij,a} snapshots, trajectories and their CSV form
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace thermostat {

enum class Engine { exact, ham_ode, ham_map, closed_form };

const char* to_string(Engine e) noexcept;
Engine engine_from_string(const std::string& name);

// Values P_{ij,a} = <psi| (|i><j| x Pi_a) |psi> at one time.
//
// Rate-equation engines do not predict phases. Their snapshots have
// phase_resolved == false and keep |P_{ij,a}| (real, non-negative) in the
// off-diagonal slots; abs_sq() is meaningful for both kinds.
class ObservableSet {
public:
    ObservableSet() = default;
    ObservableSet(std::size_t levels, std::size_t bands, double t = 0.0);

    std::size_t levels() const noexcept { return levels_; }
    std::size_t bands() const noexcept { return bands_; }
    double time() const noexcept { return t_; }
    void set_time(double t) noexcept { t_ = t; }
    bool phase_resolved() const noexcept { return phase_resolved_; }
    void set_phase_resolved(bool v) noexcept { phase_resolved_ = v; }

    std::complex<double>& operator()(std::size_t i, std::size_t j, std::size_t a);
    std::complex<double> operator()(std::size_t i, std::size_t j, std::size_t a) const;

    double population(std::size_t i, std::size_t a) const { return (*this)(i, i, a).real(); }
    double abs_sq(std::size_t i, std::size_t j, std::size_t a) const { return std::norm((*this)(i, j, a)); }

    // rho_ij = sum_a P_{ij,a}
    std::complex<double> rho(std::size_t i, std::size_t j) const;
    // |rho_ij|^2; without phases the band terms are added incoherently.
    double rho_abs_sq(std::size_t i, std::size_t j) const;
    double total_population() const;
    Eigen::MatrixXcd reduced_matrix() const;
    double entropy() const;

private:
    std::size_t levels_ = 0;
    std::size_t bands_ = 0;
    double t_ = 0.0;
    bool phase_resolved_ = true;
    std::vector<std::complex<double>> values_;
};

struct Provenance {
    std::uint64_t spec_hash = 0;
    std::uint64_t seed = 0;
    Engine engine = Engine::exact;
};

struct Trajectory {
    std::vector<ObservableSet> points; // strictly increasing times
    Provenance provenance;

    std::vector<double> times() const;
    std::vector<double> rho_series(std::size_t i, std::size_t j) const; // Re rho_ij
    std::vector<double> rho_abs_sq_series(std::size_t i, std::size_t j) const;
    void push(ObservableSet p); // throws InternalError on non-increasing time
};

std::vector<double> uniform_grid(double t_end, double dt);

// t, P_ii_a columns, Re/Im P_ij_a for i < j, rho_11, abs_rho_01_sq, S_vN.
// Bands are 1-based in column names. For phase-free trajectories the Im
// column is 0 and Re holds |P_ij_a|.
std::string csv_header(std::size_t levels, std::size_t bands);
void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv(const std::string& path, const Trajectory& traj);

} // namespace thermostat
