// diagnostics.hpp - correlation functions, validity estimates, deviations,
// and a brute-force check of the second-order trace identities
#pragma once

#include "thermostat/ham.hpp"
#include "thermostat/interaction.hpp"
#include "thermostat/model.hpp"
#include "thermostat/observables.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace thermostat {

// g(tau) = sum_k w_k exp(i omega_k tau), with the weights |<n_a|C_ij|n_b>|^2
// grouped by the transition frequency omega = E_i - E_j + e(n_a) - e(n_b).
struct CorrelationSpectrum {
    BlockKey key; // directed
    std::vector<double> frequencies;
    std::vector<double> weights;

    double total_weight() const;
    double mean_frequency() const;
    double max_abs_frequency() const;
    std::complex<double> g(double tau) const;
    // Closed-form double integral of g from 0 to tau.
    std::complex<double> f(double tau) const;
    // 1 / q, where q is the 95% weight quantile of |omega - mean frequency|.
    double correlation_time() const;
};

CorrelationSpectrum correlation_spectrum(const InteractionMatrix& v, const ModelSpec& spec, BlockKey key);

struct CorrelationCurve {
    BlockKey key;
    std::vector<double> tau;
    std::vector<std::complex<double>> g;
    std::vector<std::complex<double>> f; // filled by correlation_f
    double tau_c = 0.0;                  // first tau with |g| < 5% g(0), staying below for one more unit
    double tau_c_spectral = 0.0;         // CorrelationSpectrum::correlation_time()
    double slope = 0.0;                  // fitted d Re f / d tau
    double reference_slope = 0.0;        // pi lambda^2 N_a N_b / delta eps
};

// g on the grid from the grouped spectrum. tau_c is NaN when |g| never
// settles below 5% of g(0) inside the grid.
CorrelationCurve correlation_g(const InteractionMatrix& v, const ModelSpec& spec, BlockKey key,
                               const std::vector<double>& tau_grid);
// g on the grid as tr_E{C_ab,ij(tau) C_ba,ji}, one matrix trace per point.
std::vector<std::complex<double>> correlation_g_trace(const InteractionMatrix& v, const ModelSpec& spec,
                                                      BlockKey key, const std::vector<double>& tau_grid);

// Cumulative trapezoid twice, then a least-squares line through Re f on
// [2 tau_c, 10 tau_c]. Refuses when the window leaves the grid or the grid
// step exceeds tau_c / 20. `spec` supplies the reference slope.
void correlation_f(CorrelationCurve& curve, const ModelSpec& spec);

struct ShellValidity {
    double energy = 0.0;
    double occupation = 0.0;
    double growth = 0.0;  // sum_{mi} P_i^E gamma_mi^E
    double horizon = 0.0; // N_S / sum_{mi} gamma_mi^E
    bool valid = true;
};

struct TruncationReport {
    std::vector<ShellValidity> shells; // occupied shells only
    double growth = 0.0;               // Delta(t, tau) / tau
    double tau_c = 0.0;
    bool valid = true;
};

// tau_c defaults to 1 / (largest band width).
TruncationReport truncation_validity(const RateTable& rates, const ObservableSet& p, double tau_c = 0.0);

double hilbert_variance(const Eigen::MatrixXcd& s);

struct TimeSeries {
    std::vector<double> t;
    std::vector<double> value;
};

TimeSeries rho_11_series(const Trajectory& traj);

// (1 / (nu T1)) * integral of the squared difference over [0, nu T1]; both
// series are interpolated linearly onto the union of their grids.
double deviation_D2(const TimeSeries& exact, const TimeSeries& predicted, double t1, int nu = 3);
double deviation_D2(const Trajectory& exact, const Trajectory& predicted, double t1, int nu = 3);

struct DysonReport {
    std::size_t dimension = 0;
    double zeroth_order_error = 0.0; // max |S0 - delta delta delta N_a|, exact arithmetic expected
    double first_order = 0.0;        // max |S1| / max N_a
    double coupling_scale = 0.0;     // lambda sqrt(N) tau, the expected size of first_order
    double second_order_residual = 0.0; // sum |S2_brute - S2_closed| / sum |S2_closed|
    double quadrature_change = 0.0;  // relative change of the traces when the step is halved
    std::size_t quadrature_steps = 0;
    bool converged = true;
    double full_trace_error = 0.0;   // max |tr(D2^dag P D2 P') - S0 - S2_brute| (orders >= 3)
};

// Brute-force traces tr(D2^dag P_ij^a D2 P_i'j'^a') over all index pairs,
// with U1 and U2 obtained by composite Simpson quadrature of V(s) on
// [t, t + tau]. Refuses models above 64 basis states.
DysonReport verify_dyson_trace(const ModelSpec& small_spec, std::uint64_t seed, double t, double tau,
                               double quadrature_tolerance = 1e-6);

// Least squares of log|y| against t over the leading stretch where |y|
// stays above `floor`; returns the decay time -1 / slope.
double fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y, double floor);

} // namespace thermostat
