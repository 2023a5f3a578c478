// ham.cpp - golden-rule rates, rate equations, map iteration, closed forms
#include "thermostat/ham.hpp"

#include "thermostat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace thermostat {

RateTable::RateTable(const ModelSpec& spec, double shell_tolerance)
    : ns_(spec.system.dimension()), nb_(spec.band_count()), level_energies_(spec.system.levels),
      max_width_(spec.max_band_width()), rates_(ns_ * ns_ * nb_ * nb_, 0.0) {
    for (const auto& b : spec.bands) {
        band_sizes_.push_back(b.level_count);
        band_energies_.push_back(b.mean_energy);
    }
    std::vector<std::size_t> order(ns_ * nb_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto energy = [&](std::size_t s) { return level_energies_[s / nb_] + band_energies_[s % nb_]; };
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return energy(x) < energy(y); });
    shell_index_.assign(ns_ * nb_, 0);
    double anchor = 0.0;
    for (auto s : order) {
        if (shells_.empty() || energy(s) - anchor > shell_tolerance) {
            anchor = energy(s);
            shells_.push_back(Shell{anchor, {}});
        }
        shells_.back().sectors.emplace_back(s / nb_, s % nb_);
        shell_index_[s] = shells_.size() - 1;
    }
}

double& RateTable::operator()(std::size_t i, std::size_t m, std::size_t a, std::size_t b) {
    return rates_.at(((i * ns_ + m) * nb_ + a) * nb_ + b);
}

double RateTable::operator()(std::size_t i, std::size_t m, std::size_t a, std::size_t b) const {
    return rates_.at(((i * ns_ + m) * nb_ + a) * nb_ + b);
}

double RateTable::total_out(std::size_t i, std::size_t a) const {
    double s = 0.0;
    for (std::size_t m = 0; m < ns_; ++m) {
        for (std::size_t b = 0; b < nb_; ++b) s += (*this)(m, i, b, a);
    }
    return s;
}

double RateTable::max_total_rate() const {
    double r = 0.0;
    for (std::size_t i = 0; i < ns_; ++i) {
        for (std::size_t a = 0; a < nb_; ++a) r = std::max(r, total_out(i, a));
    }
    return r;
}

double RateTable::re_f(std::size_t i, std::size_t m, std::size_t a, std::size_t b, double tau) const {
    return 0.5 * (*this)(i, m, a, b) * static_cast<double>(band_sizes_[b]) * tau;
}

std::size_t RateTable::shell_of(std::size_t i, std::size_t a) const { return shell_index_.at(i * nb_ + a); }

double RateTable::shell_rate(std::size_t shell, std::size_t i, std::size_t m) const {
    double s = 0.0;
    for (const auto& [li, a] : shells_.at(shell).sectors) {
        if (li != i) continue;
        for (const auto& [lm, b] : shells_[shell].sectors) {
            if (lm == m) s += (*this)(i, m, a, b);
        }
    }
    return s;
}

RateTable golden_rates(const ModelSpec& spec, std::optional<double> tolerance) {
    spec.validate();
    RateTable table(spec, tolerance.value_or(spec.max_band_width()));
    for (const auto& c : classify_blocks(spec, tolerance)) {
        if (!c.resonant) continue;
        const auto& k = c.block.key;
        const double width = std::max(spec.bands[k.a].width, spec.bands[k.b].width);
        const double base = 2.0 * std::numbers::pi * c.block.strength * c.block.strength / width;
        table(k.i, k.j, k.a, k.b) = base * static_cast<double>(spec.bands[k.a].level_count);
        table(k.j, k.i, k.b, k.a) = base * static_cast<double>(spec.bands[k.b].level_count);
    }
    return table;
}

namespace {

// Flat state: populations P_ia at i * nb + a, then |P_ij,a|^2 for i < j.
struct RateState {
    std::size_t ns, nb;
    std::size_t offdiag_offset() const { return ns * nb; }
    std::size_t size() const { return ns * nb + ns * (ns - 1) / 2 * nb; }
    std::size_t pair(std::size_t i, std::size_t j, std::size_t a) const {
        // index of (i < j) among upper-triangular pairs
        const std::size_t p = i * ns - i * (i + 1) / 2 + (j - i - 1);
        return offdiag_offset() + p * nb + a;
    }
};

void check_rates(const RateTable& r) {
    for (std::size_t i = 0; i < r.levels(); ++i) {
        for (std::size_t m = 0; m < r.levels(); ++m) {
            for (std::size_t a = 0; a < r.bands(); ++a) {
                for (std::size_t b = 0; b < r.bands(); ++b) {
                    const double g = r(i, m, a, b);
                    if (!(g >= 0.0) || !std::isfinite(g)) throw InternalError("rate table holds a negative rate");
                }
            }
        }
    }
}

Eigen::VectorXd pack(const RateTable& r, const ObservableSet& p) {
    if (p.levels() != r.levels() || p.bands() != r.bands()) {
        throw SpecificationError("initial observables do not match the rate table dimensions");
    }
    const RateState st{r.levels(), r.bands()};
    Eigen::VectorXd x(static_cast<Eigen::Index>(st.size()));
    double total = 0.0;
    for (std::size_t i = 0; i < st.ns; ++i) {
        for (std::size_t a = 0; a < st.nb; ++a) {
            x(static_cast<Eigen::Index>(i * st.nb + a)) = p.population(i, a);
            total += p.population(i, a);
            for (std::size_t j = i + 1; j < st.ns; ++j) {
                x(static_cast<Eigen::Index>(st.pair(i, j, a))) = p.abs_sq(i, j, a);
            }
        }
    }
    if (std::abs(total - 1.0) > 1e-8) throw SpecificationError("initial populations must sum to 1");
    return x;
}

ObservableSet unpack(const RateTable& r, const Eigen::VectorXd& x, double t) {
    const RateState st{r.levels(), r.bands()};
    ObservableSet p(st.ns, st.nb, t);
    p.set_phase_resolved(false);
    for (std::size_t i = 0; i < st.ns; ++i) {
        for (std::size_t a = 0; a < st.nb; ++a) {
            p(i, i, a) = x(static_cast<Eigen::Index>(i * st.nb + a));
            for (std::size_t j = i + 1; j < st.ns; ++j) {
                const double m = std::sqrt(std::max(0.0, x(static_cast<Eigen::Index>(st.pair(i, j, a)))));
                p(i, j, a) = m;
                p(j, i, a) = m;
            }
        }
    }
    return p;
}

// The right-hand side is linear, x' = A x, so assemble A once.
Eigen::MatrixXd generator(const RateTable& r) {
    const RateState st{r.levels(), r.bands()};
    const auto n = static_cast<Eigen::Index>(st.size());
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < st.ns; ++i) {
        for (std::size_t a = 0; a < st.nb; ++a) {
            const auto row = static_cast<Eigen::Index>(i * st.nb + a);
            for (std::size_t m = 0; m < st.ns; ++m) {
                for (std::size_t b = 0; b < st.nb; ++b) {
                    g(row, static_cast<Eigen::Index>(m * st.nb + b)) += r(i, m, a, b);
                    g(row, row) -= r(m, i, b, a);
                }
            }
            for (std::size_t j = i + 1; j < st.ns; ++j) {
                const auto k = static_cast<Eigen::Index>(st.pair(i, j, a));
                g(k, k) = -(r.total_out(i, a) + r.total_out(j, a));
            }
        }
    }
    return g;
}

void check_positive(const RateTable& r, const Eigen::VectorXd& x, double t) {
    const std::size_t np = r.levels() * r.bands();
    for (std::size_t k = 0; k < np; ++k) {
        const double v = x(static_cast<Eigen::Index>(k));
        if (v < -1e-10 || v > 1.0 + 1e-10) {
            throw InternalError("population left [0, 1] at t = " + std::to_string(t) + "; step too large");
        }
    }
}

} // namespace

Trajectory integrate_rates(const RateTable& rates, const ObservableSet& p0, const std::vector<double>& grid) {
    check_rates(rates);
    if (grid.empty()) throw SpecificationError("integrate_rates: empty time grid");
    Eigen::VectorXd x = pack(rates, p0);
    const Eigen::MatrixXd a = generator(rates);
    const double rmax = rates.max_total_rate();
    const double h_cap = rmax > 0.0 ? 1.0 / (50.0 * rmax) : std::numeric_limits<double>::infinity();

    Trajectory traj;
    traj.provenance.engine = Engine::ham_ode;
    double t = grid.front();
    traj.push(unpack(rates, x, t));
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double span = grid[k] - t;
        if (!(span > 0.0)) throw SpecificationError("integrate_rates: grid must be strictly increasing");
        const auto steps = static_cast<std::size_t>(std::ceil(span / std::min(span, h_cap) - 1e-12));
        const double h = span / static_cast<double>(steps);
        for (std::size_t s = 0; s < steps; ++s) {
            const Eigen::VectorXd k1 = a * x;
            const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1);
            const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2);
            const Eigen::VectorXd k4 = a * (x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            check_positive(rates, x, t + h * static_cast<double>(s + 1));
        }
        t = grid[k];
        traj.push(unpack(rates, x, t));
    }
    return traj;
}

double truncation_horizon(const RateTable& rates, const ObservableSet& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < rates.shells().size(); ++e) {
        double occupied = 0.0;
        for (const auto& [i, a] : rates.shells()[e].sectors) occupied += p.population(i, a);
        if (occupied <= 0.0) continue;
        double sum = 0.0;
        for (std::size_t m = 0; m < rates.levels(); ++m) {
            for (std::size_t i = 0; i < rates.levels(); ++i) sum += rates.shell_rate(e, m, i);
        }
        if (sum > 0.0) best = std::min(best, static_cast<double>(rates.levels()) / sum);
    }
    return best;
}

MapResult iterate_map(const RateTable& rates, const ObservableSet& p0, double tau, std::size_t steps) {
    if (!(tau > 0.0)) throw SpecificationError("iterate_map: tau must be positive");
    check_rates(rates);
    MapResult out;
    const double tau_c = rates.max_band_width() > 0.0 ? 1.0 / rates.max_band_width() : 0.0;
    const double tau_d = truncation_horizon(rates, p0);
    if (tau < tau_c) {
        out.warnings.push_back("tau = " + std::to_string(tau) + " is below the correlation time " +
                               std::to_string(tau_c));
    }
    if (tau > tau_d) {
        out.warnings.push_back("tau = " + std::to_string(tau) + " exceeds the truncation horizon " +
                               std::to_string(tau_d));
    }

    const std::size_t ns = rates.levels();
    const std::size_t nb = rates.bands();
    Eigen::VectorXd x = pack(rates, p0);
    const RateState st{ns, nb};
    out.trajectory.provenance.engine = Engine::ham_map;
    out.trajectory.push(unpack(rates, x, 0.0));
    Eigen::VectorXd next(x.size());
    for (std::size_t s = 1; s <= steps; ++s) {
        next = x;
        for (std::size_t i = 0; i < ns; ++i) {
            for (std::size_t a = 0; a < nb; ++a) {
                const double na = static_cast<double>(rates.band_size(a));
                const double pia = x(static_cast<Eigen::Index>(i * nb + a));
                double d = 0.0;
                for (std::size_t m = 0; m < ns; ++m) {
                    for (std::size_t b = 0; b < nb; ++b) {
                        const double nbb = static_cast<double>(rates.band_size(b));
                        const double pmb = x(static_cast<Eigen::Index>(m * nb + b));
                        d += 2.0 * rates.re_f(i, m, a, b, tau) * (pmb / nbb - pia / na);
                    }
                }
                next(static_cast<Eigen::Index>(i * nb + a)) += d;
                for (std::size_t j = i + 1; j < ns; ++j) {
                    double sum = 0.0;
                    for (std::size_t m = 0; m < ns; ++m) {
                        for (std::size_t b = 0; b < nb; ++b) {
                            sum += rates.re_f(j, m, a, b, tau) + rates.re_f(i, m, a, b, tau);
                        }
                    }
                    const auto k = static_cast<Eigen::Index>(st.pair(i, j, a));
                    next(k) -= x(k) * 2.0 * sum / na;
                }
            }
        }
        x.swap(next);
        out.trajectory.push(unpack(rates, x, tau * static_cast<double>(s)));
    }
    return out;
}

void ThreeBandParams::validate() const {
    if (!(lambda_can > 0.0)) throw SpecificationError("three-band model: lambda_can must be positive");
    if (!(lambda_mic >= 0.0)) throw SpecificationError("three-band model: lambda_mic must be non-negative");
    if (levels_per_band < 1) throw SpecificationError("three-band model: N must be at least 1");
    if (!(band_width > 0.0)) throw SpecificationError("three-band model: band width must be positive");
}

double ThreeBandParams::thermalization_time() const {
    validate();
    return band_width / (4.0 * std::numbers::pi * lambda_can * lambda_can * static_cast<double>(levels_per_band));
}

double ThreeBandParams::decoherence_time() const {
    const double x = xi();
    return 2.0 * thermalization_time() / (1.0 + x * x);
}

ClosedFormResult closed_form_three_band(const ThreeBandParams& p, const Eigen::Matrix2cd& rho0,
                                        const std::vector<double>& grid) {
    ClosedFormResult out;
    out.thermalization_time = p.thermalization_time();
    out.decoherence_time = p.decoherence_time();
    const double r11 = rho0(1, 1).real();
    const double r00 = rho0(0, 0).real();
    const double c0 = std::abs(rho0(1, 0));
    out.trajectory.provenance.engine = Engine::closed_form;
    for (double t : grid) {
        ObservableSet s(2, 1, t);
        s.set_phase_resolved(false);
        const double relax = std::exp(-t / out.thermalization_time);
        const double mean = 0.5 * (r00 + r11);
        s(1, 1, 0) = mean + (r11 - mean) * relax;
        s(0, 0, 0) = mean + (r00 - mean) * relax;
        const double c = c0 * std::exp(-t / out.decoherence_time);
        s(0, 1, 0) = c;
        s(1, 0, 0) = c;
        out.trajectory.push(std::move(s));
    }
    return out;
}

ReducedRateSystem ReducedRateSystem::canonical(const Eigen::MatrixXd& forward, const Eigen::VectorXd& energies,
                                                double beta) {
    ReducedRateSystem r;
    r.energies = energies;
    r.beta = beta;
    r.gamma = Eigen::MatrixXd::Zero(forward.rows(), forward.cols());
    for (Eigen::Index i = 0; i < forward.rows(); ++i) {
        for (Eigen::Index m = 0; m < forward.cols(); ++m) {
            if (i == m) continue;
            if (forward(i, m) > 0.0) r.gamma(i, m) = forward(i, m);
        }
    }
    // the loss of rho_i towards m is exp(beta (E_i - E_m)) gamma_im, which is the rate i -> m
    for (Eigen::Index i = 0; i < forward.rows(); ++i) {
        for (Eigen::Index m = 0; m < forward.cols(); ++m) {
            if (i == m || forward(i, m) <= 0.0) continue;
            r.gamma(m, i) = std::exp(beta * (energies(i) - energies(m))) * forward(i, m);
        }
    }
    return r;
}

Eigen::VectorXd ReducedRateSystem::derivative(const Eigen::VectorXd& rho) const {
    const auto n = gamma.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < n; ++m) {
            if (m != i) d(i) += gamma(i, m) * rho(m) - gamma(m, i) * rho(i);
        }
    }
    return d;
}

Eigen::VectorXd ReducedRateSystem::equilibrium() const {
    const auto n = gamma.rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n + 1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < n; ++m) {
            if (m == i) continue;
            g(i, m) += gamma(i, m);
            g(i, i) -= gamma(m, i);
        }
    }
    g.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    return g.colPivHouseholderQr().solve(rhs);
}

std::vector<Eigen::VectorXd> ReducedRateSystem::integrate(const Eigen::VectorXd& rho0,
                                                          const std::vector<double>& grid) const {
    double rmax = 0.0;
    for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
        double out = 0.0;
        for (Eigen::Index m = 0; m < gamma.rows(); ++m) {
            if (m != i) out += gamma(m, i);
        }
        rmax = std::max(rmax, out);
    }
    const double h_cap = rmax > 0.0 ? 1.0 / (50.0 * rmax) : std::numeric_limits<double>::infinity();
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd x = rho0;
    double t = grid.empty() ? 0.0 : grid.front();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) {
            const double span = grid[k] - t;
            if (!(span > 0.0)) throw SpecificationError("grid must be strictly increasing");
            const auto steps = static_cast<std::size_t>(std::ceil(span / std::min(span, h_cap) - 1e-12));
            const double h = span / static_cast<double>(steps);
            for (std::size_t s = 0; s < steps; ++s) {
                const Eigen::VectorXd k1 = derivative(x);
                const Eigen::VectorXd k2 = derivative(x + 0.5 * h * k1);
                const Eigen::VectorXd k3 = derivative(x + 0.5 * h * k2);
                const Eigen::VectorXd k4 = derivative(x + h * k3);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            t = grid[k];
        }
        out.push_back(x);
    }
    return out;
}

namespace {

bool close_rel(double x, double y, double tol) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 || std::abs(x - y) <= tol * scale;
}

} // namespace

ReducedRateSystem reduce_canonical(const RateTable& rates, double beta, const ObservableSet* p0, double tolerance) {
    const std::size_t ns = rates.levels();
    const auto n = static_cast<Eigen::Index>(ns);
    const auto& shells = rates.shells();
    Eigen::VectorXd energies(n);
    for (std::size_t i = 0; i < ns; ++i) energies(static_cast<Eigen::Index>(i)) = rates.level_energy(i);

    if (p0) {
        std::vector<std::size_t> occupied;
        for (std::size_t e = 0; e < shells.size(); ++e) {
            double w = 0.0;
            for (const auto& [i, a] : shells[e].sectors) w += p0->population(i, a);
            if (w > 1e-12) occupied.push_back(e);
        }
        if (occupied.size() == 1) {
            // inside one shell the populations close on their own; both
            // directions come straight from the shell rates
            ReducedRateSystem red;
            red.energies = energies;
            red.beta = beta;
            red.gamma = Eigen::MatrixXd::Zero(n, n);
            for (std::size_t i = 0; i < ns; ++i) {
                for (std::size_t m = 0; m < ns; ++m) {
                    if (i != m) {
                        red.gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) =
                            rates.shell_rate(occupied.front(), i, m);
                    }
                }
            }
            return red;
        }
    }

    double ref = -1.0;
    for (std::size_t a = 0; a < rates.bands(); ++a) {
        const double scaled = static_cast<double>(rates.band_size(a)) * std::exp(-beta * rates.band_energy(a));
        if (ref < 0.0) {
            ref = scaled;
        } else if (!close_rel(scaled, ref, tolerance)) {
            throw RefusalError("cannot close the equations for the system populations: band " +
                               std::to_string(a + 1) +
                               " breaks N_a proportional to exp(beta E_a), and the state is not confined to a "
                               "single energy shell");
        }
    }
    Eigen::MatrixXd forward = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t m = 0; m < ns; ++m) {
            if (i == m) continue;
            double common = -1.0;
            for (std::size_t e = 0; e < shells.size(); ++e) {
                const double g = rates.shell_rate(e, i, m);
                if (g <= 0.0) continue;
                if (common < 0.0) {
                    common = g;
                } else if (!close_rel(g, common, tolerance)) {
                    throw RefusalError("cannot close the equations for the system populations: the rate " +
                                       std::to_string(m) + " -> " + std::to_string(i) +
                                       " depends on the energy shell (" + std::to_string(common) + " vs " +
                                       std::to_string(g) + "), and the state is not confined to a single shell");
                }
            }
            forward(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = std::max(common, 0.0);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = i + 1; m < n; ++m) {
            if (forward(i, m) > 0.0 && forward(m, i) > 0.0) continue;
            if (forward(i, m) > 0.0 || forward(m, i) > 0.0) {
                throw RefusalError("cannot close the equations for the system populations: the transition between "
                                   "levels " + std::to_string(i) + " and " + std::to_string(m) +
                                   " is one-directional");
            }
        }
    }
    // keep only one direction per pair; the other follows from the exp(beta dE) factor
    Eigen::MatrixXd upward = forward;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < i; ++m) upward(i, m) = 0.0;
    }
    auto red = ReducedRateSystem::canonical(upward, energies, beta);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < i; ++m) {
            if (forward(i, m) > 0.0 && !close_rel(red.gamma(i, m), forward(i, m), tolerance)) {
                throw RefusalError("cannot close the equations for the system populations: rates between levels " +
                                   std::to_string(m) + " and " + std::to_string(i) +
                                   " are not in the ratio exp(beta dE) required at this beta");
            }
        }
    }
    return red;
}

SparseOperator hilbert_average_state(const ObservableSet& p, const BasisLayout& layout) {
    if (!p.phase_resolved()) throw SpecificationError("hilbert_average_state needs phase-resolved observables");
    if (p.levels() != layout.system_dimension() || p.bands() != layout.band_count()) {
        throw SpecificationError("observables do not match the basis layout");
    }
    const auto n = static_cast<Eigen::Index>(layout.total_dimension());
    std::vector<Eigen::Triplet<std::complex<double>>> entries;
    for (std::size_t i = 0; i < p.levels(); ++i) {
        for (std::size_t j = 0; j < p.levels(); ++j) {
            for (std::size_t a = 0; a < p.bands(); ++a) {
                const auto c = p(j, i, a) / static_cast<double>(layout.band_size(a));
                if (c == 0.0) continue;
                for (std::size_t s = 0; s < layout.band_size(a); ++s) {
                    entries.emplace_back(static_cast<Eigen::Index>(layout.index(i, a, s)),
                                         static_cast<Eigen::Index>(layout.index(j, a, s)), c);
                }
            }
        }
    }
    SparseOperator alpha(n, n);
    alpha.setFromTriplets(entries.begin(), entries.end());
    return alpha;
}

} // namespace thermostat
