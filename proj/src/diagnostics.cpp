// diagnostics.cpp
#include "thermostat/diagnostics.hpp"

#include "thermostat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace thermostat {

using cd = std::complex<double>;

double CorrelationSpectrum::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double CorrelationSpectrum::mean_frequency() const {
    double s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * frequencies[k];
    const double w = total_weight();
    return w > 0.0 ? s / w : 0.0;
}

double CorrelationSpectrum::max_abs_frequency() const {
    double m = 0.0;
    for (double w : frequencies) m = std::max(m, std::abs(w));
    return m;
}

cd CorrelationSpectrum::g(double tau) const {
    cd s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * std::exp(cd(0.0, frequencies[k] * tau));
    return s;
}

cd CorrelationSpectrum::f(double tau) const {
    cd s = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double w = frequencies[k];
        const double x = w * tau;
        if (std::abs(x) < 1e-4) {
            // series of (1 - e^{ix})/w^2 + i tau / w around x = 0
            s += weights[k] * tau * tau * cd(0.5 + x * x / -24.0, x / 6.0);
        } else {
            s += weights[k] * ((1.0 - std::exp(cd(0.0, x))) / (w * w) + cd(0.0, tau / w));
        }
    }
    return s;
}

double CorrelationSpectrum::correlation_time() const {
    const double total = total_weight();
    if (!(total > 0.0)) return 0.0;
    const double mean = mean_frequency();
    std::vector<std::pair<double, double>> spread;
    spread.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) spread.emplace_back(std::abs(frequencies[k] - mean), weights[k]);
    std::sort(spread.begin(), spread.end());
    double acc = 0.0;
    for (const auto& [d, w] : spread) {
        acc += w;
        if (acc >= 0.95 * total) return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
    }
    return 1.0 / spread.back().first;
}

CorrelationSpectrum correlation_spectrum(const InteractionMatrix& v, const ModelSpec& spec, BlockKey key) {
    const auto c = v.block(key);
    const auto& ba = spec.bands.at(key.a);
    const auto& bb = spec.bands.at(key.b);
    const double shift = spec.system.levels.at(key.i) - spec.system.levels.at(key.j);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(c.size()));
    for (Eigen::Index n = 0; n < c.rows(); ++n) {
        for (Eigen::Index k = 0; k < c.cols(); ++k) {
            const double w = std::norm(c(n, k));
            if (w == 0.0) continue;
            const double omega = shift + ba.level_energy(static_cast<std::size_t>(n)) -
                                 bb.level_energy(static_cast<std::size_t>(k));
            pairs.emplace_back(omega, w);
        }
    }
    std::sort(pairs.begin(), pairs.end());
    CorrelationSpectrum s;
    s.key = key;
    double scale = 1.0;
    for (const auto& p : pairs) scale = std::max(scale, std::abs(p.first));
    const double merge = 1e-11 * scale;
    for (const auto& [omega, w] : pairs) {
        if (!s.frequencies.empty() && omega - s.frequencies.back() <= merge) {
            s.weights.back() += w;
        } else {
            s.frequencies.push_back(omega);
            s.weights.push_back(w);
        }
    }
    return s;
}

namespace {

double decay_time(const std::vector<double>& tau, const std::vector<cd>& g) {
    if (g.empty()) return 0.0;
    const double g0 = std::abs(g.front());
    if (g0 == 0.0) return 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::abs(g[k]) >= 0.05 * g0) continue;
        bool stays = true;
        std::size_t q = k;
        for (; q < g.size() && tau[q] <= tau[k] + 1.0; ++q) {
            if (std::abs(g[q]) >= 0.05 * g0) {
                stays = false;
                break;
            }
        }
        if (stays && q < g.size()) return tau[k];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

} // namespace

CorrelationCurve correlation_g(const InteractionMatrix& v, const ModelSpec& spec, BlockKey key,
                               const std::vector<double>& tau_grid) {
    const auto spectrum = correlation_spectrum(v, spec, key);
    CorrelationCurve curve;
    curve.key = key;
    curve.tau = tau_grid;
    curve.g.reserve(tau_grid.size());
    for (double t : tau_grid) curve.g.push_back(spectrum.g(t));
    curve.tau_c = decay_time(curve.tau, curve.g);
    curve.tau_c_spectral = spectrum.correlation_time();
    return curve;
}

std::vector<cd> correlation_g_trace(const InteractionMatrix& v, const ModelSpec& spec, BlockKey key,
                                    const std::vector<double>& tau_grid) {
    const Eigen::MatrixXcd c = v.block(key);
    const Eigen::MatrixXcd c_back = v.block(key.adjoint()); // C_{ji,ba}
    const auto& ba = spec.bands.at(key.a);
    const auto& bb = spec.bands.at(key.b);
    const double shift = spec.system.levels.at(key.i) - spec.system.levels.at(key.j);
    std::vector<cd> out;
    out.reserve(tau_grid.size());
    Eigen::VectorXcd pa(c.rows()), pb(c.cols());
    for (double t : tau_grid) {
        for (Eigen::Index n = 0; n < c.rows(); ++n) pa(n) = std::exp(cd(0.0, ba.level_energy(n) * t));
        for (Eigen::Index k = 0; k < c.cols(); ++k) pb(k) = std::exp(cd(0.0, -bb.level_energy(k) * t));
        // C(t) = e^{i H_E t} C e^{-i H_E t} e^{i (E_i - E_j) t}
        const Eigen::MatrixXcd ct = pa.asDiagonal() * c * pb.asDiagonal();
        out.push_back((ct * c_back).trace() * std::exp(cd(0.0, shift * t)));
    }
    return out;
}

void correlation_f(CorrelationCurve& curve, const ModelSpec& spec) {
    const auto& tau = curve.tau;
    const auto n = tau.size();
    if (n < 3) throw RefusalError("correlation_f: grid too short");
    if (tau.front() != 0.0) throw RefusalError("correlation_f: grid must start at tau = 0");
    if (!(curve.tau_c > 0.0)) throw RefusalError("correlation_f: correlation time not resolved on the grid");
    for (std::size_t k = 1; k < n; ++k) {
        if (tau[k] - tau[k - 1] > curve.tau_c / 20.0 * (1.0 + 1e-9)) {
            throw RefusalError("correlation_f: grid step exceeds tau_c / 20");
        }
    }
    const double lo = 2.0 * curve.tau_c;
    const double hi = 10.0 * curve.tau_c;
    if (hi > tau.back() * (1.0 + 1e-12)) {
        throw RefusalError("correlation_f: fit window [2 tau_c, 10 tau_c] exceeds the sampled range");
    }
    std::vector<cd> inner(n, 0.0);
    curve.f.assign(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double h = tau[k] - tau[k - 1];
        inner[k] = inner[k - 1] + 0.5 * h * (curve.g[k] + curve.g[k - 1]);
        curve.f[k] = curve.f[k - 1] + 0.5 * h * (inner[k] + inner[k - 1]);
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (tau[k] < lo || tau[k] > hi) continue;
        const double y = curve.f[k].real();
        sx += tau[k];
        sy += y;
        sxx += tau[k] * tau[k];
        sxy += tau[k] * y;
        ++m;
    }
    if (m < 2) throw RefusalError("correlation_f: fewer than two samples inside the fit window");
    const double md = static_cast<double>(m);
    curve.slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    const auto& k = curve.key;
    const auto* blk = spec.find_block(k);
    const double lambda = blk ? blk->strength : 0.0;
    const double width = std::max(spec.bands.at(k.a).width, spec.bands.at(k.b).width);
    curve.reference_slope = std::numbers::pi * lambda * lambda *
                            static_cast<double>(spec.bands[k.a].level_count * spec.bands[k.b].level_count) / width;
}

TruncationReport truncation_validity(const RateTable& rates, const ObservableSet& p, double tau_c) {
    TruncationReport rep;
    rep.tau_c = tau_c > 0.0 ? tau_c : (rates.max_band_width() > 0.0 ? 1.0 / rates.max_band_width() : 0.0);
    for (std::size_t e = 0; e < rates.shells().size(); ++e) {
        const auto& shell = rates.shells()[e];
        ShellValidity sv;
        sv.energy = shell.energy;
        double rate_sum = 0.0;
        for (const auto& [i, a] : shell.sectors) {
            const double pi = p.population(i, a);
            sv.occupation += pi;
            for (std::size_t m = 0; m < rates.levels(); ++m) {
                for (std::size_t b = 0; b < rates.bands(); ++b) sv.growth += pi * rates(m, i, b, a);
            }
        }
        if (sv.occupation <= 0.0) continue;
        for (std::size_t m = 0; m < rates.levels(); ++m) {
            for (std::size_t i = 0; i < rates.levels(); ++i) rate_sum += rates.shell_rate(e, m, i);
        }
        sv.horizon = rate_sum > 0.0 ? static_cast<double>(rates.levels()) / rate_sum
                                    : std::numeric_limits<double>::infinity();
        sv.valid = sv.horizon > rep.tau_c;
        rep.valid = rep.valid && sv.valid;
        rep.growth += sv.growth;
        rep.shells.push_back(sv);
    }
    return rep;
}

double hilbert_variance(const Eigen::MatrixXcd& s) {
    if (s.rows() != s.cols() || s.rows() == 0) throw SpecificationError("hilbert_variance: need a square operator");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw SpecificationError("hilbert_variance: operator is not Hermitian");
    }
    const double n = static_cast<double>(s.rows());
    const double tr = s.trace().real();
    const double tr2 = (s.cwiseAbs2()).sum(); // tr(S^2) = sum |S_kl|^2 for Hermitian S
    return std::max(0.0, (tr2 / n - (tr / n) * (tr / n)) / (n + 1.0));
}

TimeSeries rho_11_series(const Trajectory& traj) {
    TimeSeries s;
    s.t = traj.times();
    s.value = traj.rho_series(1, 1);
    return s;
}

namespace {

double interpolate(const TimeSeries& s, double t, std::size_t& cursor) {
    while (cursor + 1 < s.t.size() && s.t[cursor + 1] < t) ++cursor;
    if (cursor + 1 >= s.t.size()) return s.value.back();
    const double t0 = s.t[cursor], t1 = s.t[cursor + 1];
    if (t <= t0) return s.value[cursor];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * s.value[cursor] + w * s.value[cursor + 1];
}

} // namespace

double deviation_D2(const TimeSeries& exact, const TimeSeries& predicted, double t1, int nu) {
    if (!(t1 > 0.0) || nu < 1) throw SpecificationError("deviation_D2: need T1 > 0 and nu >= 1");
    const double end = t1 * nu;
    for (const auto* s : {&exact, &predicted}) {
        if (s->t.size() != s->value.size() || s->t.size() < 2) throw SpecificationError("deviation_D2: bad series");
        const double slack = 1e-9 * end;
        if (s->t.front() > slack || s->t.back() < end - slack) {
            throw RefusalError("deviation_D2: a trajectory does not cover [0, nu T1]");
        }
    }
    std::vector<double> grid;
    for (const auto* s : {&exact, &predicted}) {
        for (double t : s->t) {
            if (t >= 0.0 && t <= end) grid.push_back(t);
        }
    }
    grid.push_back(0.0);
    grid.push_back(end);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::size_t ce = 0, cp = 0;
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double d = interpolate(exact, grid[k], ce) - interpolate(predicted, grid[k], cp);
        const double sq = d * d;
        if (k > 0) acc += 0.5 * (grid[k] - grid[k - 1]) * (sq + prev);
        prev = sq;
    }
    return acc / end;
}

double deviation_D2(const Trajectory& exact, const Trajectory& predicted, double t1, int nu) {
    return deviation_D2(rho_11_series(exact), rho_11_series(predicted), t1, nu);
}

namespace {

struct DysonTerms {
    Eigen::MatrixXcd u1;
    Eigen::MatrixXcd u2;
};

// V(s)_kl = V_kl exp(i (h_k - h_l) s); per interval [s, s+h] Simpson for
// W = int V and for int V W, with W at the midpoint from a half-interval
// Simpson step.
DysonTerms dyson_quadrature(const Eigen::MatrixXcd& v, const Eigen::VectorXd& h_loc, double t, double tau,
                            std::size_t steps) {
    const auto n = v.rows();
    auto vt = [&](double s) {
        Eigen::VectorXcd ph(n);
        for (Eigen::Index k = 0; k < n; ++k) ph(k) = std::exp(cd(0.0, h_loc(k) * s));
        return Eigen::MatrixXcd(ph.asDiagonal() * v * ph.conjugate().asDiagonal());
    };
    const double h = tau / static_cast<double>(steps);
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd u2 = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd v0 = vt(t);
    for (std::size_t k = 0; k < steps; ++k) {
        const double s0 = t + h * static_cast<double>(k);
        const Eigen::MatrixXcd vq = vt(s0 + 0.25 * h);
        const Eigen::MatrixXcd vm = vt(s0 + 0.5 * h);
        const Eigen::MatrixXcd vq3 = vt(s0 + 0.75 * h);
        const Eigen::MatrixXcd v1 = vt(s0 + h);
        const Eigen::MatrixXcd w_mid = w + (0.5 * h / 6.0) * (v0 + 4.0 * vq + vm);
        const Eigen::MatrixXcd w_end = w_mid + (0.5 * h / 6.0) * (vm + 4.0 * vq3 + v1);
        u2 += (h / 6.0) * (v0 * w + 4.0 * (vm * w_mid) + v1 * w_end);
        w = w_end;
        v0 = v1;
    }
    return {w, u2};
}

} // namespace

DysonReport verify_dyson_trace(const ModelSpec& small_spec, std::uint64_t seed, double t, double tau,
                               double quadrature_tolerance) {
    small_spec.validate();
    const BasisLayout layout(small_spec);
    DysonReport rep;
    rep.dimension = layout.total_dimension();
    if (rep.dimension > 64) throw RefusalError("verify_dyson_trace: brute force is limited to 64 basis states");
    if (!(tau > 0.0)) throw SpecificationError("verify_dyson_trace: tau must be positive");

    const auto v_int = sample_interaction(small_spec, seed);
    const Eigen::MatrixXcd v = v_int.dense();
    const Eigen::VectorXd h_loc = build_local_hamiltonian(small_spec);

    // step size: resolve both the bath correlation time and the fastest phase
    double omega_max = 0.0;
    double tau_c = std::numeric_limits<double>::infinity();
    for (const auto& blk : small_spec.blocks) {
        for (const auto& key : {blk.key, blk.key.adjoint()}) {
            const auto sp = correlation_spectrum(v_int, small_spec, key);
            if (sp.weights.empty()) continue;
            omega_max = std::max(omega_max, sp.max_abs_frequency());
            tau_c = std::min(tau_c, sp.correlation_time());
        }
    }
    double h = tau;
    if (std::isfinite(tau_c)) h = std::min(h, tau_c / 50.0);
    if (omega_max > 0.0) h = std::min(h, 0.4 / omega_max);
    auto steps = static_cast<std::size_t>(std::ceil(tau / h));
    steps = std::max<std::size_t>(steps, 4);

    const auto coarse = dyson_quadrature(v, h_loc, t, tau, steps);
    const auto fine = dyson_quadrature(v, h_loc, t, tau, 2 * steps);
    rep.quadrature_steps = 2 * steps;
    const double scale1 = std::max(fine.u1.norm(), 1e-300);
    const double scale2 = std::max(fine.u2.norm(), 1e-300);
    rep.quadrature_change = std::max((fine.u1 - coarse.u1).norm() / scale1, (fine.u2 - coarse.u2).norm() / scale2);
    if (v.norm() == 0.0) rep.quadrature_change = 0.0;
    rep.converged = rep.quadrature_change <= quadrature_tolerance;
    const auto& u1 = fine.u1;
    const auto& u2 = fine.u2;
    const auto n = static_cast<Eigen::Index>(rep.dimension);
    const Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Identity(n, n) - cd(0.0, 1.0) * u1 - u2;

    // f_{ij,ab}(tau) for every directed block, from the grouped spectra
    const std::size_t ns = layout.system_dimension();
    const std::size_t nb = layout.band_count();
    auto f_of = [&](std::size_t i, std::size_t j, std::size_t a, std::size_t b) -> cd {
        const BlockKey key{i, j, a, b};
        if (!v_int.contains(key)) return 0.0;
        return correlation_spectrum(v_int, small_spec, key).f(tau);
    };
    std::vector<cd> f(ns * ns * nb * nb);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            for (std::size_t a = 0; a < nb; ++a)
                for (std::size_t b = 0; b < nb; ++b) f[((i * ns + j) * nb + a) * nb + b] = f_of(i, j, a, b);
    auto fk = [&](std::size_t i, std::size_t j, std::size_t a, std::size_t b) {
        return f[((i * ns + j) * nb + a) * nb + b];
    };

    std::vector<Eigen::MatrixXcd> proj;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < ns; ++j)
            for (std::size_t a = 0; a < nb; ++a) proj.emplace_back(Eigen::MatrixXcd(composite_projector(layout, i, j, a)));
    auto p_of = [&](std::size_t i, std::size_t j, std::size_t a) -> const Eigen::MatrixXcd& {
        return proj[(i * ns + j) * nb + a];
    };

    double max_na = 0.0;
    for (std::size_t a = 0; a < nb; ++a) max_na = std::max(max_na, static_cast<double>(layout.band_size(a)));
    double lambda_max = 0.0;
    for (const auto& blk : small_spec.blocks) lambda_max = std::max(lambda_max, blk.strength);
    rep.coupling_scale = lambda_max * std::sqrt(max_na) * tau;

    double resid = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j)
    for (std::size_t a = 0; a < nb; ++a)
    for (std::size_t ip = 0; ip < ns; ++ip)
    for (std::size_t jp = 0; jp < ns; ++jp)
    for (std::size_t ap = 0; ap < nb; ++ap) {
        const auto& p = p_of(i, j, a);
        const auto& pp = p_of(ip, jp, ap);
        const cd s0 = (p * pp).trace();
        const double s0_expected = (ip == j && jp == i && ap == a) ? static_cast<double>(layout.band_size(a)) : 0.0;
        rep.zeroth_order_error = std::max(rep.zeroth_order_error, std::abs(s0 - s0_expected));

        const cd s1 = cd(0.0, 1.0) * ((u1 * p * pp).trace() - (p * u1 * pp).trace());
        rep.first_order = std::max(rep.first_order, std::abs(s1) / max_na);

        const cd s2 = (u1 * p * u1 * pp).trace() - (u2.adjoint() * p * pp).trace() - (p * u2 * pp).trace();
        cd closed = 0.0;
        if (i == j && ip == jp) closed += 2.0 * fk(i, ip, a, ap).real();
        if (j == ip && jp == i && ap == a) {
            for (std::size_t m = 0; m < ns; ++m) {
                for (std::size_t b = 0; b < nb; ++b) closed -= std::conj(fk(i, m, a, b)) + fk(j, m, a, b);
            }
        }
        resid += std::abs(s2 - closed);
        norm += std::abs(closed);

        const cd full = (d2.adjoint() * p * d2 * pp).trace();
        rep.full_trace_error = std::max(rep.full_trace_error, std::abs(full - s0 - s1 - s2));
    }
    rep.second_order_residual = norm > 0.0 ? resid / norm : 0.0;
    return rep;
}

double fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y, double floor) {
    if (t.size() != y.size()) throw SpecificationError("fit_exponential_decay: size mismatch");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double a = std::abs(y[k]);
        if (!(a > floor)) break;
        const double ly = std::log(a);
        sx += t[k];
        sy += ly;
        sxx += t[k] * t[k];
        sxy += t[k] * ly;
        ++m;
    }
    if (m < 3) throw RefusalError("fit_exponential_decay: signal drops below the floor too early");
    const double md = static_cast<double>(m);
    const double slope = (md * sxy - sx * sy) / (md * sxx - sx * sx);
    if (!(slope < 0.0)) return std::numeric_limits<double>::infinity();
    return -1.0 / slope;
}

} // namespace thermostat
