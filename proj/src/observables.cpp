// observables.cpp
#include "thermostat/observables.hpp"

#include "thermostat/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace thermostat {

const char* to_string(Engine e) noexcept {
    switch (e) {
    case Engine::exact: return "exact";
    case Engine::ham_ode: return "ham-ode";
    case Engine::ham_map: return "ham-map";
    case Engine::closed_form: return "closed-form";
    }
    return "?";
}

Engine engine_from_string(const std::string& name) {
    for (auto e : {Engine::exact, Engine::ham_ode, Engine::ham_map, Engine::closed_form}) {
        if (name == to_string(e)) return e;
    }
    throw SpecificationError("unknown engine '" + name + "'");
}

ObservableSet::ObservableSet(std::size_t levels, std::size_t bands, double t)
    : levels_(levels), bands_(bands), t_(t), values_(levels * levels * bands) {}

std::complex<double>& ObservableSet::operator()(std::size_t i, std::size_t j, std::size_t a) {
    return values_.at((i * levels_ + j) * bands_ + a);
}

std::complex<double> ObservableSet::operator()(std::size_t i, std::size_t j, std::size_t a) const {
    return values_.at((i * levels_ + j) * bands_ + a);
}

std::complex<double> ObservableSet::rho(std::size_t i, std::size_t j) const {
    std::complex<double> s = 0.0;
    for (std::size_t a = 0; a < bands_; ++a) s += (*this)(i, j, a);
    return s;
}

double ObservableSet::rho_abs_sq(std::size_t i, std::size_t j) const {
    if (phase_resolved_ || i == j) return std::norm(rho(i, j));
    double s = 0.0;
    for (std::size_t a = 0; a < bands_; ++a) s += abs_sq(i, j, a);
    return s;
}

double ObservableSet::total_population() const {
    double s = 0.0;
    for (std::size_t i = 0; i < levels_; ++i) s += rho(i, i).real();
    return s;
}

Eigen::MatrixXcd ObservableSet::reduced_matrix() const {
    const auto n = static_cast<Eigen::Index>(levels_);
    Eigen::MatrixXcd r(n, n);
    for (std::size_t i = 0; i < levels_; ++i) {
        for (std::size_t j = 0; j < levels_; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (i == j) {
                r(ii, jj) = rho(i, i).real();
            } else if (phase_resolved_) {
                r(ii, jj) = rho(i, j);
            } else {
                r(ii, jj) = std::sqrt(rho_abs_sq(i, j));
            }
        }
    }
    return r;
}

double ObservableSet::entropy() const {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reduced_matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double p = es.eigenvalues()(k);
        if (p > 1e-300) s -= p * std::log(p);
    }
    return s;
}

std::vector<double> Trajectory::times() const {
    std::vector<double> t;
    t.reserve(points.size());
    for (const auto& p : points) t.push_back(p.time());
    return t;
}

std::vector<double> Trajectory::rho_series(std::size_t i, std::size_t j) const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.rho(i, j).real());
    return v;
}

std::vector<double> Trajectory::rho_abs_sq_series(std::size_t i, std::size_t j) const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.rho_abs_sq(i, j));
    return v;
}

void Trajectory::push(ObservableSet p) {
    if (!points.empty() && !(p.time() > points.back().time())) {
        throw InternalError("trajectory times must be strictly increasing");
    }
    points.push_back(std::move(p));
}

std::vector<double> uniform_grid(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw SpecificationError("time grid needs dt > 0 and t_end >= 0");
    const auto steps = static_cast<std::size_t>(std::llround(std::floor(t_end / dt + 1e-9)));
    std::vector<double> g(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) g[k] = static_cast<double>(k) * dt;
    return g;
}

std::string csv_header(std::size_t levels, std::size_t bands) {
    std::string h = "t";
    for (std::size_t a = 0; a < bands; ++a) {
        for (std::size_t i = 0; i < levels; ++i) {
            h += ",P_" + std::to_string(i) + std::to_string(i) + "_" + std::to_string(a + 1);
        }
    }
    for (std::size_t i = 0; i < levels; ++i) {
        for (std::size_t j = i + 1; j < levels; ++j) {
            for (std::size_t a = 0; a < bands; ++a) {
                const auto tag = std::to_string(i) + std::to_string(j) + "_" + std::to_string(a + 1);
                h += ",Re_P_" + tag + ",Im_P_" + tag;
            }
        }
    }
    h += ",rho_11,abs_rho_01_sq,S_vN";
    return h;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
    if (traj.points.empty()) return;
    const auto ns = traj.points.front().levels();
    const auto nb = traj.points.front().bands();
    out << csv_header(ns, nb) << "\n";
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.10g", v);
        out << buf;
    };
    for (const auto& p : traj.points) {
        std::snprintf(buf, sizeof buf, "%.10g", p.time());
        out << buf;
        for (std::size_t a = 0; a < nb; ++a) {
            for (std::size_t i = 0; i < ns; ++i) put(p.population(i, a));
        }
        for (std::size_t i = 0; i < ns; ++i) {
            for (std::size_t j = i + 1; j < ns; ++j) {
                for (std::size_t a = 0; a < nb; ++a) {
                    put(p(i, j, a).real());
                    put(p(i, j, a).imag());
                }
            }
        }
        put(ns > 1 ? p.rho(1, 1).real() : 0.0);
        put(ns > 1 ? p.rho_abs_sq(0, 1) : 0.0);
        put(p.entropy());
        out << "\n";
    }
}

void write_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw SpecificationError("cannot write '" + path + "'");
    write_csv(out, traj);
}

} // namespace thermostat
