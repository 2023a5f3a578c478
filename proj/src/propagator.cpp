// propagator.cpp - component-wise diagonalization and phase evolution
#include "thermostat/propagator.hpp"

#include "thermostat/errors.hpp"
#include "thermostat/random.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace thermostat {
namespace {

constexpr Eigen::Index batch_size = 128;

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

void hermitian_eigen(Eigen::MatrixXcd& h, Eigen::VectorXd& w, Eigen::MatrixXcd& z) {
    const auto n = static_cast<lapack_int>(h.rows());
    w.resize(n);
    z.resize(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, h.data(), n, 0.0, 0.0, 0, 0, 0.0,
                                           &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != n) {
        throw InternalError("zheevr failed (info = " + std::to_string(info) + ")");
    }
}

} // namespace

EigenSystem::EigenSystem(BasisLayout layout, std::vector<EigenComponent> components)
    : layout_(std::move(layout)), components_(std::move(components)) {}

Eigen::VectorXd EigenSystem::eigenvalues() const {
    Eigen::VectorXd all(static_cast<Eigen::Index>(dimension()));
    Eigen::Index k = 0;
    for (const auto& c : components_) {
        all.segment(k, c.energies.size()) = c.energies;
        k += c.energies.size();
    }
    std::sort(all.data(), all.data() + all.size());
    return all;
}

double EigenSystem::max_residual(const Eigen::VectorXd& h_loc, const InteractionMatrix& v) const {
    double worst = 0.0;
    std::vector<Eigen::Index> local(dimension(), -1);
    for (const auto& c : components_) {
        const auto n = static_cast<Eigen::Index>(c.indices.size());
        std::fill(local.begin(), local.end(), -1);
        for (Eigen::Index k = 0; k < n; ++k) local[static_cast<std::size_t>(c.indices[k])] = k;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) h(k, k) = h_loc(c.indices[k]);
        v.accumulate(h, local);
        const Eigen::MatrixXcd r = h * c.vectors - c.vectors * c.energies.asDiagonal();
        worst = std::max(worst, r.colwise().norm().maxCoeff());
    }
    return worst;
}

double EigenSystem::max_unitarity_error() const {
    double worst = 0.0;
    for (const auto& c : components_) {
        const auto n = c.vectors.cols();
        const Eigen::MatrixXcd g = c.vectors.adjoint() * c.vectors - Eigen::MatrixXcd::Identity(n, n);
        worst = std::max(worst, g.cwiseAbs().maxCoeff());
    }
    return worst;
}

EigenSystem diagonalize(const Eigen::VectorXd& h_loc, const InteractionMatrix& v, std::size_t cap) {
    const auto& layout = v.layout();
    const std::size_t n_tot = layout.total_dimension();
    if (static_cast<std::size_t>(h_loc.size()) != n_tot) {
        throw InternalError("local Hamiltonian and interaction disagree on the dimension");
    }
    if (n_tot > cap) {
        throw RefusalError("model dimension " + std::to_string(n_tot) + " exceeds the diagonalization cap of " +
                           std::to_string(cap) +
                           "; reduce the band level counts or raise the cap (dense cost grows as N^3)");
    }

    const std::size_t nb = layout.band_count();
    const std::size_t sectors = layout.system_dimension() * nb;
    std::vector<std::size_t> parent(sectors);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& k : v.keys()) {
        const auto r1 = find_root(parent, k.i * nb + k.a);
        const auto r2 = find_root(parent, k.j * nb + k.b);
        if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
    }

    std::vector<EigenComponent> components;
    std::vector<Eigen::Index> local(n_tot, -1);
    for (std::size_t root = 0; root < sectors; ++root) {
        if (find_root(parent, root) != root) continue;
        EigenComponent comp;
        for (std::size_t s = 0; s < sectors; ++s) {
            if (find_root(parent, s) != root) continue;
            const std::size_t start = layout.sector_start(s / nb, s % nb);
            for (std::size_t n = 0; n < layout.band_size(s % nb); ++n) {
                comp.indices.push_back(static_cast<Eigen::Index>(start + n));
            }
        }
        std::sort(comp.indices.begin(), comp.indices.end());
        const auto n = static_cast<Eigen::Index>(comp.indices.size());
        std::fill(local.begin(), local.end(), -1);
        for (Eigen::Index k = 0; k < n; ++k) local[static_cast<std::size_t>(comp.indices[k])] = k;

        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) h(k, k) = h_loc(comp.indices[k]);
        v.accumulate(h, local);
        const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-14 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
            throw InternalError("Hamiltonian is not Hermitian");
        }
        hermitian_eigen(h, comp.energies, comp.vectors);
        components.push_back(std::move(comp));
    }
    return EigenSystem(layout, std::move(components));
}

Evolver::Evolver(const EigenSystem& eig, const PureState& psi0) : eig_(&eig) {
    if (static_cast<std::size_t>(psi0.amplitudes.size()) != eig.dimension()) {
        throw SpecificationError("initial state has the wrong dimension");
    }
    const auto& comps = eig.components();
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto& comp = comps[c];
        const auto n = static_cast<Eigen::Index>(comp.indices.size());
        Eigen::VectorXcd part(n);
        for (Eigen::Index k = 0; k < n; ++k) part(k) = psi0.amplitudes(comp.indices[k]);
        if (part.squaredNorm() == 0.0) continue;
        active_.push_back({c, comp.vectors.adjoint() * part});
    }
}

PureState Evolver::state(double t) const {
    PureState psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(eig_->dimension()))};
    for (const auto& act : active_) {
        const auto& comp = eig_->components()[act.component];
        const Eigen::VectorXcd phased =
            act.coefficients.cwiseProduct((comp.energies * std::complex<double>(0.0, -t)).array().exp().matrix());
        const Eigen::VectorXcd part = comp.vectors * phased;
        for (Eigen::Index k = 0; k < part.size(); ++k) psi.amplitudes(comp.indices[k]) = part(k);
    }
    return psi;
}

Trajectory Evolver::observe(const std::vector<double>& times) const {
    Trajectory traj;
    traj.provenance.engine = Engine::exact;
    const auto n_tot = static_cast<Eigen::Index>(eig_->dimension());
    const auto nt = static_cast<Eigen::Index>(times.size());
    for (Eigen::Index t0 = 0; t0 < nt; t0 += batch_size) {
        const Eigen::Index nb = std::min(batch_size, nt - t0);
        Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(n_tot, nb);
        for (const auto& act : active_) {
            const auto& comp = eig_->components()[act.component];
            Eigen::MatrixXcd phased(act.coefficients.size(), nb);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const double t = times[static_cast<std::size_t>(t0 + b)];
                phased.col(b) = act.coefficients.cwiseProduct(
                    (comp.energies * std::complex<double>(0.0, -t)).array().exp().matrix());
            }
            const Eigen::MatrixXcd part = comp.vectors * phased;
            for (Eigen::Index k = 0; k < part.rows(); ++k) psi.row(comp.indices[k]) = part.row(k);
        }
        for (Eigen::Index b = 0; b < nb; ++b) {
            traj.push(measure(psi.col(b), eig_->layout(), times[static_cast<std::size_t>(t0 + b)]));
        }
    }
    return traj;
}

std::vector<double> Evolver::level_population(const std::vector<double>& times, std::size_t level) const {
    const auto& layout = eig_->layout();
    if (level >= layout.system_dimension()) throw std::out_of_range("level_population: level out of range");
    const auto lo = static_cast<Eigen::Index>(level * layout.environment_dimension());
    const auto hi = lo + static_cast<Eigen::Index>(layout.environment_dimension());
    std::vector<double> out(times.size(), 0.0);
    const auto nt = static_cast<Eigen::Index>(times.size());
    for (const auto& act : active_) {
        const auto& comp = eig_->components()[act.component];
        std::vector<Eigen::Index> rows;
        for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(comp.indices.size()); ++k) {
            if (comp.indices[k] >= lo && comp.indices[k] < hi) rows.push_back(k);
        }
        if (rows.empty()) continue;
        const Eigen::MatrixXcd sub = comp.vectors(rows, Eigen::all);
        for (Eigen::Index t0 = 0; t0 < nt; t0 += batch_size) {
            const Eigen::Index nb = std::min(batch_size, nt - t0);
            Eigen::MatrixXcd phased(act.coefficients.size(), nb);
            for (Eigen::Index b = 0; b < nb; ++b) {
                const double t = times[static_cast<std::size_t>(t0 + b)];
                phased.col(b) = act.coefficients.cwiseProduct(
                    (comp.energies * std::complex<double>(0.0, -t)).array().exp().matrix());
            }
            const Eigen::MatrixXcd part = sub * phased;
            const Eigen::RowVectorXd pops = part.cwiseAbs2().colwise().sum();
            for (Eigen::Index b = 0; b < nb; ++b) out[static_cast<std::size_t>(t0 + b)] += pops(b);
        }
    }
    return out;
}

PureState evolve(const EigenSystem& eig, const PureState& psi0, double t) {
    if (t < 0.0) throw SpecificationError("evolve: negative time");
    return Evolver(eig, psi0).state(t);
}

ObservableSet measure(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisLayout& layout, double t) {
    const std::size_t ns = layout.system_dimension();
    const std::size_t nb = layout.band_count();
    if (static_cast<std::size_t>(psi.size()) != layout.total_dimension()) {
        throw SpecificationError("measure: state has the wrong dimension");
    }
    ObservableSet obs(ns, nb, t);
    for (std::size_t a = 0; a < nb; ++a) {
        const auto len = static_cast<Eigen::Index>(layout.band_size(a));
        for (std::size_t i = 0; i < ns; ++i) {
            const auto si = psi.segment(static_cast<Eigen::Index>(layout.sector_start(i, a)), len);
            for (std::size_t j = i; j < ns; ++j) {
                const auto sj = psi.segment(static_cast<Eigen::Index>(layout.sector_start(j, a)), len);
                const std::complex<double> p = si.dot(sj); // conjugates the first argument
                if (i == j) {
                    obs(i, i, a) = p.real();
                } else {
                    obs(i, j, a) = p;
                    obs(j, i, a) = std::conj(p);
                }
            }
        }
    }
    return obs;
}

ObservableSet measure(const PureState& psi, const BasisLayout& layout, double t) {
    return measure(psi.amplitudes, layout, t);
}

namespace {

Eigen::VectorXcd haar_vector(std::size_t n, std::uint64_t seed) {
    rng::GaussianStream g(seed);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = g.complex_normal(1.0);
    return v / v.norm();
}

void check_weights(double total) {
    if (std::abs(total - 1.0) > 1e-12) {
        throw SpecificationError("initial-state weights must sum to 1 (got " + std::to_string(total) + ")");
    }
}

} // namespace

PureState sample_initial_state(const InitialStateRecipe& recipe, const BasisLayout& layout, std::uint64_t seed) {
    PureState psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dimension()))};
    if (const auto* p = std::get_if<ProductRecipe>(&recipe)) {
        if (p->system_amplitudes.size() != layout.system_dimension() || p->band_weights.size() != layout.band_count()) {
            throw SpecificationError("product recipe does not match the model dimensions");
        }
        double amp = 0.0;
        for (const auto& c : p->system_amplitudes) amp += std::norm(c);
        check_weights(amp);
        double total = 0.0;
        for (double w : p->band_weights) {
            if (w < 0.0) throw SpecificationError("band weights must be non-negative");
            total += w;
        }
        check_weights(total);
        Eigen::VectorXcd env = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.environment_dimension()));
        for (std::size_t a = 0; a < layout.band_count(); ++a) {
            if (p->band_weights[a] == 0.0) continue;
            env.segment(static_cast<Eigen::Index>(layout.band_offset(a)), static_cast<Eigen::Index>(layout.band_size(a))) =
                std::sqrt(p->band_weights[a]) * haar_vector(layout.band_size(a), rng::derive_seed(seed, {0, a}));
        }
        const auto ne = static_cast<Eigen::Index>(layout.environment_dimension());
        for (std::size_t i = 0; i < layout.system_dimension(); ++i) {
            psi.amplitudes.segment(static_cast<Eigen::Index>(i) * ne, ne) = p->system_amplitudes[i] * env;
        }
    } else {
        const auto& c = std::get<CorrelatedRecipe>(recipe);
        double total = 0.0;
        for (const auto& comp : c.components) {
            if (comp.level >= layout.system_dimension() || comp.band >= layout.band_count()) {
                throw SpecificationError("correlated recipe refers to a level or band outside the model");
            }
            if (comp.weight < 0.0) throw SpecificationError("component weights must be non-negative");
            total += comp.weight;
        }
        check_weights(total);
        for (std::size_t k = 0; k < c.components.size(); ++k) {
            const auto& comp = c.components[k];
            const auto len = static_cast<Eigen::Index>(layout.band_size(comp.band));
            psi.amplitudes.segment(static_cast<Eigen::Index>(layout.sector_start(comp.level, comp.band)), len) +=
                std::sqrt(comp.weight) *
                haar_vector(layout.band_size(comp.band), rng::derive_seed(seed, {1, comp.level, comp.band, k}));
        }
        const double n = psi.norm();
        if (std::abs(n - 1.0) > 1e-12) psi.amplitudes /= n; // repeated (level, band) pairs interfere
    }
    return psi;
}

} // namespace thermostat
