// interaction.cpp - sampling, coupling strengths and cross-trace statistics
#include "thermostat/interaction.hpp"

#include "thermostat/errors.hpp"
#include "thermostat/random.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermostat {

InteractionMatrix::InteractionMatrix(BasisLayout layout, std::uint64_t seed)
    : layout_(std::move(layout)), seed_(seed) {}

bool InteractionMatrix::contains(BlockKey key) const { return blocks_.count(key.normalized()) > 0; }

Eigen::MatrixXcd InteractionMatrix::block(BlockKey key) const {
    const auto norm = key.normalized();
    auto it = blocks_.find(norm);
    if (it == blocks_.end()) {
        return Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(layout_.band_size(key.a)),
                                      static_cast<Eigen::Index>(layout_.band_size(key.b)));
    }
    if (norm == key) return it->second;
    return it->second.adjoint();
}

void InteractionMatrix::set_block(BlockKey key, Eigen::MatrixXcd c) {
    const auto rows = static_cast<Eigen::Index>(layout_.band_size(key.a));
    const auto cols = static_cast<Eigen::Index>(layout_.band_size(key.b));
    if (c.rows() != rows || c.cols() != cols) throw SpecificationError("block " + to_string(key) + ": wrong shape");
    if (key.is_self_adjoint()) {
        if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 0.0) {
            throw InternalError("block " + to_string(key) + " must be Hermitian");
        }
    }
    const auto norm = key.normalized();
    blocks_[norm] = norm == key ? std::move(c) : Eigen::MatrixXcd(c.adjoint());
}

std::vector<BlockKey> InteractionMatrix::keys() const {
    std::vector<BlockKey> out;
    for (const auto& [k, m] : blocks_) out.push_back(k);
    return out;
}

void InteractionMatrix::accumulate(Eigen::MatrixXcd& target, const std::vector<Eigen::Index>& local) const {
    for (const auto& [key, c] : blocks_) {
        const auto r0 = local[layout_.sector_start(key.i, key.a)];
        const auto c0 = local[layout_.sector_start(key.j, key.b)];
        if (r0 < 0 && c0 < 0) continue;
        if (r0 < 0 || c0 < 0) throw InternalError("interaction block straddles a component boundary");
        // sectors are contiguous in flat order and kept contiguous in local order
        target.block(r0, c0, c.rows(), c.cols()) += c;
        if (!key.is_self_adjoint()) target.block(c0, r0, c.cols(), c.rows()) += c.adjoint();
    }
}

Eigen::MatrixXcd InteractionMatrix::dense() const {
    const auto n = static_cast<Eigen::Index>(layout_.total_dimension());
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);
    std::vector<Eigen::Index> local(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) local[static_cast<std::size_t>(k)] = k;
    accumulate(v, local);
    return v;
}

InteractionMatrix sample_interaction(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    InteractionMatrix v(BasisLayout(spec), seed);
    for (const auto& blk : spec.blocks) {
        const auto& k = blk.key;
        const auto na = static_cast<Eigen::Index>(spec.bands[k.a].level_count);
        const auto nb = static_cast<Eigen::Index>(spec.bands[k.b].level_count);
        if (na == 0 || nb == 0) throw SpecificationError("block " + to_string(k) + " has zero dimension");
        const double lambda = blk.strength;
        const double var = lambda * lambda;
        rng::GaussianStream gauss(rng::derive_seed(seed, {k.i, k.j, k.a, k.b}));
        Eigen::MatrixXcd c(na, nb);
        if (k.is_self_adjoint()) {
            for (Eigen::Index r = 0; r < na; ++r) {
                c(r, r) = std::sqrt(var) * gauss.standard_normal();
                for (Eigen::Index s = r + 1; s < nb; ++s) {
                    c(r, s) = gauss.complex_normal(var);
                    c(s, r) = std::conj(c(r, s));
                }
            }
        } else {
            for (Eigen::Index r = 0; r < na; ++r) {
                for (Eigen::Index s = 0; s < nb; ++s) c(r, s) = gauss.complex_normal(var);
            }
        }
        const double emp = c.norm() / std::sqrt(static_cast<double>(na * nb));
        if (lambda == 0.0 || emp == 0.0) {
            c.setZero();
        } else {
            c *= lambda / emp;
        }
        v.set_block(k, std::move(c));
    }
    return v;
}

double empirical_coupling(const InteractionMatrix& v, BlockKey key) {
    if (!v.contains(key)) return 0.0;
    const auto c = v.block(key);
    return c.norm() / std::sqrt(static_cast<double>(c.rows() * c.cols()));
}

DecorrelationReport decorrelation_report(const InteractionMatrix& v) {
    DecorrelationReport rep;
    const auto keys = v.keys();
    for (std::size_t p = 0; p < keys.size(); ++p) {
        for (std::size_t q = p + 1; q < keys.size(); ++q) {
            for (const auto& x : {keys[p], keys[p].adjoint()}) {
                for (const auto& y : {keys[q], keys[q].adjoint()}) {
                    if (x.a != y.a || x.b != y.b) continue;
                    if (keys[p].is_self_adjoint() && x != keys[p]) continue;
                    if (keys[q].is_self_adjoint() && y != keys[q]) continue;
                    const auto cx = v.block(x);
                    const auto cy = v.block(y);
                    const double lx = empirical_coupling(v, x);
                    const double ly = empirical_coupling(v, y);
                    if (lx == 0.0 || ly == 0.0) continue;
                    const double cross = std::abs((cx.array() * cy.conjugate().array()).sum());
                    const double value = cross / (lx * ly * static_cast<double>(cx.rows() * cx.cols()));
                    rep.pairs.push_back({x, y, value});
                    rep.max_value = std::max(rep.max_value, value);
                }
            }
        }
    }
    return rep;
}

void save_interaction(const InteractionMatrix& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SpecificationError("cannot write interaction file '" + path + "'");
    const auto keys = v.keys();
    out << "thermostat-interaction 1\n";
    out << "seed " << v.seed() << "\n";
    out << "blocks " << keys.size() << "\n";
    char buf[64];
    for (const auto& k : keys) {
        const auto c = v.block(k);
        out << "block " << k.i << " " << k.j << " " << k.a << " " << k.b << " " << c.rows() << " " << c.cols()
            << "\n";
        for (Eigen::Index r = 0; r < c.rows(); ++r) {
            for (Eigen::Index s = 0; s < c.cols(); ++s) {
                std::snprintf(buf, sizeof buf, "%s%.17g %.17g", s ? " " : "", c(r, s).real(), c(r, s).imag());
                out << buf;
            }
            out << "\n";
        }
    }
    if (!out) throw SpecificationError("error while writing '" + path + "'");
}

InteractionMatrix load_interaction(const ModelSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecificationError("cannot open interaction file '" + path + "'");
    std::string tag;
    int version = 0;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    std::string w1, w2;
    if (!(in >> tag >> version >> w1 >> seed >> w2 >> count) || tag != "thermostat-interaction" || version != 1 ||
        w1 != "seed" || w2 != "blocks") {
        throw SpecificationError("'" + path + "' is not an interaction dump");
    }
    spec.validate();
    InteractionMatrix v(BasisLayout(spec), seed);
    for (std::size_t n = 0; n < count; ++n) {
        std::string word;
        BlockKey k;
        Eigen::Index rows = 0, cols = 0;
        if (!(in >> word >> k.i >> k.j >> k.a >> k.b >> rows >> cols) || word != "block") {
            throw SpecificationError("'" + path + "': malformed block header");
        }
        if (!spec.find_block(k)) throw SpecificationError("'" + path + "': block " + to_string(k) + " not in model");
        Eigen::MatrixXcd c(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index s = 0; s < cols; ++s) {
                double re = 0.0, im = 0.0;
                if (!(in >> re >> im)) throw SpecificationError("'" + path + "': truncated block data");
                c(r, s) = {re, im};
            }
        }
        v.set_block(k, std::move(c));
    }
    return v;
}

} // namespace thermostat
