#include "generators.hpp"

#include "thermostat/errors.hpp"
#include "thermostat/interaction.hpp"
#include "thermostat/propagator.hpp"
#include "thermostat/scenario.hpp"

#include <doctest.h>

using namespace thermostat;
using cd = std::complex<double>;

namespace {

struct Small {
    ModelSpec spec;
    InteractionMatrix v;
    Eigen::VectorXd h;
    EigenSystem eig;
    Eigen::MatrixXcd dense_h;
};

Small make_small(std::size_t n, double lambda, std::uint64_t seed) {
    Small s;
    s.spec = two_band_model(n, lambda);
    s.spec.blocks.push_back({BlockKey{0, 0, 0, 0}, lambda});
    s.spec.validate();
    s.v = sample_interaction(s.spec, seed);
    s.h = build_local_hamiltonian(s.spec);
    s.eig = diagonalize(s.h, s.v);
    s.dense_h = s.v.dense();
    s.dense_h.diagonal() += s.h.cast<cd>();
    return s;
}

PureState random_state(gen::Source& src, std::size_t n) {
    PureState p;
    p.amplitudes.resize(static_cast<Eigen::Index>(n));
    for (auto& a : p.amplitudes) a = cd(src.uniform(-1, 1), src.uniform(-1, 1));
    p.amplitudes.normalize();
    return p;
}

} // namespace

TEST_SUITE("propagator") {

TEST_CASE("without coupling the eigenvalues are the local energies") {
    const auto spec = two_band_model(30, 0.0);
    const auto h = build_local_hamiltonian(spec);
    const auto eig = diagonalize(h, sample_interaction(spec, 1));
    Eigen::VectorXd sorted = h;
    std::sort(sorted.begin(), sorted.end());
    CHECK((eig.eigenvalues() - sorted).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("decomposition quality") {
    const auto s = make_small(40, 5e-3, 4);
    const auto ev = s.eig.eigenvalues();
    CHECK(std::abs(ev.sum() - s.dense_h.trace().real()) <= 1e-6 * std::abs(s.dense_h.trace().real()));
    CHECK(s.eig.max_residual(s.h, s.v) < 1e-10);
    CHECK(s.eig.max_unitarity_error() < 1e-10);
    // same spectrum as a dense solve of the full matrix
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(s.dense_h);
    CHECK((full.eigenvalues() - ev).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dimension cap") {
    const auto spec = two_band_model(30, 1e-3);
    CHECK_THROWS_AS(diagonalize(build_local_hamiltonian(spec), sample_interaction(spec, 1), 100), RefusalError);
}

TEST_CASE("evolution: identity at zero, norm, energy and composition") {
    const auto s = make_small(25, 5e-3, 8);
    gen::Source src(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = random_state(src, s.eig.dimension());
        CHECK((evolve(s.eig, psi, 0.0).amplitudes - psi.amplitudes).norm() < 1e-12);
        const double e0 = psi.amplitudes.dot(s.dense_h * psi.amplitudes).real();
        const double t1 = src.uniform(0.0, 3000.0);
        const double t2 = src.uniform(0.0, 3000.0);
        const auto a = evolve(s.eig, psi, t1);
        CHECK(std::abs(a.norm() - 1.0) < 1e-8);
        CHECK(std::abs(a.amplitudes.dot(s.dense_h * a.amplitudes).real() - e0) < 1e-8);
        const auto composed = evolve(s.eig, a, t2);
        CHECK((composed.amplitudes - evolve(s.eig, psi, t1 + t2).amplitudes).norm() < 1e-8);
    }
}

TEST_CASE("evolution matches a dense matrix exponential") {
    const auto s = make_small(10, 2e-2, 2);
    gen::Source src(9);
    const auto psi = random_state(src, s.eig.dimension());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> full(s.dense_h);
    const double t = 37.5;
    const Eigen::VectorXcd phase = (full.eigenvalues().cast<cd>() * cd(0.0, -t)).array().exp();
    const Eigen::VectorXcd expected =
        full.eigenvectors() * phase.asDiagonal() * full.eigenvectors().adjoint() * psi.amplitudes;
    CHECK((evolve(s.eig, psi, t).amplitudes - expected).norm() < 1e-10);
}

TEST_CASE("batched observation agrees with single snapshots") {
    const auto s = make_small(20, 5e-3, 5);
    gen::Source src(10);
    const auto psi = random_state(src, s.eig.dimension());
    const Evolver ev(s.eig, psi);
    const auto grid = uniform_grid(400.0, 0.5);
    const auto traj = ev.observe(grid);
    const auto pop = ev.level_population(grid, 1);
    REQUIRE(traj.points.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); k += 97) {
        const auto m = measure(evolve(s.eig, psi, grid[k]), s.eig.layout(), grid[k]);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(traj.points[k](i, j, a) - m(i, j, a)) < 1e-10);
        CHECK(std::abs(pop[k] - m.rho(1, 1).real()) < 1e-10);
    }
}

TEST_CASE("measure on basis states") {
    const auto spec = two_band_model(10, 0.0);
    const BasisLayout layout(spec);
    PureState psi;
    psi.amplitudes = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.total_dimension()));
    psi.amplitudes(static_cast<Eigen::Index>(layout.index(1, 0, 6))) = 1.0;
    auto p = measure(psi, layout);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t a = 0; a < 2; ++a) CHECK(p(i, j, a) == cd(i == 1 && j == 1 && a == 0 ? 1.0 : 0.0));

    psi.amplitudes.setZero();
    psi.amplitudes(static_cast<Eigen::Index>(layout.index(0, 1, 2))) = std::sqrt(0.5);
    psi.amplitudes(static_cast<Eigen::Index>(layout.index(1, 1, 2))) = std::sqrt(0.5);
    p = measure(psi, layout);
    CHECK(std::abs(p(0, 1, 1) - 0.5) < 1e-15);
    CHECK(std::abs(p.rho(0, 1) - 0.5) < 1e-15);
}

TEST_CASE("property: measured observables are consistent") {
    gen::Source src(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto spec = gen::small_model(src);
        const BasisLayout layout(spec);
        const auto p = measure(random_state(src, layout.total_dimension()), layout);
        CHECK(std::abs(p.total_population() - 1.0) < 1e-8);
        for (std::size_t i = 0; i < p.levels(); ++i)
            for (std::size_t a = 0; a < p.bands(); ++a) {
                CHECK(p(i, i, a).imag() == 0.0);
                CHECK(p.population(i, a) >= 0.0);
                CHECK(p.population(i, a) <= 1.0 + 1e-12);
                for (std::size_t j = 0; j < p.levels(); ++j) CHECK(std::abs(p(j, i, a) - std::conj(p(i, j, a))) < 1e-14);
            }
    }
}

TEST_CASE("initial state recipes") {
    const auto spec = two_band_model(50, 5e-4);
    const BasisLayout layout(spec);
    ProductRecipe excited{{0.0, 1.0}, {1.0, 0.0}};
    CorrelatedRecipe mixed{{{1, 0, 0.75}, {0, 1, 0.25}}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = sample_initial_state(excited, layout, seed);
        const auto b = sample_initial_state(mixed, layout, seed);
        CHECK(std::abs(a.norm() - 1.0) < 1e-12);
        CHECK(std::abs(b.norm() - 1.0) < 1e-12);
        const auto pa = measure(a, layout);
        CHECK(std::abs(pa.population(1, 0) - 1.0) < 1e-12);
        const auto pb = measure(b, layout);
        CHECK(std::abs(pb.population(1, 0) - 0.75) < 1e-12);
        CHECK(std::abs(pb.population(0, 1) - 0.25) < 1e-12);
        CHECK(pb(0, 1, 0) == cd(0.0));
    }
    CHECK((sample_initial_state(excited, layout, 4).amplitudes - sample_initial_state(excited, layout, 4).amplitudes)
              .norm() == 0.0);
    CHECK_THROWS_AS(sample_initial_state(CorrelatedRecipe{{{1, 0, 0.5}}}, layout, 1), SpecificationError);
}

TEST_CASE("weight stays inside the initially occupied energy shell") {
    const auto spec = two_band_model(100, 5e-4);
    const auto pm = prepare_model(spec, 3);
    const auto psi = sample_initial_state(ProductRecipe{{0.0, 1.0}, {1.0, 0.0}}, pm.eigen.layout(), 1);
    const auto traj = Evolver(pm.eigen, psi).observe(uniform_grid(3000.0, 50.0));
    for (const auto& p : traj.points) {
        // shell at E = 25: (1, lower) and (0, upper)
        CHECK(std::abs(p.population(1, 0) + p.population(0, 1) - 1.0) < 1e-3);
    }
}

} // TEST_SUITE
