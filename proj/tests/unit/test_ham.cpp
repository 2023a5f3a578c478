#include "generators.hpp"

#include "thermostat/errors.hpp"
#include "thermostat/ham.hpp"
#include "thermostat/scenario.hpp"

#include <doctest.h>

#include <numbers>

using namespace thermostat;
using cd = std::complex<double>;

namespace {

ObservableSet excited_lower(std::size_t bands = 2) {
    ObservableSet p(2, bands);
    p(1, 1, 0) = 1.0;
    return p;
}

} // namespace

TEST_SUITE("ham") {

TEST_CASE("golden-rule rate for the two-band model") {
    const auto rates = golden_rates(two_band_model(500, 5e-4));
    // 2 pi (5e-4)^2 500 / 0.5
    const double oracle = 2.0 * 3.141592653589793 * 2.5e-7 * 1000.0;
    CHECK(rates(0, 1, 1, 0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(rates(1, 0, 0, 1) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(oracle == doctest::Approx(1.5708e-3).epsilon(1e-4));
    CHECK(rates(0, 1, 0, 0) == 0.0); // off-resonant
    CHECK(rates(1, 0, 1, 1) == 0.0);
    CHECK(thermalization_time(rates) == doctest::Approx(318.31).epsilon(1e-4));
}

TEST_CASE("forward and backward rates scale with the target band size") {
    auto spec = two_band_model(500, 5e-4);
    spec.bands[1].level_count = 250; // upper band smaller
    const auto rates = golden_rates(spec);
    CHECK(rates(0, 1, 1, 0) / rates(1, 0, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("property: detailed balance of the rate table") {
    gen::Source src(41);
    for (int trial = 0; trial < 40; ++trial) {
        const auto spec = gen::resonant_model(src);
        const auto r = golden_rates(spec);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t m = 0; m < 2; ++m)
                for (std::size_t a = 0; a < r.bands(); ++a)
                    for (std::size_t b = 0; b < r.bands(); ++b) {
                        const double lhs = r(i, m, a, b) * static_cast<double>(r.band_size(b));
                        const double rhs = r(m, i, b, a) * static_cast<double>(r.band_size(a));
                        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
                    }
    }
}

TEST_CASE("rate equations relax to the dimension ratio") {
    const auto rates = golden_rates(two_band_model(500, 5e-4));
    const auto grid = uniform_grid(20.0 * 318.31, 5.0);
    const auto traj = integrate_rates(rates, excited_lower(), grid);
    CHECK(traj.points.back().rho(1, 1).real() == doctest::Approx(0.5).epsilon(1e-6));
    // 1/2 + 1/2 exp(-t / T_th)
    for (std::size_t k = 0; k < grid.size(); k += 50) {
        CHECK(traj.points[k].rho(1, 1).real() ==
              doctest::Approx(0.5 + 0.5 * std::exp(-grid[k] / 318.30988618379)).epsilon(1e-8));
    }

    auto spec = two_band_model(200, 5e-4);
    spec.bands[1].level_count = 100;
    const auto uneven = integrate_rates(golden_rates(spec), excited_lower(), uniform_grid(1e5, 100.0));
    CHECK(uneven.points.back().population(1, 0) == doctest::Approx(200.0 / 300.0).epsilon(1e-6));
}

TEST_CASE("zero rates leave everything constant") {
    const auto rates = golden_rates(two_band_model(20, 0.0));
    gen::Source src(1);
    const auto p0 = gen::valid_observables(src, 2, 2);
    const auto ode = integrate_rates(rates, p0, uniform_grid(100.0, 1.0));
    const auto map = iterate_map(rates, p0, 1.0, 100);
    for (const auto* traj : {&ode, &map.trajectory}) {
        for (const auto& p : traj->points) {
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(p.abs_sq(i, j, a) - p0.abs_sq(i, j, a)) < 1e-15);
        }
    }
}

TEST_CASE("property: conservation, positivity and monotone coherences") {
    gen::Source src(43);
    for (int trial = 0; trial < 30; ++trial) {
        const auto spec = gen::resonant_model(src);
        const auto rates = golden_rates(spec);
        const auto p0 = gen::valid_observables(src, 2, spec.band_count());
        const double t_th = thermalization_time(rates);
        const auto traj = integrate_rates(rates, p0, uniform_grid(5.0 * t_th, t_th / 20.0));
        for (std::size_t k = 0; k < traj.points.size(); ++k) {
            const auto& p = traj.points[k];
            CHECK(std::abs(p.total_population() - 1.0) < 1e-8);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t a = 0; a < p.bands(); ++a) {
                    CHECK(p.population(i, a) >= -1e-14);
                    CHECK(p.population(i, a) <= 1.0 + 1e-12);
                }
            if (k > 0) {
                for (std::size_t a = 0; a < p.bands(); ++a)
                    CHECK(p.abs_sq(0, 1, a) <= traj.points[k - 1].abs_sq(0, 1, a) * (1.0 + 1e-12));
            }
        }
        // per-shell equilibrium: occupation per dimension is equal in a shell
        const auto settled = integrate_rates(rates, p0, uniform_grid(200.0 * t_th, t_th / 5.0));
        const auto& last = settled.points.back();
        for (std::size_t a = 0; a + 1 < spec.band_count(); ++a) {
            const double x = last.population(1, a) / static_cast<double>(spec.bands[a].level_count);
            const double y = last.population(0, a + 1) / static_cast<double>(spec.bands[a + 1].level_count);
            if (x + y > 1e-6) CHECK(x == doctest::Approx(y).epsilon(1e-5));
        }
    }
}

TEST_CASE("discrete map against the rate equations") {
    const auto rates = golden_rates(two_band_model(500, 5e-4));
    const double t_th = thermalization_time(rates);
    const auto map = iterate_map(rates, excited_lower(), t_th / 100.0, 500);
    CHECK(map.warnings.empty());
    const auto ode = integrate_rates(rates, excited_lower(), map.trajectory.times());
    double worst = 0.0;
    for (std::size_t k = 0; k < ode.points.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t a = 0; a < 2; ++a)
                worst = std::max(worst, std::abs(ode.points[k].population(i, a) - map.trajectory.points[k].population(i, a)));
    CHECK(worst <= 1e-3);

    CHECK_FALSE(iterate_map(rates, excited_lower(), 0.1, 1).warnings.empty());   // below tau_c
    CHECK_FALSE(iterate_map(rates, excited_lower(), 5000.0, 1).warnings.empty()); // beyond tau_d
    CHECK_THROWS_AS(iterate_map(rates, excited_lower(), 0.0, 1), SpecificationError);
}

TEST_CASE("equal occupation per dimension is a fixed point of the map") {
    auto spec = two_band_model(300, 5e-4);
    spec.bands[1].level_count = 100;
    const auto rates = golden_rates(spec);
    ObservableSet p(2, 2);
    p(1, 1, 0) = 0.75; // 0.75 / 300 == 0.25 / 100
    p(0, 0, 1) = 0.25;
    const auto map = iterate_map(rates, p, 10.0, 5);
    CHECK(std::abs(map.trajectory.points.back().population(1, 0) - 0.75) < 1e-15);
}

TEST_CASE("three-band closed form") {
    const ThreeBandParams p{5e-4, 0.0, 500, 0.5, 0.0};
    CHECK(p.thermalization_time() == doctest::Approx(318.31).epsilon(1e-4));
    CHECK(p.decoherence_time() == doctest::Approx(636.62).epsilon(1e-4));
    CHECK(ThreeBandParams{5e-4, 5e-4, 500, 0.5, 0.0}.decoherence_time() ==
          doctest::Approx(p.thermalization_time()).epsilon(1e-12));

    gen::Source src(47);
    for (int trial = 0; trial < 10; ++trial) {
        const ThreeBandParams q{src.uniform(1e-4, 1e-3), src.uniform(0.0, 3e-3), src.pick(50, 800), 0.5, 0.0};
        const auto spec = three_band_model(q);
        const double w = src.uniform(0.0, 1.0);
        ObservableSet p0(2, 3);
        p0(0, 0, 1) = 1.0 - w;
        p0(1, 1, 1) = w;
        p0(0, 1, 1) = p0(1, 0, 1) = std::sqrt(w * (1.0 - w));
        const auto grid = uniform_grid(4.0 * q.thermalization_time(), q.thermalization_time() / 50.0);
        const auto ode = integrate_rates(golden_rates(spec), p0, grid);
        Eigen::Matrix2cd rho0;
        rho0 << 1.0 - w, std::sqrt(w * (1.0 - w)), std::sqrt(w * (1.0 - w)), w;
        const auto cf = closed_form_three_band(q, rho0, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK(std::abs(ode.points[k].rho(1, 1).real() - cf.trajectory.points[k].rho(1, 1).real()) < 1e-6);
            CHECK(std::abs(ode.points[k].rho_abs_sq(0, 1) - cf.trajectory.points[k].rho_abs_sq(0, 1)) < 1e-6);
        }
    }
}

TEST_CASE("reduced canonical rate system") {
    const Eigen::VectorXd energies = (Eigen::VectorXd(2) << 0.0, 25.0).finished();
    Eigen::MatrixXd forward = Eigen::MatrixXd::Zero(2, 2);
    forward(0, 1) = 1e-3; // 1 -> 0
    const auto sym = ReducedRateSystem::canonical(forward, energies, 0.0);
    CHECK(sym.equilibrium()(1) == doctest::Approx(0.5));
    const double beta = std::log(2.0) / 25.0;
    const auto hot = ReducedRateSystem::canonical(forward, energies, beta);
    const auto eq = hot.equilibrium();
    CHECK(eq(1) / eq(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(eq.sum() == doctest::Approx(1.0));
    CHECK(hot.derivative(eq).norm() < 1e-15);

    // single occupied shell: valid for any beta
    const auto rates = golden_rates(two_band_model(500, 5e-4));
    const auto p0 = excited_lower();
    for (double b : {0.0, 0.1, 3.0}) CHECK_NOTHROW(reduce_canonical(rates, b, &p0));

    // bands sized so that N_a exp(-beta E_a) is constant
    ModelSpec spec = two_band_model(100, 5e-4);
    spec.bands[1].level_count = 200;
    const auto r = reduce_canonical(golden_rates(spec), beta);
    const auto e2 = r.equilibrium();
    CHECK(e2(1) / e2(0) == doctest::Approx(0.5).epsilon(1e-6));

    // three bands, equal sizes, two shells occupied: inconsistent with beta > 0
    const auto three = three_band_model({5e-4, 0.0, 100, 0.5, 0.0});
    ObservableSet spread(2, 3);
    spread(0, 0, 0) = 0.5;
    spread(0, 0, 2) = 0.5;
    CHECK_THROWS_AS(reduce_canonical(golden_rates(three), 0.2, &spread), RefusalError);
}

TEST_CASE("hilbert average state") {
    const auto spec = two_band_model(6, 1e-3);
    const BasisLayout layout(spec);
    ObservableSet single(2, 2);
    single(0, 0, 0) = 1.0;
    const Eigen::MatrixXcd alpha = Eigen::MatrixXcd(hilbert_average_state(single, layout));
    const Eigen::MatrixXcd expected = Eigen::MatrixXcd(composite_projector(layout, 0, 0, 0)) / 6.0;
    CHECK((alpha - expected).norm() < 1e-15);
    CHECK(alpha.trace().real() == doctest::Approx(1.0));

    gen::Source src(53);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = gen::valid_observables(src, 2, 2);
        const Eigen::MatrixXcd a = Eigen::MatrixXcd(hilbert_average_state(p, layout));
        CHECK((a - a.adjoint()).norm() < 1e-15);
        // recovering the constraints: tr(alpha P_ij^a) = P_ij,a
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t b = 0; b < 2; ++b) {
                    const cd back = (a * Eigen::MatrixXcd(composite_projector(layout, i, j, b))).trace();
                    CHECK(std::abs(back - p(i, j, b)) < 1e-12);
                }
        // expectation of a random operator
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Random(24, 24);
        s = (s + s.adjoint()).eval();
        cd sum = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t b = 0; b < 2; ++b)
                    sum += p(j, i, b) / 6.0 * (s * Eigen::MatrixXcd(composite_projector(layout, i, j, b))).trace();
        CHECK(std::abs((s * a).trace() - sum) < 1e-12);
    }
}

} // TEST_SUITE
