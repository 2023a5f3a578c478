#include "generators.hpp"

#include "thermostat/config.hpp"
#include "thermostat/errors.hpp"
#include "thermostat/model.hpp"
#include "thermostat/model_io.hpp"
#include "thermostat/scenario.hpp"

#include <doctest.h>

using namespace thermostat;

namespace {

ModelSpec fig1() { return two_band_model(500, 5e-4); }

Eigen::MatrixXcd dense(const SparseOperator& s) { return Eigen::MatrixXcd(s); }

} // namespace

TEST_SUITE("model") {

TEST_CASE("local hamiltonian of the two-band model") {
    const auto h = build_local_hamiltonian(fig1());
    CHECK(h.size() == 2000);
    // lowest entry: ground level, lower band, first slot = 0.5 * 1/500
    CHECK(h.minCoeff() == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(h.maxCoeff() == doctest::Approx(25.0 + 25.0 + 0.5).epsilon(1e-12));
}

TEST_CASE("smallest legal model") {
    ModelSpec spec;
    spec.system.levels = {0.0};
    spec.bands = {{0.0, 1.0, 1, ""}};
    const auto h = build_local_hamiltonian(spec);
    REQUIRE(h.size() == 1);
    CHECK(h(0) == 1.0);
}

TEST_CASE("projector traces and products") {
    const BasisLayout layout(fig1());
    const auto p00_1 = composite_projector(layout, 0, 0, 0);
    const auto p01_1 = composite_projector(layout, 0, 1, 0);
    const auto p10_1 = composite_projector(layout, 1, 0, 0);
    const auto p00_2 = composite_projector(layout, 0, 0, 1);
    CHECK(dense(p00_1).trace().real() == 500.0);
    CHECK(dense(p01_1 * p10_1).isApprox(dense(p00_1)));
    CHECK(SparseOperator(p01_1 * p01_1).nonZeros() == 0);
    CHECK(SparseOperator(p00_1 * p00_2).nonZeros() == 0);
}

TEST_CASE("block classification") {
    const auto spec = fig1();
    for (const auto& c : classify_blocks(spec)) {
        if (c.block.key == BlockKey{0, 1, 1, 0}) {
            CHECK(c.resonant);
            CHECK(c.kind == CouplingKind::canonical);
            CHECK(c.detuning == 0.0);
        }
        if (c.block.key == BlockKey{0, 1, 0, 0}) {
            CHECK_FALSE(c.resonant);
            CHECK(std::abs(c.detuning) == doctest::Approx(25.0));
        }
    }
    const auto three = three_band_model({5e-4, 5e-4, 20, 0.5, 0.0});
    bool seen = false;
    for (const auto& c : classify_blocks(three)) {
        if (c.block.key == BlockKey{0, 0, 1, 1}) {
            seen = true;
            CHECK(c.resonant);
            CHECK(c.kind == CouplingKind::microcanonical);
        }
    }
    CHECK(seen);
    CHECK(to_string(BlockKey{0, 1, 1, 0}) == "(01,21)");
}

TEST_CASE("validation rejects malformed specs") {
    auto spec = fig1();
    SUBCASE("non-normalized block") {
        spec.blocks.push_back({BlockKey{1, 0, 0, 0}, 1e-3});
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("duplicate block") {
        spec.blocks.push_back(spec.blocks.front());
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("zero width") {
        spec.bands[0].width = 0.0;
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("empty band") {
        spec.bands[1].level_count = 0;
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("descending levels") {
        spec.system.levels = {25.0, 0.0};
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("negative strength") {
        spec.blocks[0].strength = -1.0;
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
    SUBCASE("band index out of range") {
        spec.blocks.push_back({BlockKey{0, 1, 0, 5}, 1e-3});
        CHECK_THROWS_AS(spec.validate(), SpecificationError);
    }
}

TEST_CASE("property: layout, projectors and local hamiltonian") {
    gen::Source src(11);
    for (int trial = 0; trial < 60; ++trial) {
        auto spec = gen::small_model(src);
        spec.validate();
        const BasisLayout layout(spec);
        CHECK(layout.total_dimension() == spec.total_dimension());
        for (std::size_t i = 0; i < layout.system_dimension(); ++i)
            for (std::size_t a = 0; a < layout.band_count(); ++a)
                for (std::size_t n = 0; n < layout.band_size(a); ++n) {
                    const auto k = layout.index(i, a, n);
                    CHECK(layout.decode(k) == BasisLayout::Coordinates{i, a, n});
                }
        double env_trace = 0.0, total_trace = 0.0;
        const auto h = build_local_hamiltonian(spec);
        for (std::size_t a = 0; a < layout.band_count(); ++a) {
            const Eigen::MatrixXcd pa = dense(band_projector(layout, a));
            env_trace += pa.trace().real();
            for (std::size_t b = 0; b < layout.band_count(); ++b) {
                const Eigen::MatrixXcd pb = dense(band_projector(layout, b));
                const Eigen::MatrixXcd expected = a == b ? pb : Eigen::MatrixXcd::Zero(pb.rows(), pb.cols());
                CHECK((pa * pb - expected).norm() == 0.0);
            }
            for (std::size_t i = 0; i < layout.system_dimension(); ++i) {
                const Eigen::MatrixXcd p = dense(composite_projector(layout, i, i, a));
                total_trace += p.trace().real();
                const Eigen::MatrixXcd hm = h.cast<std::complex<double>>().asDiagonal();
                CHECK((hm * p - p * hm).norm() == 0.0);
            }
        }
        CHECK(env_trace == static_cast<double>(layout.environment_dimension()));
        CHECK(total_trace == static_cast<double>(layout.total_dimension()));
    }
}

} // TEST_SUITE

TEST_SUITE("model_io") {

TEST_CASE("round trip through text keeps the hash") {
    gen::Source src(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto spec = gen::small_model(src);
        const auto text = serialize_model(spec);
        const auto back = parse_model(text);
        CHECK(serialize_model(back) == text);
        CHECK(model_hash(back) == model_hash(spec));
    }
}

TEST_CASE("blocks are normalized on load") {
    const auto spec = parse_model(R"(
[system]
levels = 0, 25
[band lower]
mean = 0
width = 0.5
count = 4
[band upper]
mean = 25
width = 0.5
count = 4
[block]
levels = 1 0
bands = 1 2
strength = 1e-3
)");
    REQUIRE(spec.blocks.size() == 1);
    CHECK(spec.blocks[0].key == BlockKey{0, 1, 1, 0});
    CHECK(hash_hex(model_hash(spec)).size() == 16);
}

TEST_CASE("malformed model files") {
    CHECK_THROWS_AS(parse_model("[band]\nmean = 0\nwidth = 1\ncount = 2\n"), SpecificationError);
    CHECK_THROWS_AS(parse_model("[system]\nlevels = 0\n[band]\nmean = 0\nwidth = x\ncount = 2\n"),
                    SpecificationError);
    CHECK_THROWS_AS(parse_model("[system]\nlevels = 0\n[band]\nmean = 0\nwidth = 1\ncount = 2\n"
                                "[block]\nlevels = 0 0\nbands = 0 1\nstrength = 1\n"),
                    SpecificationError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.conf"), SpecificationError);
}

} // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("sections, labels, comments and repeated keys") {
    const auto doc = config::parse(R"(
# leading comment
[run]
seed = 7   # trailing comment
[initial]
component = 1 1 0.75
component = 0 2 0.25
[band upper]
mean = 25
)");
    REQUIRE(doc.sections.size() == 3);
    CHECK(doc.first("run")->count("seed") == 7);
    CHECK(doc.first("initial")->all("component").size() == 2);
    CHECK(doc.first("band")->label == "upper");
    CHECK(doc.first("missing") == nullptr);
    CHECK(config::split_list("1, 2 3,4") == std::vector<std::string>{"1", "2", "3", "4"});
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(config::parse("key = 1\n"), SpecificationError);
    CHECK_THROWS_AS(config::parse("[run\n"), SpecificationError);
    CHECK_THROWS_AS(config::parse("[run]\nnonsense\n"), SpecificationError);
    CHECK_THROWS_AS(config::parse_number("1.5x"), SpecificationError);
    CHECK_THROWS_AS(config::parse_number("inf"), SpecificationError);
    CHECK_THROWS_AS(config::parse_count("-3"), SpecificationError);
    const auto doc = config::parse("[run]\ndt = 0.5\n");
    CHECK_THROWS_AS(doc.first("run")->number("t_end"), SpecificationError);
    CHECK(doc.first("run")->number_or("t_end", 3.0) == 3.0);
}

} // TEST_SUITE
