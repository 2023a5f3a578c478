#include "thermostat/config.hpp"
#include "thermostat/errors.hpp"
#include "thermostat/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thermostat;
namespace fs = std::filesystem;

namespace {

const char* small_config = R"(
[system]
levels = 0, 25
[band lower]
mean = 0
width = 0.5
count = 30
[band upper]
mean = 25
width = 0.5
count = 30
[block]
levels = 0 1
bands = 2 1
strength = 2e-3
[initial]
kind = product
system = 0, 1
bands = 1, 0
[run]
engines = exact, ham-ode, ham-map
seed = 5
dt = 2
t_end = 200
)";

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("thermostat_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("preset catalog") {
    const auto cat = preset_catalog();
    std::vector<std::string> names;
    for (const auto& p : cat) names.push_back(p.name);
    CHECK(names == std::vector<std::string>{"fig6", "fig7", "fig8", "fig9", "fig10", "appendixB"});
    CHECK(is_preset("fig9"));
    CHECK_FALSE(is_preset("configs/fig1.conf"));
}

TEST_CASE("built-in models") {
    const auto two = two_band_model(500, 5e-4);
    CHECK(two.total_dimension() == 2000);
    CHECK(two.blocks.size() == 4);
    const auto three = three_band_model({5e-4, 1e-3, 500, 0.5, 0.0});
    CHECK(three.total_dimension() == 3000);
    CHECK(three.blocks.size() == 6);
    CHECK(three.bands[0].mean_energy > three.bands[1].mean_energy);
    CHECK(interaction_seed(1) != interaction_seed(2));
    CHECK(state_seed(1, 0) != state_seed(1, 1));
}

TEST_CASE("config parsing") {
    const auto cfg = scenario_from_document(config::parse(small_config), "inline");
    REQUIRE(cfg.model);
    CHECK(cfg.model->total_dimension() == 120);
    CHECK(cfg.engines == std::set<Engine>{Engine::exact, Engine::ham_ode, Engine::ham_map});
    CHECK(cfg.seed == 5);
    CHECK(*cfg.dt == 2.0);
    REQUIRE(cfg.initial);
    CHECK(std::holds_alternative<ProductRecipe>(*cfg.initial));

}

TEST_CASE("invalid configs are rejected") {
    auto parse = [](const std::string& text) { return scenario_from_document(config::parse(text), "x"); };
    CHECK_THROWS_AS(parse(std::string(small_config).replace(std::string(small_config).find("dt = 2"), 6, "dt = -1")),
                    SpecificationError);
    CHECK_THROWS_AS(parse(std::string(small_config).replace(std::string(small_config).find("exact, ham-ode, ham-map"),
                                                            23, "warp-drive")),
                    SpecificationError);
    CHECK_THROWS_AS(parse(std::string(small_config).replace(std::string(small_config).find("kind = product"), 14,
                                                            "kind = thermal")),
                    SpecificationError);
    CHECK_THROWS_AS(load_scenario_config("/nonexistent.conf"), SpecificationError);
}

TEST_CASE("config runs are deterministic and write manifests") {
    const auto dir = scratch("run");
    const auto path = dir / "small.conf";
    std::ofstream(path) << small_config;
    auto cfg = load_scenario_config(path.string());
    cfg.out_dir = (dir / "a").string();
    const auto first = run_scenario(cfg);
    cfg.out_dir = (dir / "b").string();
    const auto second = run_scenario(cfg);
    REQUIRE(first.files.size() == second.files.size());
    for (const char* name : {"exact.csv", "ham-ode.csv", "ham-map.csv", "comparison.csv", "model.txt"}) {
        const auto a = slurp(dir / "a" / "small" / name);
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(dir / "b" / "small" / name));
    }
    const auto header = slurp(dir / "a" / "small" / "exact.csv");
    CHECK(header.rfind("t,P_00_1,P_11_1,P_00_2,P_11_2,Re_P_01_1,Im_P_01_1,Re_P_01_2,Im_P_01_2,rho_11,abs_rho_01_sq,S_vN", 0) == 0);
    const auto manifest = slurp(dir / "a" / "small" / "manifest.txt");
    CHECK(manifest.find("spec_hash = ") != std::string::npos);
    CHECK(manifest.find("seed = 5") != std::string::npos);
    CHECK(manifest.find("version = ") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("the dimension cap surfaces as a refusal") {
    const auto dir = scratch("cap");
    const auto path = dir / "capped.conf";
    std::ofstream(path) << small_config << "cap = 50\n";
    auto cfg = load_scenario_config(path.string());
    CHECK(cfg.cap == 50);
    cfg.out_dir = dir.string();
    CHECK_THROWS_AS(run_scenario(cfg), RefusalError);
    fs::remove_all(dir);
}

TEST_CASE("describe_config summarizes the model") {
    const auto dir = scratch("describe");
    const auto path = dir / "small.conf";
    std::ofstream(path) << small_config;
    const auto text = describe_config(path.string());
    CHECK(text.find("120 basis states") != std::string::npos);
    CHECK(text.find("resonant") != std::string::npos);
    CHECK(text.find("thermalization time") != std::string::npos);
    CHECK(text.find("truncation: valid") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("small appendix preset") {
    ScenarioConfig cfg;
    cfg.target = "appendixB";
    cfg.sizes = {2, 3};
    cfg.ensemble = 2;
    cfg.out_dir = scratch("appendix").string();
    const auto res = run_scenario(cfg);
    CHECK(res.files.size() == 2);
    fs::remove_all(cfg.out_dir);
}

} // TEST_SUITE
