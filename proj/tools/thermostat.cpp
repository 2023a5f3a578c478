// thermostat - command line front end
//
//   thermostat run <preset|config> [--seed S] [--out DIR] [--engines exact,ham-ode,...]
//   thermostat validate <config>
//   thermostat presets
#include "thermostat/errors.hpp"
#include "thermostat/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace thermostat;

namespace {

std::set<Engine> engines_from(const std::vector<std::string>& names) {
    std::set<Engine> out;
    for (const auto& n : names) {
        if (n == "all") {
            out.insert({Engine::exact, Engine::ham_ode, Engine::ham_map, Engine::closed_form});
        } else {
            out.insert(engine_from_string(n));
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-bath relaxation: exact dynamics against the Hilbert space average method"};
    app.require_subcommand(1);

    std::string target;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::vector<std::string> engines;
    std::vector<double> xi;
    std::vector<std::size_t> sizes;
    std::size_t ensemble = 0;
    double dt = 0.0, t_end = 0.0, map_tau = 0.0;
    int nu = 3;

    auto* run = app.add_subcommand("run", "run a preset or a scenario file");
    run->add_option("target", target, "preset name or config path")->required();
    auto* seed_opt = run->add_option("--seed", seed, "root seed");
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    run->add_option("--engines", engines, "exact, ham-ode, ham-map, closed-form or all")->delimiter(',');
    run->add_option("--xi", xi, "xi values (fig8)")->delimiter(',');
    run->add_option("--sizes", sizes, "band sizes (fig8, fig9, fig10, appendixB)")->delimiter(',');
    run->add_option("--ensemble", ensemble, "ensemble size or seeds per point");
    run->add_option("--dt", dt, "time step");
    run->add_option("--t-end", t_end, "final time");
    run->add_option("--map-tau", map_tau, "HAM map step");
    run->add_option("--nu", nu, "D^2 window in units of T1")->capture_default_str();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a scenario or model file and print derived quantities");
    validate->add_option("config", validate_path, "config path")->required();

    auto* presets = app.add_subcommand("presets", "list presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*presets) {
            for (const auto& p : preset_catalog()) std::cout << p.name << "\t" << p.description << "\n";
            return 0;
        }
        if (*validate) {
            std::cout << describe_config(validate_path);
            return 0;
        }

        ScenarioConfig cfg;
        if (!is_preset(target)) cfg = load_scenario_config(target);
        cfg.target = target;
        if (*seed_opt) cfg.seed = seed;
        if (run->count("--out") || is_preset(target)) cfg.out_dir = out_dir;
        if (!engines.empty()) cfg.engines = engines_from(engines);
        if (!xi.empty()) cfg.xi = xi;
        if (!sizes.empty()) cfg.sizes = sizes;
        if (ensemble > 0) cfg.ensemble = ensemble;
        if (dt > 0.0) cfg.dt = dt;
        if (t_end > 0.0) cfg.t_end = t_end;
        if (map_tau > 0.0) cfg.map_tau = map_tau;
        cfg.nu = nu;

        const auto res = run_scenario(cfg);
        for (const auto& [k, v] : res.summary) std::cout << k << " = " << v << "\n";
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const RefusalError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const SpecificationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
