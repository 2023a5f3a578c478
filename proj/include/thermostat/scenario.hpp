// scenario.hpp - preset experiments, config-driven runs, output files
#pragma once

#include "thermostat/config.hpp"
#include "thermostat/diagnostics.hpp"
#include "thermostat/ham.hpp"
#include "thermostat/interaction.hpp"
#include "thermostat/model.hpp"
#include "thermostat/propagator.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace thermostat {

// Two-level system (0, gap) with bands at 0 and gap, all four canonical
// blocks (01,ab) at strength lambda.
ModelSpec two_band_model(std::size_t n, double lambda, double gap = 25.0, double width = 0.5);

// Three bands at 2 gap, gap, 0 (bands 1, 2, 3); canonical blocks (01,12) and
// (01,23), microcanonical blocks (00,33), (00,22), (11,22), (11,11).
ModelSpec three_band_model(const ThreeBandParams& p, double gap = 25.0);

// Seeds used by every run, derived from the one root seed in the manifest.
std::uint64_t interaction_seed(std::uint64_t root);
std::uint64_t state_seed(std::uint64_t root, std::uint64_t sample);

struct PreparedModel {
    ModelSpec spec;
    std::uint64_t seed = 0;
    InteractionMatrix interaction;
    Eigen::VectorXd h_loc;
    EigenSystem eigen;
    RateTable rates;
};

PreparedModel prepare_model(const ModelSpec& spec, std::uint64_t root_seed,
                            std::size_t cap = default_dimension_cap);

// 1 / (gamma_down + gamma_up) for the slowest-relaxing pair of the rate
// table; for the two-band and three-band presets this is delta eps / (4 pi lambda^2 N).
double thermalization_time(const RateTable& rates);

// |rho_01| of the exact trajectory fitted to an exponential over the stretch
// above three times its late-time fluctuation floor (RMS over the last third).
double fit_decoherence_time(const Trajectory& exact);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> preset_catalog();
bool is_preset(const std::string& name);

struct ScenarioConfig {
    std::string target; // preset name, or the model/config path
    std::optional<ModelSpec> model;
    std::optional<InitialStateRecipe> initial;
    std::set<Engine> engines;
    std::uint64_t seed = 1;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<double> map_tau;
    std::string out_dir = "out";
    std::vector<double> xi;
    std::vector<std::size_t> sizes;
    std::optional<std::size_t> ensemble;
    int nu = 3;
    std::size_t cap = default_dimension_cap;
};

struct ScenarioResult {
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
};

// Reads a model file that may also carry [run] and [initial] sections, or a
// [three_band] section in place of explicit bands and blocks.
ScenarioConfig load_scenario_config(const std::string& path);
ScenarioConfig scenario_from_document(const config::Document& doc, const std::string& origin);

ScenarioResult run_scenario(const ScenarioConfig& cfg);

// Human-readable validation of a model/config file: dimensions, block
// classification, rates, truncation horizons. Throws on invalid input.
std::string describe_config(const std::string& path);

} // namespace thermostat
