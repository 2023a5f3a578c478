// scenario.cpp - presets and config-driven runs
#include "thermostat/scenario.hpp"

#include "thermostat/errors.hpp"
#include "thermostat/model_io.hpp"
#include "thermostat/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace thermostat {
namespace fs = std::filesystem;

namespace {

constexpr double default_lambda = 5e-4;
constexpr double default_width = 0.5;
constexpr double default_gap = 25.0;
constexpr std::size_t default_n = 500;
constexpr const char* version = "1.0.0";

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct OutputDir {
    fs::path path;
    ScenarioResult* result;

    std::string file(const std::string& name) const {
        const auto p = (path / name).string();
        result->files.push_back(p);
        return p;
    }
};

OutputDir open_output(const ScenarioConfig& cfg, const std::string& name, ScenarioResult& res) {
    fs::path dir = fs::path(cfg.out_dir) / name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SpecificationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return {dir, &res};
}

void write_manifest(const OutputDir& out, const ScenarioConfig& cfg, const std::string& scenario,
                    const std::vector<std::pair<std::string, std::string>>& extra, const ScenarioResult& res) {
    std::ofstream m(out.file("manifest.txt"));
    m << "# thermostat run manifest\n";
    m << "version = " << version << "\n";
    m << "scenario = " << scenario << "\n";
    m << "target = " << cfg.target << "\n";
    m << "seed = " << cfg.seed << "\n";
    m << "seed_derivation = interaction: derive_seed(seed, {1}); state k: derive_seed(seed, {2, k})\n";
    std::string engines;
    for (auto e : cfg.engines) engines += (engines.empty() ? "" : ",") + std::string(to_string(e));
    m << "engines = " << engines << "\n";
    for (const auto& [k, v] : extra) m << k << " = " << v << "\n";
    for (const auto& [k, v] : res.summary) m << "result." << k << " = " << v << "\n";
    for (const auto& w : res.warnings) m << "warning = " << w << "\n";
}

void write_model(const OutputDir& out, const ModelSpec& spec, const std::string& name) {
    std::ofstream f(out.file(name));
    f << serialize_model(spec);
}

ProductRecipe product(std::complex<double> ground, std::complex<double> excited, std::size_t bands, std::size_t band) {
    ProductRecipe r;
    r.system_amplitudes = {ground, excited};
    r.band_weights.assign(bands, 0.0);
    r.band_weights[band] = 1.0;
    return r;
}

CorrelatedRecipe three_quarter_recipe() {
    return CorrelatedRecipe{{{1, 0, 0.75}, {0, 1, 0.25}}};
}

} // namespace

ModelSpec two_band_model(std::size_t n, double lambda, double gap, double width) {
    ModelSpec spec;
    spec.system.levels = {0.0, gap};
    spec.bands = {BandSpec{0.0, width, n, "lower"}, BandSpec{gap, width, n, "upper"}};
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) spec.blocks.push_back({BlockKey{0, 1, a, b}, lambda});
    }
    spec.validate();
    return spec;
}

ModelSpec three_band_model(const ThreeBandParams& p, double gap) {
    p.validate();
    ModelSpec spec;
    spec.system.levels = {0.0, gap};
    const auto n = p.levels_per_band;
    spec.bands = {BandSpec{2.0 * gap, p.band_width, n, "upper"}, BandSpec{gap, p.band_width, n, "middle"},
                  BandSpec{0.0, p.band_width, n, "lower"}};
    spec.blocks = {{BlockKey{0, 1, 0, 1}, p.lambda_can}, {BlockKey{0, 1, 1, 2}, p.lambda_can},
                   {BlockKey{0, 0, 2, 2}, p.lambda_mic}, {BlockKey{0, 0, 1, 1}, p.lambda_mic},
                   {BlockKey{1, 1, 1, 1}, p.lambda_mic}, {BlockKey{1, 1, 0, 0}, p.lambda_mic}};
    spec.validate();
    return spec;
}

std::uint64_t interaction_seed(std::uint64_t root) { return rng::derive_seed(root, {1}); }
std::uint64_t state_seed(std::uint64_t root, std::uint64_t sample) { return rng::derive_seed(root, {2, sample}); }

PreparedModel prepare_model(const ModelSpec& spec, std::uint64_t root_seed, std::size_t cap) {
    PreparedModel pm;
    pm.spec = spec;
    pm.seed = root_seed;
    pm.interaction = sample_interaction(spec, interaction_seed(root_seed));
    pm.h_loc = build_local_hamiltonian(spec);
    pm.eigen = diagonalize(pm.h_loc, pm.interaction, cap);
    pm.rates = golden_rates(spec);
    return pm;
}

double thermalization_time(const RateTable& rates) {
    double slowest = 0.0;
    for (std::size_t i = 0; i < rates.levels(); ++i) {
        for (std::size_t m = i + 1; m < rates.levels(); ++m) {
            for (std::size_t a = 0; a < rates.bands(); ++a) {
                for (std::size_t b = 0; b < rates.bands(); ++b) {
                    const double sum = rates(i, m, a, b) + rates(m, i, b, a);
                    if (sum > 0.0) slowest = std::max(slowest, 1.0 / sum);
                }
            }
        }
    }
    return slowest > 0.0 ? slowest : std::numeric_limits<double>::infinity();
}

double fit_decoherence_time(const Trajectory& exact) {
    const auto t = exact.times();
    std::vector<double> c;
    for (double v : exact.rho_abs_sq_series(0, 1)) c.push_back(std::sqrt(v));
    const std::size_t start = c.size() - c.size() / 3;
    double rms = 0.0;
    for (std::size_t k = start; k < c.size(); ++k) rms += c[k] * c[k];
    rms = std::sqrt(rms / static_cast<double>(c.size() - start));
    return fit_exponential_decay(t, c, 3.0 * rms);
}

std::vector<PresetInfo> preset_catalog() {
    return {
        {"fig6", "two bands, N = 500, lambda_can = 5e-4; excited system, random lower-band environment"},
        {"fig7", "as fig6 with the system in a 50:50 superposition; coherence decay"},
        {"fig8", "three-band model, 90:10 superposition in the middle band; T_dec against xi in {0, 0.5, 1, 2, 3, 5}"},
        {"fig9", "100 Haar-random 3/4 - 1/4 correlated states at N = 500; D histogram (nu = 3)"},
        {"fig10", "D^2 against N = 10 ... 800 at fixed golden-rule rate, one evolution per size"},
        {"appendixB", "brute-force second-order trace identities on 2 x (N + N) models, N = 4, 8, 16, 20 seeds"},
    };
}

bool is_preset(const std::string& name) {
    for (const auto& p : preset_catalog()) {
        if (p.name == name) return true;
    }
    return false;
}

namespace {

InitialStateRecipe recipe_from_section(const config::Section& s, const ModelSpec& spec) {
    const auto kind = s.text("kind");
    if (kind == "product") {
        ProductRecipe r;
        for (double a : s.numbers("system")) r.system_amplitudes.emplace_back(a, 0.0);
        r.band_weights = s.numbers("bands");
        double norm = 0.0;
        for (const auto& a : r.system_amplitudes) norm += std::norm(a);
        if (norm > 0.0) {
            for (auto& a : r.system_amplitudes) a /= std::sqrt(norm);
        }
        if (r.system_amplitudes.size() != spec.system.dimension() || r.band_weights.size() != spec.band_count()) {
            throw SpecificationError("[initial]: 'system' needs one amplitude per level and 'bands' one weight per band");
        }
        return r;
    }
    if (kind == "correlated") {
        CorrelatedRecipe r;
        for (const auto& line : s.all("component")) {
            const auto tok = config::split_list(line);
            if (tok.size() != 3) throw SpecificationError("[initial]: component = <level> <band> <weight>");
            const auto band = config::parse_count(tok[1]);
            if (band == 0) throw SpecificationError("[initial]: bands are numbered from 1");
            r.components.push_back({config::parse_count(tok[0]), band - 1, config::parse_number(tok[2])});
        }
        if (r.components.empty()) throw SpecificationError("[initial]: correlated state needs component lines");
        return r;
    }
    throw SpecificationError("[initial]: kind must be 'product' or 'correlated'");
}

std::set<Engine> parse_engines(const std::string& list) {
    std::set<Engine> out;
    for (const auto& tok : config::split_list(list)) {
        if (tok == "all") {
            out = {Engine::exact, Engine::ham_ode, Engine::ham_map, Engine::closed_form};
        } else {
            out.insert(engine_from_string(tok));
        }
    }
    if (out.empty()) throw SpecificationError("engine list is empty");
    return out;
}

std::optional<ThreeBandParams> three_band_params(const config::Document& doc) {
    const auto* s = doc.first("three_band");
    if (!s) return std::nullopt;
    ThreeBandParams p;
    p.lambda_can = s->number("lambda_can");
    if (s->has("lambda_mic")) {
        p.lambda_mic = s->number("lambda_mic");
    } else {
        p.lambda_mic = s->number_or("xi", 0.0) * p.lambda_can;
    }
    p.levels_per_band = s->count("count");
    p.band_width = s->number_or("width", default_width);
    p.beta = s->number_or("beta", 0.0);
    p.validate();
    return p;
}

} // namespace

ScenarioConfig scenario_from_document(const config::Document& doc, const std::string& origin) {
    ScenarioConfig cfg;
    cfg.target = origin;
    if (auto p = three_band_params(doc)) {
        cfg.model = three_band_model(*p, doc.first("three_band")->number_or("gap", default_gap));
    } else {
        cfg.model = model_from_document(doc);
    }
    if (const auto* run = doc.first("run")) {
        if (run->has("engines")) cfg.engines = parse_engines(run->text("engines"));
        if (run->has("seed")) cfg.seed = run->count("seed");
        if (run->has("dt")) cfg.dt = run->number("dt");
        if (run->has("t_end")) cfg.t_end = run->number("t_end");
        if (run->has("map_tau")) cfg.map_tau = run->number("map_tau");
        if (run->has("cap")) cfg.cap = run->count("cap");
        if (run->has("out")) cfg.out_dir = run->text("out");
    }
    if (const auto* init = doc.first("initial")) cfg.initial = recipe_from_section(*init, *cfg.model);
    if (cfg.dt && !(*cfg.dt > 0.0)) throw SpecificationError("[run]: dt must be positive");
    if (cfg.t_end && !(*cfg.t_end > 0.0)) throw SpecificationError("[run]: t_end must be positive");
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    return scenario_from_document(config::load(path), path);
}

namespace {

struct RelaxationOptions {
    std::string name;
    ModelSpec spec;
    InitialStateRecipe recipe;
    std::optional<ThreeBandParams> closed_form;
    bool born_reference = false;
};

void run_relaxation(const ScenarioConfig& cfg, const RelaxationOptions& opt, ScenarioResult& res) {
    auto out = open_output(cfg, opt.name, res);
    write_model(out, opt.spec, "model.txt");
    const auto hash = model_hash(opt.spec);
    const BasisLayout layout(opt.spec);
    const auto rates = golden_rates(opt.spec);
    const auto psi0 = sample_initial_state(opt.recipe, layout, state_seed(cfg.seed, 0));
    const auto p0 = measure(psi0, layout);
    const double t_th = thermalization_time(rates);
    if (!std::isfinite(t_th) && (!cfg.t_end || !cfg.dt)) {
        throw SpecificationError("model has no resonant exchange; give dt and t_end explicitly");
    }
    const double t_end = cfg.t_end.value_or(6.0 * t_th);
    const double dt = cfg.dt.value_or(t_th / 200.0);
    const auto grid = uniform_grid(t_end, dt);
    const Provenance prov{hash, cfg.seed, Engine::exact};

    std::optional<Trajectory> exact, ode;
    if (cfg.engines.count(Engine::exact)) {
        const auto pm = prepare_model(opt.spec, cfg.seed, cfg.cap);
        exact = Evolver(pm.eigen, psi0).observe(grid);
        exact->provenance = prov;
        write_csv(out.file("exact.csv"), *exact);
    }
    if (cfg.engines.count(Engine::ham_ode)) {
        ode = integrate_rates(rates, p0, grid);
        ode->provenance = {hash, cfg.seed, Engine::ham_ode};
        write_csv(out.file("ham-ode.csv"), *ode);
    }
    if (cfg.engines.count(Engine::ham_map)) {
        const double tau = cfg.map_tau.value_or(std::isfinite(t_th) ? t_th / 100.0 : dt);
        const auto steps = static_cast<std::size_t>(std::floor(t_end / tau + 1e-9));
        auto map = iterate_map(rates, p0, tau, steps);
        map.trajectory.provenance = {hash, cfg.seed, Engine::ham_map};
        for (const auto& w : map.warnings) res.warnings.push_back("ham-map: " + w);
        write_csv(out.file("ham-map.csv"), map.trajectory);
    }
    if (cfg.engines.count(Engine::closed_form)) {
        if (!opt.closed_form) {
            res.warnings.push_back("closed-form engine applies to three-band style models only; skipped");
        } else {
            auto cf = closed_form_three_band(*opt.closed_form, p0.reduced_matrix(), grid);
            cf.trajectory.provenance = {hash, cfg.seed, Engine::closed_form};
            write_csv(out.file("closed-form.csv"), cf.trajectory);
            res.summary.emplace_back("T_dec_closed_form", num(cf.decoherence_time));
        }
    }

    const auto trunc = truncation_validity(rates, p0);
    res.summary.emplace_back("T_th", num(t_th));
    res.summary.emplace_back("tau_c_estimate", num(1.0 / opt.spec.max_band_width()));
    double tau_d = std::numeric_limits<double>::infinity();
    for (const auto& s : trunc.shells) tau_d = std::min(tau_d, s.horizon);
    res.summary.emplace_back("tau_d_min", num(tau_d));
    res.summary.emplace_back("truncation_valid", trunc.valid ? "yes" : "no");
    if (!trunc.valid) res.warnings.push_back("truncation horizon below the correlation time in an occupied shell");

    if (exact && opt.spec.system.dimension() >= 2) {
        double mean = 0.0;
        std::size_t cnt = 0;
        for (const auto& p : exact->points) {
            if (p.time() >= 4.0 * t_th && p.time() <= 6.0 * t_th) {
                mean += p.rho(1, 1).real();
                ++cnt;
            }
        }
        if (cnt) res.summary.emplace_back("mean_rho_11_exact_4_6_Tth", num(mean / static_cast<double>(cnt)));
    }
    if (exact && ode && opt.spec.system.dimension() >= 2) {
        std::ofstream cmp(out.file("comparison.csv"));
        cmp << "t,rho_11_exact,rho_11_ham,abs_rho_01_sq_exact,abs_rho_01_sq_ham";
        if (opt.born_reference) cmp << ",rho_11_born";
        cmp << "\n";
        double d11 = 0.0, d01 = 0.0;
        const double gamma_out = rates.total_out(1, 0);
        char buf[160];
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto& e = exact->points[k];
            const auto& h = ode->points[k];
            d11 = std::max(d11, std::abs(e.rho(1, 1).real() - h.rho(1, 1).real()));
            d01 = std::max(d01, std::abs(e.rho_abs_sq(0, 1) - h.rho_abs_sq(0, 1)));
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g", grid[k], e.rho(1, 1).real(),
                          h.rho(1, 1).real(), e.rho_abs_sq(0, 1), h.rho_abs_sq(0, 1));
            cmp << buf;
            if (opt.born_reference) {
                std::snprintf(buf, sizeof buf, ",%.10g", p0.rho(1, 1).real() * std::exp(-gamma_out * grid[k]));
                cmp << buf;
            }
            cmp << "\n";
        }
        res.summary.emplace_back("max_abs_diff_rho_11", num(d11));
        res.summary.emplace_back("max_abs_diff_abs_rho_01_sq", num(d01));
    }
    write_manifest(out, cfg, opt.name,
                   {{"spec_hash", hash_hex(hash)}, {"dt", num(dt)}, {"t_end", num(t_end)},
                    {"state_seed", std::to_string(state_seed(cfg.seed, 0))}},
                   res);
}

void run_fig8(const ScenarioConfig& cfg, ScenarioResult& res) {
    auto out = open_output(cfg, "fig8", res);
    const auto xis = cfg.xi.empty() ? std::vector<double>{0.0, 0.5, 1.0, 2.0, 3.0, 5.0} : cfg.xi;
    const std::size_t n = cfg.sizes.empty() ? default_n : cfg.sizes.front();
    const std::size_t seeds = cfg.ensemble.value_or(1);
    std::ofstream table(out.file("fig8.csv"));
    table << "xi,seed,T_dec_fit,T_dec_theory,T_th\n";
    double worst = 0.0;
    for (std::size_t q = 0; q < xis.size(); ++q) {
        ThreeBandParams p{default_lambda, xis[q] * default_lambda, n, default_width, 0.0};
        const auto spec = three_band_model(p);
        std::vector<double> fits;
        for (std::size_t s = 0; s < seeds; ++s) {
            const std::uint64_t root = cfg.seed + s;
            const auto pm = prepare_model(spec, root, cfg.cap);
            const auto psi0 = sample_initial_state(product(std::sqrt(0.9), std::sqrt(0.1), 3, 1),
                                                   pm.eigen.layout(), state_seed(root, 0));
            const double t_dec = p.decoherence_time();
            const auto grid = uniform_grid(cfg.t_end.value_or(6.0 * t_dec), cfg.dt.value_or(t_dec / 100.0));
            auto exact = Evolver(pm.eigen, psi0).observe(grid);
            exact.provenance = {model_hash(spec), root, Engine::exact};
            const double fit = fit_decoherence_time(exact);
            fits.push_back(fit);
            table << xis[q] << "," << root << "," << num(fit) << "," << num(t_dec) << ","
                  << num(p.thermalization_time()) << "\n";
            if (s == 0) {
                char name[64];
                std::snprintf(name, sizeof name, "xi_%g_exact.csv", xis[q]);
                write_csv(out.file(name), exact);
                const auto p0 = measure(psi0, pm.eigen.layout());
                auto cf = closed_form_three_band(p, p0.reduced_matrix(), grid);
                cf.trajectory.provenance = {model_hash(spec), root, Engine::closed_form};
                std::snprintf(name, sizeof name, "xi_%g_closed-form.csv", xis[q]);
                write_csv(out.file(name), cf.trajectory);
            }
        }
        const double med = median(fits);
        worst = std::max(worst, std::abs(med / p.decoherence_time() - 1.0));
        res.summary.emplace_back("T_dec_fit_xi_" + num(xis[q]), num(med));
    }
    res.summary.emplace_back("max_relative_error", num(worst));
    write_manifest(out, cfg, "fig8", {{"levels_per_band", std::to_string(n)}, {"seeds_per_xi", std::to_string(seeds)}},
                   res);
}

// D^2 of HAM against exact rho_11 for correlated states on one prepared model.
std::vector<double> deviation_samples(const PreparedModel& pm, std::uint64_t root, std::size_t count, int nu,
                                      std::optional<double> dt) {
    const double t_th = thermalization_time(pm.rates);
    const double t1 = 2.0 * t_th;
    const auto grid = uniform_grid(nu * t1, dt.value_or(t_th / 50.0));
    std::vector<double> d2;
    for (std::size_t k = 0; k < count; ++k) {
        const auto psi0 = sample_initial_state(three_quarter_recipe(), pm.eigen.layout(), state_seed(root, k));
        const auto exact = Evolver(pm.eigen, psi0).level_population(grid, 1);
        const auto ham = integrate_rates(pm.rates, measure(psi0, pm.eigen.layout()), grid);
        d2.push_back(deviation_D2(TimeSeries{grid, exact}, rho_11_series(ham), t1, nu));
    }
    return d2;
}

void run_fig9(const ScenarioConfig& cfg, ScenarioResult& res) {
    auto out = open_output(cfg, "fig9", res);
    const std::size_t n = cfg.sizes.empty() ? default_n : cfg.sizes.front();
    const auto spec = two_band_model(n, default_lambda);
    const auto pm = prepare_model(spec, cfg.seed, cfg.cap);
    const auto d2 = deviation_samples(pm, cfg.seed, cfg.ensemble.value_or(100), cfg.nu, cfg.dt);
    std::ofstream table(out.file("fig9.csv"));
    table << "sample,D2,D\n";
    std::vector<double> d;
    for (std::size_t k = 0; k < d2.size(); ++k) {
        d.push_back(std::sqrt(d2[k]));
        table << k << "," << num(d2[k]) << "," << num(d.back()) << "\n";
    }
    res.summary.emplace_back("median_D", num(median(d)));
    res.summary.emplace_back("T1", num(2.0 * thermalization_time(pm.rates)));
    write_manifest(out, cfg, "fig9",
                   {{"spec_hash", hash_hex(model_hash(spec))}, {"nu", std::to_string(cfg.nu)},
                    {"samples", std::to_string(d2.size())}},
                   res);
}

void run_fig10(const ScenarioConfig& cfg, ScenarioResult& res) {
    auto out = open_output(cfg, "fig10", res);
    const auto sizes = cfg.sizes.empty() ? std::vector<std::size_t>{10, 25, 50, 100, 200, 400, 800} : cfg.sizes;
    std::ofstream table(out.file("fig10.csv"));
    table << "N,lambda,sample,D2\n";
    std::vector<double> lx, ly;
    for (auto n : sizes) {
        // keep the golden-rule rate fixed: lambda^2 N constant
        const double lambda = default_lambda * std::sqrt(static_cast<double>(default_n) / static_cast<double>(n));
        const auto spec = two_band_model(n, lambda);
        const std::uint64_t root = rng::derive_seed(cfg.seed, {3, n});
        const auto pm = prepare_model(spec, root, cfg.cap);
        const auto d2 = deviation_samples(pm, root, cfg.ensemble.value_or(1), cfg.nu, cfg.dt);
        double mean = 0.0;
        for (std::size_t k = 0; k < d2.size(); ++k) {
            table << n << "," << num(lambda) << "," << k << "," << num(d2[k]) << "\n";
            mean += d2[k];
        }
        mean /= static_cast<double>(d2.size());
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(mean));
    }
    res.summary.emplace_back("slope_logD2_logN", num(slope_fit(lx, ly)));
    write_manifest(out, cfg, "fig10", {{"nu", std::to_string(cfg.nu)}}, res);
}

ModelSpec appendix_model(std::size_t n) {
    auto spec = two_band_model(n, 1e-3);
    spec.blocks.push_back({BlockKey{0, 0, 0, 0}, 1e-3});
    spec.blocks.push_back({BlockKey{1, 1, 1, 1}, 1e-3});
    spec.validate();
    return spec;
}

void run_appendix(const ScenarioConfig& cfg, ScenarioResult& res) {
    auto out = open_output(cfg, "appendixB", res);
    const auto sizes = cfg.sizes.empty() ? std::vector<std::size_t>{4, 8, 16} : cfg.sizes;
    const std::size_t seeds = cfg.ensemble.value_or(20);
    std::ofstream table(out.file("appendixB.csv"));
    table << "N,seed,S0_error,S1_relative,coupling_scale,S2_residual,quadrature_change,converged\n";
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (auto n : sizes) {
        const auto spec = appendix_model(n);
        std::vector<double> resid;
        for (std::size_t s = 0; s < seeds; ++s) {
            const auto rep = verify_dyson_trace(spec, cfg.seed + s, 10.0, 5.0);
            resid.push_back(rep.second_order_residual);
            table << n << "," << cfg.seed + s << "," << num(rep.zeroth_order_error) << "," << num(rep.first_order)
                  << "," << num(rep.coupling_scale) << "," << num(rep.second_order_residual) << ","
                  << num(rep.quadrature_change) << "," << (rep.converged ? 1 : 0) << "\n";
            if (!rep.converged) res.warnings.push_back("quadrature did not converge for N = " + std::to_string(n));
        }
        const double med = median(resid);
        res.summary.emplace_back("median_S2_residual_N_" + std::to_string(n), num(med));
        monotone = monotone && med < prev;
        prev = med;
    }
    res.summary.emplace_back("residual_decreasing", monotone ? "yes" : "no");
    write_manifest(out, cfg, "appendixB", {{"t", "10"}, {"tau", "5"}}, res);
}

} // namespace

ScenarioResult run_scenario(const ScenarioConfig& in) {
    ScenarioConfig cfg = in;
    ScenarioResult res;
    const auto& t = cfg.target;
    if (t == "fig6" || t == "fig7") {
        if (cfg.engines.empty()) cfg.engines = {Engine::exact, Engine::ham_ode, Engine::ham_map};
        const std::size_t n = cfg.sizes.empty() ? default_n : cfg.sizes.front();
        RelaxationOptions opt;
        opt.name = t;
        opt.spec = two_band_model(n, default_lambda);
        if (t == "fig6") {
            opt.recipe = product(0.0, 1.0, 2, 0);
            opt.closed_form = ThreeBandParams{default_lambda, 0.0, n, default_width, 0.0};
            opt.born_reference = true;
        } else {
            opt.recipe = product(std::sqrt(0.5), std::sqrt(0.5), 2, 0);
        }
        run_relaxation(cfg, opt, res);
    } else if (t == "fig8") {
        run_fig8(cfg, res);
    } else if (t == "fig9") {
        run_fig9(cfg, res);
    } else if (t == "fig10") {
        run_fig10(cfg, res);
    } else if (t == "appendixB") {
        run_appendix(cfg, res);
    } else {
        if (!cfg.model) cfg = [&] {
            auto loaded = load_scenario_config(t);
            loaded.out_dir = in.out_dir;
            if (!in.engines.empty()) loaded.engines = in.engines;
            if (in.seed != 1) loaded.seed = in.seed;
            return loaded;
        }();
        if (cfg.engines.empty()) cfg.engines = {Engine::exact, Engine::ham_ode};
        RelaxationOptions opt;
        opt.name = fs::path(t).stem().string();
        opt.spec = *cfg.model;
        if (cfg.initial) {
            opt.recipe = *cfg.initial;
        } else {
            CorrelatedRecipe r{{{opt.spec.system.dimension() - 1, 0, 1.0}}};
            opt.recipe = r;
            res.warnings.push_back("no [initial] section; using the top level with a random state in band 1");
        }
        const auto doc = config::load(t);
        opt.closed_form = three_band_params(doc);
        run_relaxation(cfg, opt, res);
    }
    return res;
}

std::string describe_config(const std::string& path) {
    const auto cfg = load_scenario_config(path);
    const auto& spec = *cfg.model;
    std::ostringstream out;
    out << "model: " << spec.system.dimension() << " system levels, " << spec.band_count() << " bands, "
        << spec.total_dimension() << " basis states (hash " << hash_hex(model_hash(spec)) << ")\n";
    if (spec.total_dimension() > cfg.cap) {
        out << "warning: exceeds the diagonalization cap of " << cfg.cap << "; the exact engine will refuse\n";
    }
    for (const auto& c : classify_blocks(spec)) {
        out << "block " << to_string(c.block.key) << "  lambda = " << num(c.block.strength) << "  "
            << to_string(c.kind) << ", detuning " << num(c.detuning) << (c.resonant ? ", resonant" : ", off-resonant")
            << "\n";
    }
    const auto rates = golden_rates(spec);
    for (std::size_t i = 0; i < rates.levels(); ++i) {
        for (std::size_t m = 0; m < rates.levels(); ++m) {
            for (std::size_t a = 0; a < rates.bands(); ++a) {
                for (std::size_t b = 0; b < rates.bands(); ++b) {
                    if (!(rates(i, m, a, b) > 0.0)) continue;
                    if (i == m && a == b) {
                        out << "dephasing rate (" << i << "," << a + 1 << ") = " << num(rates(i, m, a, b)) << "\n";
                    } else {
                        out << "rate (" << m << "," << b + 1 << ") -> (" << i << "," << a + 1
                            << ") = " << num(rates(i, m, a, b)) << "\n";
                    }
                }
            }
        }
    }
    out << "thermalization time: " << num(thermalization_time(rates)) << "\n";
    out << "correlation time estimate 1/delta_eps: " << num(1.0 / spec.max_band_width()) << "\n";
    if (cfg.initial) {
        const BasisLayout layout(spec);
        const auto psi = sample_initial_state(*cfg.initial, layout, state_seed(cfg.seed, 0));
        const auto rep = truncation_validity(rates, measure(psi, layout));
        for (const auto& s : rep.shells) {
            out << "occupied shell E = " << num(s.energy) << ": weight " << num(s.occupation) << ", tau_d "
                << num(s.horizon) << (s.valid ? "" : "  (below tau_c)") << "\n";
        }
        out << "truncation: " << (rep.valid ? "valid" : "NOT valid") << "\n";
    }
    return out.str();
}

} // namespace thermostat
