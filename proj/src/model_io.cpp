// model_io.cpp - model file parser and canonical serializer
#include "thermostat/model_io.hpp"

#include "thermostat/errors.hpp"

#include <cstdio>
#include <sstream>

namespace thermostat {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ModelSpec model_from_document(const config::Document& doc) {
    ModelSpec spec;
    const auto systems = doc.named("system");
    if (systems.size() != 1) throw SpecificationError("model needs exactly one [system] section");
    spec.system.levels = systems.front()->numbers("levels");

    for (const auto* s : doc.named("band")) {
        BandSpec band;
        band.name = s->label;
        band.mean_energy = s->number("mean");
        band.width = s->number("width");
        band.level_count = s->count("count");
        spec.bands.push_back(std::move(band));
    }

    for (const auto* s : doc.named("block")) {
        const auto levels = s->counts("levels");
        const auto bands = s->counts("bands");
        if (levels.size() != 2 || bands.size() != 2) {
            throw SpecificationError("[block] at line " + std::to_string(s->line) +
                                     ": 'levels' and 'bands' take two entries each");
        }
        if (bands[0] == 0 || bands[1] == 0) {
            throw SpecificationError("[block] at line " + std::to_string(s->line) + ": bands are numbered from 1");
        }
        CouplingBlockSpec blk;
        blk.key = BlockKey{levels[0], levels[1], bands[0] - 1, bands[1] - 1}.normalized();
        blk.strength = s->number("strength");
        spec.blocks.push_back(blk);
    }
    spec.validate();
    return spec;
}

ModelSpec parse_model(const std::string& text) { return model_from_document(config::parse(text)); }

ModelSpec load_model(const std::string& path) { return model_from_document(config::load(path)); }

std::string serialize_model(const ModelSpec& spec) {
    std::ostringstream out;
    out << "[system]\nlevels =";
    for (std::size_t k = 0; k < spec.system.levels.size(); ++k) {
        out << (k ? ", " : " ") << fmt(spec.system.levels[k]);
    }
    out << "\n";
    for (const auto& b : spec.bands) {
        out << "\n[band" << (b.name.empty() ? "" : " " + b.name) << "]\n"
            << "mean = " << fmt(b.mean_energy) << "\n"
            << "width = " << fmt(b.width) << "\n"
            << "count = " << b.level_count << "\n";
    }
    for (const auto& blk : spec.blocks) {
        out << "\n[block]\n"
            << "levels = " << blk.key.i << " " << blk.key.j << "\n"
            << "bands = " << blk.key.a + 1 << " " << blk.key.b + 1 << "\n"
            << "strength = " << fmt(blk.strength) << "\n";
    }
    return out.str();
}

std::uint64_t model_hash(const ModelSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_model(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace thermostat
