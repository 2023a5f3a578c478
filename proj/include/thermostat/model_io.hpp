// model_io.hpp - reading and writing model files
//
//   [system]
//   levels = 0, 25
//
//   [band lower]
//   mean = 0
//   width = 0.5
//   count = 500
//
//   [block]
//   levels = 0 1        # i j, system levels from 0
//   bands = 2 1         # a b, bands from 1
//   strength = 5e-4
//
// Block keys are normalized on load, so `levels = 1 0, bands = 1 2` names
// the same block as the example above.
#pragma once

#include "thermostat/config.hpp"
#include "thermostat/model.hpp"

#include <cstdint>
#include <string>

namespace thermostat {

ModelSpec model_from_document(const config::Document& doc);
ModelSpec parse_model(const std::string& text);
ModelSpec load_model(const std::string& path);

// Canonical text form; parse_model(serialize_model(m)) reproduces m.
std::string serialize_model(const ModelSpec& spec);

// FNV-1a over the canonical text, printed as 16 hex digits in manifests.
std::uint64_t model_hash(const ModelSpec& spec);
std::string hash_hex(std::uint64_t h);

} // namespace thermostat
