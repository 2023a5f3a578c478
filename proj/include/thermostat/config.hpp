// config.hpp - the sectioned `key = value` text format used by model and scenario files
//
//   # comment
//   [system]
//   levels = 0, 25
//
//   [band lower]          # optional label after the section name
//   mean = 0
//
// Sections may repeat ([band], [block], ...); order is preserved. Keys may
// repeat inside a section (e.g. `component = ...` lines). Everything after
// `#` on a line is ignored.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace thermostat::config {

struct Section {
    std::string name;
    std::string label;
    int line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(std::string_view key) const;
    std::optional<std::string> find(std::string_view key) const;
    std::vector<std::string> all(std::string_view key) const;

    std::string text(std::string_view key) const;
    double number(std::string_view key) const;
    double number_or(std::string_view key, double fallback) const;
    std::size_t count(std::string_view key) const;
    std::vector<double> numbers(std::string_view key) const;
    std::vector<std::size_t> counts(std::string_view key) const;
};

struct Document {
    std::vector<Section> sections;

    std::vector<const Section*> named(std::string_view name) const;
    const Section* first(std::string_view name) const;
};

Document parse(std::string_view text);
Document load(const std::string& path);

// Splits on commas and/or whitespace.
std::vector<std::string> split_list(std::string_view value);
double parse_number(std::string_view token);
std::size_t parse_count(std::string_view token);

} // namespace thermostat::config
