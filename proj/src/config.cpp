// config.cpp - parser for the sectioned key/value format
#include "thermostat/config.hpp"

#include "thermostat/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thermostat::config {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string where(const Section& s) {
    return "[" + s.name + (s.label.empty() ? "" : " " + s.label) + "] (line " + std::to_string(s.line) + ")";
}

} // namespace

bool Section::has(std::string_view key) const { return find(key).has_value(); }

std::optional<std::string> Section::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return v;
    }
    return std::nullopt;
}

std::vector<std::string> Section::all(std::string_view key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries) {
        if (k == key) out.push_back(v);
    }
    return out;
}

std::string Section::text(std::string_view key) const {
    auto v = find(key);
    if (!v) throw SpecificationError("missing key '" + std::string(key) + "' in " + where(*this));
    return *v;
}

double Section::number(std::string_view key) const {
    try {
        return parse_number(text(key));
    } catch (const SpecificationError& e) {
        throw SpecificationError(std::string(e.what()) + " in " + where(*this));
    }
}

double Section::number_or(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::size_t Section::count(std::string_view key) const {
    try {
        return parse_count(text(key));
    } catch (const SpecificationError& e) {
        throw SpecificationError(std::string(e.what()) + " in " + where(*this));
    }
}

std::vector<double> Section::numbers(std::string_view key) const {
    std::vector<double> out;
    for (const auto& tok : split_list(text(key))) out.push_back(parse_number(tok));
    return out;
}

std::vector<std::size_t> Section::counts(std::string_view key) const {
    std::vector<std::size_t> out;
    for (const auto& tok : split_list(text(key))) out.push_back(parse_count(tok));
    return out;
}

std::vector<const Section*> Document::named(std::string_view name) const {
    std::vector<const Section*> out;
    for (const auto& s : sections) {
        if (s.name == name) out.push_back(&s);
    }
    return out;
}

const Section* Document::first(std::string_view name) const {
    for (const auto& s : sections) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

Document parse(std::string_view text) {
    Document doc;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw SpecificationError("line " + std::to_string(line_no) + ": unterminated section header");
            }
            auto inner = trim(line.substr(1, line.size() - 2));
            if (inner.empty()) throw SpecificationError("line " + std::to_string(line_no) + ": empty section name");
            Section s;
            s.line = line_no;
            auto space = inner.find_first_of(" \t");
            s.name = std::string(inner.substr(0, space));
            if (space != std::string_view::npos) s.label = std::string(trim(inner.substr(space)));
            doc.sections.push_back(std::move(s));
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw SpecificationError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        if (doc.sections.empty()) {
            throw SpecificationError("line " + std::to_string(line_no) + ": entry outside of any section");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw SpecificationError("line " + std::to_string(line_no) + ": empty key");
        doc.sections.back().entries.emplace_back(std::string(key), std::string(value));
    }
    return doc;
}

Document load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecificationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double parse_number(std::string_view token) {
    token = trim(token);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v)) {
        throw SpecificationError("not a finite number: '" + std::string(token) + "'");
    }
    return v;
}

std::size_t parse_count(std::string_view token) {
    token = trim(token);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw SpecificationError("not a non-negative integer: '" + std::string(token) + "'");
    }
    return v;
}

} // namespace thermostat::config
