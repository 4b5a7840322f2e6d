#include "biharm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace biharm {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

int to_int(const std::string& key, const std::string& text) {
    int v = 0;
    const auto* end = text.data() + text.size();
    auto [p, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
    return v;
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ConfigError(key, "expected a number, got '" + text + "'");
    return v;
}

} // namespace

std::vector<int> parse_levels(const std::string& raw, bool doubling) {
    std::string text = trim(raw);
    // Accept "n=20..160" as written for grid families.
    if (text.size() > 2 && text[0] == 'n' && text[1] == '=') text = trim(text.substr(2));
    if (text.empty()) throw ConfigError("levels", "empty level list");

    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int a = to_int("levels", trim(text.substr(0, dots)));
        const int b = to_int("levels", trim(text.substr(dots + 2)));
        if (b < a) throw ConfigError("levels", "range end is below its start");
        if (doubling) {
            if (a <= 0) throw ConfigError("levels", "grid sizes must be positive");
            for (long v = a; v <= b; v *= 2) out.push_back(static_cast<int>(v));
        } else {
            for (int v = a; v <= b; ++v) out.push_back(v);
        }
        return out;
    }
    std::string item;
    std::istringstream list(text);
    while (std::getline(list, item, ',')) {
        std::istringstream words(item);
        std::string w;
        while (words >> w) out.push_back(to_int("levels", w));
    }
    if (out.empty()) throw ConfigError("levels", "empty level list");
    return out;
}

void validate(const StudyConfig& c) {
    if (!(c.penalty.gamma > 0.0)) throw ConfigError("gamma", "must be positive");
    if (!(c.penalty.gamma_stab > 0.0)) throw ConfigError("gamma_stab", "must be positive");
    if (c.quadrature_degree < 1 || c.quadrature_degree > 6) {
        throw ConfigError("quadrature_degree", "supported degrees are 1 to 6");
    }
    if (c.initial_level < 0 || c.initial_level > 8) throw ConfigError("initial_level", "must be in 0..8");
    if (c.levels.empty()) throw ConfigError("levels", "empty level list");
    for (std::size_t i = 1; i < c.levels.size(); ++i) {
        if (c.levels[i] <= c.levels[i - 1]) throw ConfigError("levels", "levels must increase");
    }
    const bool torus = c.surface == "torus" && c.mesh_file.empty();
    const bool sphere = c.surface == "sphere" && c.mesh_file.empty();
    for (int l : c.levels) {
        if (torus && l < 4) throw ConfigError("levels", "torus grid sizes must be at least 4");
        if (sphere && (l < 0 || l > 8)) throw ConfigError("levels", "icosphere levels must be in 0..8");
        if (!torus && !sphere && (l < 0 || l > 6)) {
            throw ConfigError("levels", "refinement counts must be in 0..6");
        }
    }
    if (c.surface.empty()) throw ConfigError("surface", "must not be empty");
    if (c.solution.empty()) throw ConfigError("solution", "must not be empty");
}

StudyConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(body, "line " + std::to_string(number) + " is not of the form key = value");
        }
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(number) + " has an empty key");
        if (entries.count(key)) throw ConfigError(key, "given more than once");
        entries[key] = unquote(trim(body.substr(eq + 1)));
    }

    StudyConfig c;
    std::string levels_text;
    for (const auto& [key, value] : entries) {
        if (key == "surface") {
            c.surface = value;
        } else if (key == "level_set") {
            c.level_set = value;
        } else if (key == "mesh") {
            c.mesh_file = value;
        } else if (key == "initial_level") {
            c.initial_level = to_int(key, value);
        } else if (key == "solution") {
            c.solution = value;
        } else if (key == "recovery") {
            try {
                c.recovery = parse_recovery_backend(value);
            } catch (const Error&) {
                throw ConfigError(key, "expected wa or pppr, got '" + value + "'");
            }
        } else if (key == "gamma") {
            c.penalty.gamma = to_double(key, value);
        } else if (key == "gamma_stab") {
            c.penalty.gamma_stab = to_double(key, value);
        } else if (key == "penalty_scaling") {
            try {
                c.penalty.scaling = parse_penalty_scaling(value);
            } catch (const Error&) {
                throw ConfigError(key, "expected local or global, got '" + value + "'");
            }
        } else if (key == "levels") {
            levels_text = value;
        } else if (key == "quadrature_degree") {
            c.quadrature_degree = to_int(key, value);
        } else if (key == "output") {
            c.output = value;
        } else if (key == "format") {
            if (value == "csv") {
                c.format = TableFormat::Csv;
            } else if (value == "markdown" || value == "md") {
                c.format = TableFormat::Markdown;
            } else {
                throw ConfigError(key, "expected csv or markdown, got '" + value + "'");
            }
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    if (!levels_text.empty()) {
        const bool doubling = c.surface == "torus" && c.mesh_file.empty();
        c.levels = parse_levels(levels_text, doubling);
    }
    validate(c);
    return c;
}

StudyConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse_config(in);
}

} // namespace biharm
