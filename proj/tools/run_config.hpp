#pragma once

// Optional key=value settings file. Blank lines and lines starting with '#'
// are ignored; unknown keys are rejected so that typos do not pass silently.

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "qsm/quadrature.hpp"

namespace qsm::cli {

struct Settings {
    double allowance_c = 5.0;
    double relative_tolerance = 1e-9;
    double quad_abs_tol = 1e-13;
    double quad_rel_tol = 1e-11;

    QuadratureOptions quadrature() const { return {quad_abs_tol, quad_rel_tol, 60, 20000}; }
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline Settings load_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    const std::map<std::string, double Settings::*> keys = {
        {"allowance_c", &Settings::allowance_c},
        {"relative_tolerance", &Settings::relative_tolerance},
        {"quad_abs_tol", &Settings::quad_abs_tol},
        {"quad_rel_tol", &Settings::quad_rel_tol},
    };
    Settings s;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const auto it = keys.find(key);
        if (it == keys.end()) throw std::invalid_argument(path + ":" + std::to_string(number) + ": unknown key " + key);
        std::size_t used = 0;
        const std::string value = trim(line.substr(eq + 1));
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size() || !(v >= 0.0))
            throw std::invalid_argument(path + ":" + std::to_string(number) + ": bad value for " + key);
        s.*(it->second) = v;
    }
    return s;
}

} // namespace qsm::cli
