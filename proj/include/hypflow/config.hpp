#pragma once

// Campaign configuration: line-oriented `key = value` text.
//
//     # comment (also after a value)
//     [run]
//     jobs = 2
//
//     [scenario NAME]         one per scenario; NAME is the record file stem
//     R = 4                   required
//     initial = exact_hyperbolic | banded_perturbation | upper_barrier | lower_barrier
//     boundary = frozen | hyperbolic_continuation | adversarial_oscillation | exact
//     amplitude = 0.5
//     period = 1
//     b = 0.1   eps = 0.05   curvature_cap = 2   horizon = 1   sample_every = 0.01
//     seed = 0  alpha_tol = 0.5   delta = 0   inner_radius = 2
//     stop_on_control_loss = true | false
//     max_dr = 0.02           grid spacing bound
//
//     [sweep]
//     R_list = 3, 4, 5, 6, 7  required
//     template = NAME         required; a scenario section
//     max_dr = 0.1
//
// Every key but R, R_list and template has the default of `Scenario`.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/experiments.hpp"
#include "hypflow/records.hpp"

namespace hypflow {

struct ScenarioConfig {
    Scenario scenario;
    double max_dr = 0.02;
};

struct SweepConfig {
    std::vector<double> radii;
    std::string template_name;
    double max_dr = 0.1;

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct Config {
    unsigned jobs = 1;
    std::vector<ScenarioConfig> scenarios;
    std::optional<SweepConfig> sweep;

    const ScenarioConfig& find(const std::string& name) const {
        for (const auto& s : scenarios) {
            if (s.scenario.name == name) {
                return s;
            }
        }
        throw ConfigError("no scenario named '" + name + "'", "template");
    }
};

/// Field-wise; a prescribed boundary compares by whether a function is set.
inline bool same_scenario(const Scenario& a, const Scenario& b) {
    return a.name == b.name && a.R == b.R && a.initial == b.initial && a.b == b.b &&
           a.eps == b.eps && a.curvature_cap == b.curvature_cap &&
           a.boundary.kind == b.boundary.kind && a.boundary.amplitude == b.boundary.amplitude &&
           a.boundary.period == b.boundary.period &&
           static_cast<bool>(a.boundary.value_at) == static_cast<bool>(b.boundary.value_at) &&
           a.horizon == b.horizon && a.sample_every == b.sample_every && a.seed == b.seed &&
           a.alpha_tol == b.alpha_tol && a.delta == b.delta && a.inner_radius == b.inner_radius &&
           a.stop_on_control_loss == b.stop_on_control_loss;
}

inline bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.max_dr == b.max_dr && same_scenario(a.scenario, b.scenario);
}

inline bool operator==(const Config& a, const Config& b) {
    return a.jobs == b.jobs && a.scenarios == b.scenarios && a.sweep == b.sweep;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double x = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x)) {
        throw ConfigError("key '" + key + "': expected a finite number, got '" + text + "'", key);
    }
    return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(text.c_str(), &end, 10);
    if (text.empty() || text[0] == '-' || end != text.c_str() + text.size() || errno != 0) {
        throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + text + "'",
                          key);
    }
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'", key);
}

inline InitialKind parse_initial(const std::string& text) {
    for (auto k : {InitialKind::exact_hyperbolic, InitialKind::banded_perturbation,
                   InitialKind::upper_barrier, InitialKind::lower_barrier}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw ConfigError("key 'initial': unknown initial kind '" + text + "'", "initial");
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Section = std::map<std::string, std::string>;

inline ScenarioConfig scenario_from(const std::string& name, const Section& kv) {
    ScenarioConfig sc;
    Scenario& s = sc.scenario;
    s.name = name;
    if (!kv.count("R")) {
        throw ConfigError("scenario '" + name + "': missing required key 'R'", "R");
    }
    std::string boundary = "frozen";
    for (const auto& [key, value] : kv) {
        if (key == "R") {
            s.R = parse_double(key, value);
        } else if (key == "initial") {
            s.initial = parse_initial(value);
        } else if (key == "b") {
            s.b = parse_double(key, value);
        } else if (key == "eps") {
            s.eps = parse_double(key, value);
        } else if (key == "curvature_cap") {
            s.curvature_cap = parse_double(key, value);
        } else if (key == "boundary") {
            boundary = value;
        } else if (key == "amplitude") {
            s.boundary.amplitude = parse_double(key, value);
        } else if (key == "period") {
            s.boundary.period = parse_double(key, value);
        } else if (key == "horizon") {
            s.horizon = parse_double(key, value);
        } else if (key == "sample_every") {
            s.sample_every = parse_double(key, value);
        } else if (key == "seed") {
            s.seed = parse_uint(key, value);
        } else if (key == "alpha_tol") {
            s.alpha_tol = parse_double(key, value);
        } else if (key == "delta") {
            s.delta = parse_double(key, value);
        } else if (key == "inner_radius") {
            s.inner_radius = parse_double(key, value);
        } else if (key == "stop_on_control_loss") {
            s.stop_on_control_loss = parse_bool(key, value);
        } else if (key == "max_dr") {
            sc.max_dr = parse_double(key, value);
        } else {
            throw ConfigError("scenario '" + name + "': unknown key '" + key + "'", key);
        }
    }
    if (boundary == "frozen") {
        s.boundary.kind = BoundaryKind::frozen;
    } else if (boundary == "hyperbolic_continuation") {
        s.boundary.kind = BoundaryKind::hyperbolic_continuation;
    } else if (boundary == "adversarial_oscillation") {
        s.boundary.kind = BoundaryKind::adversarial_oscillation;
    } else if (boundary == "exact") {
        s.boundary.kind = BoundaryKind::prescribed;
    } else {
        throw ConfigError("key 'boundary': unknown boundary '" + boundary + "'", "boundary");
    }
    if (!(sc.max_dr > 0.0)) {
        throw ConfigError("scenario '" + name + "': max_dr must be > 0", "max_dr");
    }
    s.validate();
    return sc;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
    }
    if (out.empty()) {
        throw ConfigError("key '" + key + "': empty list", key);
    }
    return out;
}

}  // namespace detail

inline Config parse_config(std::istream& in) {
    Config cfg;
    std::vector<std::pair<std::string, detail::Section>> scenarios;
    std::optional<detail::Section> run;
    std::optional<detail::Section> sweep;
    detail::Section* current = nullptr;

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        std::string line = detail::trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + "unterminated section header");
            }
            const std::string head = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (head == "run") {
                if (run) {
                    throw ConfigError(where + "duplicate [run] section");
                }
                current = &run.emplace();
            } else if (head == "sweep") {
                if (sweep) {
                    throw ConfigError(where + "duplicate [sweep] section");
                }
                current = &sweep.emplace();
            } else if (head.rfind("scenario", 0) == 0 && head.size() > 8 &&
                       (head[8] == ' ' || head[8] == '\t')) {
                const std::string name = detail::trim(std::string_view(head).substr(8));
                for (const auto& [existing, _] : scenarios) {
                    if (existing == name) {
                        throw ConfigError(where + "duplicate scenario '" + name + "'");
                    }
                }
                if (name.find_first_of("/\\ \t") != std::string::npos) {
                    throw ConfigError(where + "scenario name must not contain spaces or slashes");
                }
                current = &scenarios.emplace_back(name, detail::Section{}).second;
            } else {
                throw ConfigError(where + "unknown section [" + head + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected key = value");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (!current) {
            throw ConfigError(where + "key '" + key + "' outside any section", key);
        }
        if (!current->emplace(key, value).second) {
            throw ConfigError(where + "duplicate key '" + key + "'", key);
        }
    }

    if (run) {
        for (const auto& [key, value] : *run) {
            if (key == "jobs") {
                const auto jobs = detail::parse_uint(key, value);
                if (jobs < 1 || jobs > 1024) {
                    throw ConfigError("key 'jobs': must lie in [1, 1024]", key);
                }
                cfg.jobs = static_cast<unsigned>(jobs);
            } else {
                throw ConfigError("[run]: unknown key '" + key + "'", key);
            }
        }
    }
    for (const auto& [name, kv] : scenarios) {
        cfg.scenarios.push_back(detail::scenario_from(name, kv));
    }
    if (sweep) {
        SweepConfig sw;
        if (!sweep->count("R_list")) {
            throw ConfigError("[sweep]: missing required key 'R_list'", "R_list");
        }
        if (!sweep->count("template")) {
            throw ConfigError("[sweep]: missing required key 'template'", "template");
        }
        for (const auto& [key, value] : *sweep) {
            if (key == "R_list") {
                sw.radii = detail::parse_list(key, value);
            } else if (key == "template") {
                sw.template_name = value;
            } else if (key == "max_dr") {
                sw.max_dr = detail::parse_double(key, value);
                if (!(sw.max_dr > 0.0)) {
                    throw ConfigError("[sweep]: max_dr must be > 0", key);
                }
            } else {
                throw ConfigError("[sweep]: unknown key '" + key + "'", key);
            }
        }
        cfg.sweep = std::move(sw);
        cfg.find(cfg.sweep->template_name);
    }
    if (cfg.scenarios.empty()) {
        throw ConfigError("config defines no scenario");
    }
    return cfg;
}

inline Config parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return parse_config(in);
}

/// Canonical text; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const Config& cfg) {
    using detail::fmt17;
    std::ostringstream os;
    os << "[run]\njobs = " << cfg.jobs << "\n";
    for (const auto& sc : cfg.scenarios) {
        const Scenario& s = sc.scenario;
        os << "\n[scenario " << s.name << "]\n"
           << "R = " << fmt17(s.R) << "\n"
           << "initial = " << to_string(s.initial) << "\n"
           << "b = " << fmt17(s.b) << "\n"
           << "eps = " << fmt17(s.eps) << "\n"
           << "curvature_cap = " << fmt17(s.curvature_cap) << "\n"
           << "boundary = " << boundary_name(s) << "\n"
           << "amplitude = " << fmt17(s.boundary.amplitude) << "\n"
           << "period = " << fmt17(s.boundary.period) << "\n"
           << "horizon = " << fmt17(s.horizon) << "\n"
           << "sample_every = " << fmt17(s.sample_every) << "\n"
           << "seed = " << s.seed << "\n"
           << "alpha_tol = " << fmt17(s.alpha_tol) << "\n"
           << "delta = " << fmt17(s.delta) << "\n";
        if (s.inner_radius) {
            os << "inner_radius = " << fmt17(*s.inner_radius) << "\n";
        }
        os << "stop_on_control_loss = " << (s.stop_on_control_loss ? "true" : "false") << "\n"
           << "max_dr = " << fmt17(sc.max_dr) << "\n";
    }
    if (cfg.sweep) {
        os << "\n[sweep]\nR_list = ";
        for (std::size_t i = 0; i < cfg.sweep->radii.size(); ++i) {
            os << (i ? ", " : "") << fmt17(cfg.sweep->radii[i]);
        }
        os << "\ntemplate = " << cfg.sweep->template_name << "\n"
           << "max_dr = " << fmt17(cfg.sweep->max_dr) << "\n";
    }
    return os.str();
}

}  // namespace hypflow
