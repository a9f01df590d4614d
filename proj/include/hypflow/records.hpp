#pragma once

// Machine-readable run records: one JSON document per run, a CSV per sweep,
// and an append-only manifest.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypflow/experiments.hpp"

namespace hypflow {

inline constexpr int schema_version = 1;

inline const char* to_string(InitialKind k) {
    switch (k) {
    case InitialKind::exact_hyperbolic:
        return "exact_hyperbolic";
    case InitialKind::banded_perturbation:
        return "banded_perturbation";
    case InitialKind::upper_barrier:
        return "upper_barrier";
    case InitialKind::lower_barrier:
        return "lower_barrier";
    }
    return "?";
}

inline const char* to_string(BoundaryKind k) {
    switch (k) {
    case BoundaryKind::frozen:
        return "frozen";
    case BoundaryKind::hyperbolic_continuation:
        return "hyperbolic_continuation";
    case BoundaryKind::adversarial_oscillation:
        return "adversarial_oscillation";
    case BoundaryKind::prescribed:
        return "prescribed";
    }
    return "?";
}

/// Name used in configs and records; "exact" for the closed-form boundary.
inline std::string boundary_name(const Scenario& s) {
    return s.exact_boundary() ? "exact" : to_string(s.boundary.kind);
}

/// x rounded to 12 significant digits (the record precision).
inline double round12(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

namespace detail {

inline nlohmann::json number(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return round12(x);
}

inline nlohmann::json numbers(const std::vector<double>& xs) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : xs) {
        a.push_back(number(x));
    }
    return a;
}

}  // namespace detail

inline nlohmann::json scenario_json(const Scenario& s) {
    return {
        {"name", s.name},
        {"R", detail::number(s.R)},
        {"initial_kind", to_string(s.initial)},
        {"b", detail::number(s.b)},
        {"eps", detail::number(s.eps)},
        {"curvature_cap", detail::number(s.curvature_cap)},
        {"boundary",
         {{"kind", boundary_name(s)},
          {"amplitude", detail::number(s.boundary.amplitude)},
          {"period", detail::number(s.boundary.period)}}},
        {"horizon", detail::number(s.horizon)},
        {"sample_every", detail::number(s.sample_every)},
        {"seed", s.seed},
        {"alpha_tol", detail::number(s.alpha_tol)},
        {"delta", detail::number(s.delta)},
        {"inner_radius", detail::number(s.inner())},
        {"stop_on_control_loss", s.stop_on_control_loss},
    };
}

inline nlohmann::json record_json(const RunRecord& r) {
    nlohmann::json j;
    j["schema_version"] = schema_version;
    j["scenario"] = scenario_json(r.scenario);
    j["grid"] = {{"R_dom", detail::number(r.scenario.R)},
                 {"n_nodes", r.solver_meta.n_nodes},
                 {"dr", detail::number(r.solver_meta.dr)}};
    j["times"] = detail::numbers(r.trace.times);
    j["center_K"] = detail::numbers(r.trace.center_K);
    j["center_K_rescaled"] = detail::numbers(r.trace.center_K_rescaled);
    j["pinch_margin"] = detail::numbers(r.trace.pinch_margin);
    j["control_time"] = {{"value", detail::number(r.control.value)},
                         {"censored", r.control.censored}};
    j["sandwich_violation"] = detail::number(r.sandwich_violation);
    j["center_sandwich_violation"] = detail::number(r.center_sandwich_violation);
    j["failure_time"] = r.failure_time ? detail::number(*r.failure_time) : nlohmann::json(nullptr);
    j["solver_meta"] = {{"n_nodes", r.solver_meta.n_nodes},
                        {"dr", detail::number(r.solver_meta.dr)},
                        {"steps", r.solver_meta.steps},
                        {"wall_time_s", detail::number(r.solver_meta.wall_time)}};
    return j;
}

inline constexpr const char* sweep_csv_header =
    "R,control_time,censored,sandwich_violation,n_nodes,dr,wall_time_s";

namespace detail {

inline std::string g12(double x) {
    if (!std::isfinite(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace detail

/// One sweep row per radius, then `#fit,` trailer rows when a fit exists.
inline void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
    os << sweep_csv_header << '\n';
    for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
        const RunRecord& r = sweep.runs[i];
        os << detail::g12(sweep.radii[i]) << ',' << detail::g12(r.control.value) << ','
           << (r.control.censored ? 1 : 0) << ',' << detail::g12(r.sandwich_violation) << ','
           << r.solver_meta.n_nodes << ',' << detail::g12(r.solver_meta.dr) << ','
           << detail::g12(r.solver_meta.wall_time) << '\n';
    }
    if (sweep.fit) {
        os << "#fit,slope," << detail::g12(sweep.fit->slope) << '\n';
        os << "#fit,intercept," << detail::g12(sweep.fit->intercept) << '\n';
        os << "#fit,r_squared," << detail::g12(sweep.fit->r_squared) << '\n';
    }
}

/// One entry of the append-only manifest.
struct RunManifest {
    std::string created_at;     ///< ISO 8601, UTC
    std::string config_digest;  ///< SHA-256 hex of the effective config text
    std::vector<std::string> records;  ///< relative to the manifest's directory
    int schema_version = hypflow::schema_version;
};

inline nlohmann::json manifest_json(const RunManifest& m) {
    return {{"created_at", m.created_at},
            {"config_digest", m.config_digest},
            {"records", m.records},
            {"schema_version", m.schema_version}};
}

}  // namespace hypflow
