#pragma once

// hypflow command line: constants | run | sweep.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "hypflow/barriers.hpp"
#include "hypflow/config.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/experiments.hpp"
#include "hypflow/records.hpp"
#include "hypflow/schedule.hpp"

namespace hypflow::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_flagged = 3,
    exit_io = 4,
    exit_inconclusive = 5,
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return os.str();
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

namespace fs = std::filesystem;

inline void write_file(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) {
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        }
        os << text;
        os.flush();
        if (!os) {
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " +
                      ec.message());
    }
}

inline void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

/// Appends to <out>/manifest.json, a JSON array of manifest entries.
inline void append_manifest(const fs::path& out, const RunManifest& entry) {
    const fs::path path = out / "manifest.json";
    nlohmann::json all = nlohmann::json::array();
    if (fs::exists(path)) {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot read '" + path.string() + "'");
        }
        try {
            in >> all;
        } catch (const nlohmann::json::exception& e) {
            throw IoError("corrupt manifest '" + path.string() + "': " + e.what());
        }
        if (!all.is_array()) {
            throw IoError("corrupt manifest '" + path.string() + "': not an array");
        }
    }
    all.push_back(manifest_json(entry));
    write_file(path, all.dump(2) + "\n");
}

inline fs::path out_dir(const std::optional<std::string>& flag) {
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv("HYPFLOW_OUT"); env && *env) {
        return env;
    }
    return "hypflow_out";
}

inline std::string radius_tag(double R) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", R);
    return buf;
}

struct Common {
    std::string config;
    std::optional<std::string> out;
    std::optional<unsigned> jobs;
    std::optional<std::uint64_t> seed;
};

inline Config load(const Common& c) {
    Config cfg = load_config(c.config);
    if (c.seed) {
        for (auto& s : cfg.scenarios) {
            s.scenario.seed = *c.seed;
        }
    }
    if (c.jobs) {
        cfg.jobs = *c.jobs;
    }
    return cfg;
}

inline int command_constants(double b, double eps, std::optional<double> delta_flag,
                             double alpha_tol, std::ostream& out, std::ostream& err) {
    if (!(b > 0.0 && b <= 0.5)) {
        err << "error: --b must lie in (0, 1/2]\n";
        return exit_config;
    }
    if (!(eps > 0.0) || std::isinf(eps)) {
        err << "error: --eps must be finite and > 0\n";
        return exit_config;
    }
    const double delta = delta_flag.value_or(0.5 * eps);
    if (!(delta > 0.0 && delta < eps)) {
        err << "error: --delta must lie in (0, eps)\n";
        return exit_config;
    }
    if (!(alpha_tol > 0.0 && alpha_tol <= 1.0)) {
        err << "error: --alpha-tol must lie in (0, 1]\n";
        return exit_config;
    }
    const BarrierParams p = compute_barrier_params(b, eps);
    const ConstantBundle k = build_constants(eps, b, delta, alpha_tol);
    const std::vector<std::pair<const char*, double>> rows = {
        {"J", p.J},
        {"j", p.j},
        {"j0", p.j0},
        {"alpha_disc", p.alpha_disc},
        {"mu", p.mu},
        {"Lambda", k.Lambda},
        {"c", k.c},
        {"R_min", k.R_min},
        {"log_one_minus_j_sq", p.log_one_minus_j_sq},
        {"log_one_minus_alpha_sq", p.log_one_minus_alpha_sq},
        {"log_mu_sq_minus_one", p.log_mu_sq_minus_one},
    };
    nlohmann::json machine;
    machine["b"] = b;
    machine["eps"] = eps;
    machine["delta"] = delta;
    machine["alpha_tol"] = alpha_tol;
    for (const auto& [name, value] : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", value);
        out << name << " = " << buf << '\n';
        machine[name] = value;
    }
    out << machine.dump() << '\n';
    return exit_ok;
}

inline std::string record_text(const RunRecord& r) { return record_json(r).dump(2) + "\n"; }

inline int command_run(const Common& c, std::ostream& out) {
    const Config cfg = load(c);
    const fs::path dir = out_dir(c.out);
    ensure_dir(dir);

    std::vector<RunRecord> records(cfg.scenarios.size());
    parallel_for(cfg.scenarios.size(), cfg.jobs, [&](std::size_t i) {
        const ScenarioConfig& sc = cfg.scenarios[i];
        records[i] =
            run_scenario(sc.scenario, RadialGrid::with_spacing(sc.scenario.R, sc.max_dr));
    });

    RunManifest manifest;
    manifest.created_at = utc_timestamp();
    manifest.config_digest = sha256_hex(serialize_config(cfg));
    bool flagged = false;
    for (const RunRecord& r : records) {
        const std::string file = r.scenario.name + ".json";
        write_file(dir / file, record_text(r));
        manifest.records.push_back(file);
        flagged = flagged || r.failure_time.has_value();
        out << r.scenario.name << ": control_time = " << r.control.value
            << (r.control.censored ? " (censored)" : "")
            << ", sandwich_violation = " << r.sandwich_violation;
        if (r.failure_time) {
            out << ", BLOW-UP at t = " << *r.failure_time;
        }
        out << '\n';
    }
    append_manifest(dir, manifest);
    return flagged ? exit_flagged : exit_ok;
}

inline int command_sweep(const Common& c, std::optional<double> synthetic_slope,
                         std::ostream& out, std::ostream& err) {
    const Config cfg = load(c);
    if (!cfg.sweep) {
        throw ConfigError("config has no [sweep] section", "sweep");
    }
    const SweepConfig& sw = *cfg.sweep;
    const Scenario& tmpl = cfg.find(sw.template_name).scenario;
    const fs::path dir = out_dir(c.out);
    ensure_dir(dir);

    SweepResult result;
    if (synthetic_slope) {
        // Fitter self-test: T_ctrl(R) = exp(slope * R), no simulation.
        if (sw.radii.size() < 3) {
            throw DomainError("control_time_sweep: need at least 3 radii");
        }
        result.radii = sw.radii;
        for (double R : sw.radii) {
            RunRecord r;
            r.scenario = tmpl;
            r.scenario.R = R;
            r.control = {std::exp(*synthetic_slope * R), false};
            result.runs.push_back(std::move(r));
        }
        result.fit = fit_control_times(result.radii, result.runs, &result.censored_radii);
    } else {
        result = control_time_sweep(sw.radii, tmpl, GridPolicy{sw.max_dr}, cfg.jobs);
    }

    RunManifest manifest;
    manifest.created_at = utc_timestamp();
    manifest.config_digest = sha256_hex(serialize_config(cfg));
    bool flagged = false;
    if (!synthetic_slope) {
        for (const RunRecord& r : result.runs) {
            const std::string file =
                "sweep_" + sw.template_name + "_R" + radius_tag(r.scenario.R) + ".json";
            write_file(dir / file, record_text(r));
            manifest.records.push_back(file);
            flagged = flagged || r.failure_time.has_value();
        }
    }
    std::ostringstream csv;
    write_sweep_csv(csv, result);
    const std::string csv_file = "sweep_" + sw.template_name + ".csv";
    write_file(dir / csv_file, csv.str());
    manifest.records.push_back(csv_file);
    append_manifest(dir, manifest);

    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        out << "R = " << result.radii[i] << ": control_time = " << result.runs[i].control.value
            << (result.runs[i].control.censored ? " (censored)" : "") << '\n';
    }
    if (result.inconclusive()) {
        err << "sweep inconclusive: every run was censored; raise the horizon\n";
        return exit_inconclusive;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "slope = %.12g\nintercept = %.12g\nr_squared = %.12g\n",
                  result.fit->slope, result.fit->intercept, result.fit->r_squared);
    out << buf;
    return flagged ? exit_flagged : exit_ok;
}

}  // namespace detail

/// Runs the CLI on `args` (without the program name) and returns the exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conformal Ricci flow lab on the Poincare disc"};
    app.require_subcommand(1);

    double b = 0.0;
    double eps = 0.0;
    std::optional<double> delta;
    double alpha_tol = 0.5;
    auto* constants = app.add_subcommand("constants", "Print the barrier and schedule constants");
    constants->add_option("--b", b, "Band half-width in (0, 1/2]")->required();
    constants->add_option("--eps", eps, "Barrier time scale > 0")->required();
    constants->add_option("--delta", delta, "Delay in (0, eps); default eps/2");
    constants->add_option("--alpha-tol", alpha_tol, "Curvature tolerance in (0, 1]");

    detail::Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Config file")->required();
        sub->add_option("--out", common.out, "Output directory (default $HYPFLOW_OUT)");
        sub->add_option("--jobs", common.jobs, "Worker threads")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--seed", common.seed, "Override every scenario seed");
    };
    auto* run = app.add_subcommand("run", "Run every scenario of a config");
    add_common(run);
    std::optional<double> synthetic_slope;
    auto* sweep = app.add_subcommand("sweep", "Control-time sweep over R_list");
    add_common(sweep);
    sweep->add_option("--synthetic-slope", synthetic_slope,
                      "Test only: fit exp(slope * R) instead of simulating")
        ->group("");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }

    try {
        if (constants->parsed()) {
            return detail::command_constants(b, eps, delta, alpha_tol, out, err);
        }
        if (run->parsed()) {
            return detail::command_run(common, out);
        }
        return detail::command_sweep(common, synthetic_slope, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const SweepInconclusive& e) {
        err << e.what() << '\n';
        return exit_inconclusive;
    } catch (const std::exception& e) {
        // Domain, precondition, generation and consistency failures all trace
        // back to the requested parameters.
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
}

}  // namespace hypflow::cli
