#pragma once

// Scenario generators and verification campaigns.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hypflow/barriers.hpp"
#include "hypflow/curvature.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/solver.hpp"

namespace hypflow {

enum class InitialKind { exact_hyperbolic, banded_perturbation, upper_barrier, lower_barrier };

/// One simulated instance of the almost-hyperbolic hypotheses on B_h(0, R).
struct Scenario {
    std::string name = "scenario";
    double R = 0.0;
    InitialKind initial = InitialKind::exact_hyperbolic;
    double b = 0.1;              ///< band half-width: (1-b) h <= g(0) <= (1+b) h
    double eps = 0.05;           ///< barrier time scale (barrier initial kinds)
    double curvature_cap = 2.0;  ///< |K_{g(0)}| bound for banded data
    /// Dirichlet scenario. `prescribed` without a function means "exact":
    /// follow the closed-form flow of the initial family.
    BoundaryScenario boundary = BoundaryScenario::frozen();
    double horizon = 1.0;
    double sample_every = 0.01;
    std::uint64_t seed = 0;
    double alpha_tol = 0.5;
    double delta = 0.0;                  ///< ignore t < delta when measuring control time
    std::optional<double> inner_radius;  ///< sandwich diagnostics on r <= inner; default R/2
    bool stop_on_control_loss = false;   ///< end the run once the pinching margin goes negative

    double inner() const { return inner_radius.value_or(0.5 * R); }
    bool exact_boundary() const {
        return boundary.kind == BoundaryKind::prescribed && !boundary.value_at;
    }

    void validate() const {
        if (!(R > 0.0) || std::isinf(R)) {
            throw DomainError("Scenario '" + name + "': R must be finite and > 0");
        }
        if (!(horizon > 0.0) || std::isinf(horizon)) {
            throw DomainError("Scenario '" + name + "': horizon must be finite and > 0");
        }
        if (!(sample_every > 0.0)) {
            throw DomainError("Scenario '" + name + "': sample_every must be > 0");
        }
        if (initial != InitialKind::exact_hyperbolic && !(b > 0.0 && b <= 0.5)) {
            throw DomainError("Scenario '" + name + "': b must lie in (0, 1/2]");
        }
        if (!(curvature_cap > 0.0)) {
            throw DomainError("Scenario '" + name + "': curvature_cap must be > 0");
        }
        if (!(delta >= 0.0)) {
            throw DomainError("Scenario '" + name + "': delta must be >= 0");
        }
        if (!(inner() >= 0.0 && inner() <= R)) {
            throw DomainError("Scenario '" + name + "': inner radius must lie in [0, R]");
        }
        check_alpha_tol(alpha_tol);
        if (!exact_boundary()) {
            boundary.validate();
        }
    }
};

struct SolverMeta {
    std::size_t n_nodes = 0;
    double dr = 0.0;
    std::size_t steps = 0;
    double wall_time = 0.0;  ///< seconds
};

struct RunRecord {
    Scenario scenario;
    CurvatureTrace trace;
    ControlTime control;
    /// Worst signed distance of e^{2v} / (1+2t) from [1-b, 1+b] over r <= inner
    /// and all samples; negative means the sandwich was violated.
    double sandwich_violation = 0.0;
    double center_sandwich_violation = 0.0;  ///< same, r = 0 only
    SolverMeta solver_meta;
    std::optional<double> failure_time;  ///< blow-up cap tripped
    RelativeConformalField final_state;
};

namespace detail {

// Generator shape: 1..8 even Gaussian rings with widths in hyperbolic units.
inline constexpr int max_bumps = 8;
inline constexpr double min_bump_width = 1.0;
inline constexpr double max_bump_width = 3.0;
inline constexpr int max_generation_attempts = 100;

inline std::vector<double> random_radial_profile(const RadialGrid& grid, std::uint64_t seed,
                                                 int attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> count(1, max_bumps);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int bumps = count(rng);
    const double R = grid.domain_radius();
    std::vector<double> f(grid.n_nodes(), 0.0);
    for (int k = 0; k < bumps; ++k) {
        const double center = R * unit(rng);
        const double width = min_bump_width + (max_bump_width - min_bump_width) * unit(rng);
        const double amp = 2.0 * unit(rng) - 1.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double r = grid.node(i);
            const double a = (r - center) / width;
            const double c = (r + center) / width;
            // Mirrored pair keeps the profile even in r, hence smooth at the origin.
            f[i] += amp * (std::exp(-0.5 * a * a) + std::exp(-0.5 * c * c));
        }
    }
    return f;
}

inline double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace detail

/// Initial relative factor v(., 0) for the scenario's family.
inline RelativeConformalField generate_initial(const Scenario& scenario, const RadialGrid& grid) {
    scenario.validate();
    RelativeConformalField field{std::vector<double>(grid.n_nodes(), 0.0), 0.0};
    switch (scenario.initial) {
    case InitialKind::exact_hyperbolic:
        return field;
    case InitialKind::upper_barrier:
    case InitialKind::lower_barrier: {
        const BarrierParams p = compute_barrier_params(scenario.b, scenario.eps);
        const DiscFlow flow =
            scenario.initial == InitialKind::upper_barrier ? p.upper_flow() : p.lower_flow();
        for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
            field.values[i] = flow.relative_at_radius(grid.node(i), 0.0);
        }
        return field;
    }
    case InitialKind::banded_perturbation:
        break;
    }

    const double lo = 0.5 * std::log1p(-scenario.b);
    const double hi = 0.5 * std::log1p(scenario.b);
    double best = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < detail::max_generation_attempts; ++attempt) {
        std::vector<double> f = detail::random_radial_profile(grid, scenario.seed, attempt);
        const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
        const double span = *fmax - *fmin;
        if (!(span > 1e-12)) {
            continue;
        }
        const double base = *fmin;
        for (double& x : f) {
            x = std::clamp(lo + (hi - lo) * (x - base) / span, lo, hi);
        }
        const double k = detail::max_abs(gauss_curvature(std::span<const double>(f), grid));
        best = std::min(best, k);
        if (k <= scenario.curvature_cap) {
            field.values = std::move(f);
            return field;
        }
    }
    throw GenerationError("generate_initial: no banded field met |K| <= " +
                              std::to_string(scenario.curvature_cap) + " in 100 attempts; best " +
                              std::to_string(best),
                          best);
}

/// Boundary data the run actually uses (resolves the "exact" request).
inline BoundaryScenario resolve_boundary(const Scenario& scenario) {
    if (!scenario.exact_boundary()) {
        return scenario.boundary;
    }
    const double R = scenario.R;
    switch (scenario.initial) {
    case InitialKind::exact_hyperbolic:
        return BoundaryScenario::prescribe([](double t) { return 0.5 * std::log1p(2.0 * t); });
    case InitialKind::upper_barrier:
    case InitialKind::lower_barrier: {
        const BarrierParams p = compute_barrier_params(scenario.b, scenario.eps);
        const DiscFlow flow =
            scenario.initial == InitialKind::upper_barrier ? p.upper_flow() : p.lower_flow();
        return BoundaryScenario::prescribe(
            [flow, R](double t) { return flow.relative_at_radius(R, t); });
    }
    case InitialKind::banded_perturbation:
        break;
    }
    throw DomainError("Scenario '" + scenario.name +
                      "': banded_perturbation has no closed-form boundary");
}

/// Signed distance of q from [lo, hi]; negative outside.
inline double band_distance(double q, double lo, double hi) {
    return std::min(q - lo, hi - q);
}

inline RunRecord run_scenario(const Scenario& scenario, const RadialGrid& grid,
                              const SolverOptions& base_options = {}) {
    scenario.validate();
    if (std::abs(grid.domain_radius() - scenario.R) > 1e-12 * scenario.R) {
        throw ContractError("run_scenario: grid radius does not match scenario R");
    }
    const auto started = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.scenario = scenario;
    rec.trace.alpha_tol = scenario.alpha_tol;
    rec.sandwich_violation = std::numeric_limits<double>::infinity();
    rec.center_sandwich_violation = std::numeric_limits<double>::infinity();

    const RelativeConformalField initial = generate_initial(scenario, grid);
    const BoundaryScenario boundary = resolve_boundary(scenario);

    std::size_t inner_nodes = 0;
    while (inner_nodes < grid.n_nodes() && grid.node(inner_nodes) <= scenario.inner() + 1e-12) {
        ++inner_nodes;
    }
    const double lo = 1.0 - scenario.b;
    const double hi = 1.0 + scenario.b;

    auto observe = [&](const RelativeConformalField& s) {
        rec.trace.append(s.time, center_curvature(s.values, grid));
        const double shift = std::log1p(2.0 * s.time);
        for (std::size_t i = 0; i < inner_nodes; ++i) {
            const double d = band_distance(std::exp(2.0 * s.values[i] - shift), lo, hi);
            rec.sandwich_violation = std::min(rec.sandwich_violation, d);
            if (i == 0) {
                rec.center_sandwich_violation = std::min(rec.center_sandwich_violation, d);
            }
        }
        if (scenario.stop_on_control_loss && s.time >= scenario.delta &&
            rec.trace.pinch_margin.back() < 0.0) {
            return false;
        }
        return true;
    };

    SolverOptions options = base_options;
    options.keep_samples = false;
    Trajectory traj =
        evolve(initial, grid, boundary, scenario.horizon, scenario.sample_every, options, observe);

    rec.control = control_time(rec.trace, scenario.delta);
    rec.failure_time = traj.failure_time;
    rec.final_state = traj.samples.back();
    if (traj.failure_time && rec.trace.times.back() < rec.final_state.time) {
        // The observer does not see the aborted sample.
        rec.trace.append(rec.final_state.time, center_curvature(rec.final_state.values, grid));
    }
    rec.solver_meta.n_nodes = grid.n_nodes();
    rec.solver_meta.dr = grid.dr();
    rec.solver_meta.steps = traj.steps;
    rec.solver_meta.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least squares of log(y) = intercept + slope * x.
inline LinearFit fit_log_linear(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ContractError("fit_log_linear: size mismatch");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw DomainError("fit_log_linear: need at least 2 points");
    }
    double mx = 0.0;
    double my = 0.0;
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] > 0.0)) {
            throw DomainError("fit_log_linear: values must be > 0");
        }
        ly[i] = std::log(y[i]);
        mx += x[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 1e-12 * (1.0 + mx * mx))) {
        throw DomainError("fit_log_linear: degenerate design (all x equal)");
    }
    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

struct GridPolicy {
    double max_dr = 0.02;
    RadialGrid grid_for(double R) const { return RadialGrid::with_spacing(R, max_dr); }
};

struct SweepResult {
    std::vector<double> radii;
    std::vector<RunRecord> runs;  ///< in radius order
    std::optional<LinearFit> fit;
    std::vector<double> censored_radii;

    bool inconclusive() const { return !fit.has_value(); }

    const LinearFit& checked_fit() const {
        if (!fit) {
            throw SweepInconclusive("sweep inconclusive: every run was censored; raise the horizon");
        }
        return *fit;
    }
};

/// Fits log T_ctrl against R over the uncensored runs.
inline std::optional<LinearFit> fit_control_times(const std::vector<double>& radii,
                                                  const std::vector<RunRecord>& runs,
                                                  std::vector<double>* censored = nullptr) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].control.censored) {
            if (censored) {
                censored->push_back(radii[i]);
            }
            continue;
        }
        xs.push_back(radii[i]);
        ys.push_back(runs[i].control.value);
    }
    if (xs.empty()) {
        return std::nullopt;
    }
    return fit_log_linear(xs, ys);
}

/// Calls fn(0..n-1) on up to `jobs` threads; rethrows the first failure by index.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto workers = static_cast<unsigned>(std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Runs the template at every radius; `jobs` workers, results in radius order.
inline SweepResult control_time_sweep(const std::vector<double>& radii, const Scenario& tmpl,
                                      const GridPolicy& policy, unsigned jobs = 1,
                                      const SolverOptions& options = {}) {
    if (radii.size() < 3) {
        throw DomainError("control_time_sweep: need at least 3 radii");
    }
    std::vector<Scenario> scenarios;
    for (double R : radii) {
        Scenario s = tmpl;
        s.R = R;
        s.inner_radius.reset();
        s.validate();
        scenarios.push_back(std::move(s));
    }
    SweepResult out;
    out.radii = radii;
    out.runs.resize(radii.size());
    parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
        out.runs[i] = run_scenario(scenarios[i], policy.grid_for(scenarios[i].R), options);
    });
    out.fit = fit_control_times(out.radii, out.runs, &out.censored_radii);
    return out;
}

}  // namespace hypflow
