#pragma once

// Rotationally symmetric conformal Ricci flow on a hyperbolic ball.
//
// Writing g = e^{2v} h with h the hyperbolic metric, the flow reads
//     dv/dt = e^{-2v} (Lap_h v + 1),   Lap_h v = v_rr + coth(r) v_r
// in geodesic polar coordinates. The stepper is explicit Euler with second
// order central differences; under the step limit it is monotone, which is the
// discrete form of the comparison principle.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/hyperbolic.hpp"

namespace hypflow {

/// Uniform grid r_i = i * dr on [0, R_dom].
class RadialGrid {
public:
    static constexpr std::size_t min_nodes = 8;

    RadialGrid(double domain_radius, std::size_t n_nodes)
        : domain_radius_(domain_radius), n_nodes_(n_nodes) {
        if (!(domain_radius > 0.0) || std::isinf(domain_radius)) {
            throw DomainError("RadialGrid: domain radius must be finite and > 0");
        }
        if (n_nodes < min_nodes) {
            throw DomainError("RadialGrid: need at least 8 nodes");
        }
        dr_ = domain_radius / static_cast<double>(n_nodes - 1);
        half_coth_over_dr_.resize(n_nodes, 0.0);
        for (std::size_t i = 1; i < n_nodes; ++i) {
            half_coth_over_dr_[i] = 0.5 / (std::tanh(node(i)) * dr_);
        }
    }

    /// Smallest node count whose spacing does not exceed `max_dr`.
    static RadialGrid with_spacing(double domain_radius, double max_dr) {
        if (!(max_dr > 0.0)) {
            throw DomainError("RadialGrid: spacing must be > 0");
        }
        const auto cells = static_cast<std::size_t>(std::ceil(domain_radius / max_dr - 1e-9));
        return RadialGrid(domain_radius, std::max<std::size_t>(cells + 1, min_nodes));
    }

    double domain_radius() const noexcept { return domain_radius_; }
    std::size_t n_nodes() const noexcept { return n_nodes_; }
    double dr() const noexcept { return dr_; }
    double node(std::size_t i) const noexcept {
        return i + 1 == n_nodes_ ? domain_radius_ : static_cast<double>(i) * dr_;
    }

    // coth(r_i) / (2 dr); zero at the origin where the regularized stencil is used.
    double half_coth_over_dr(std::size_t i) const noexcept { return half_coth_over_dr_[i]; }

    friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
        return a.domain_radius_ == b.domain_radius_ && a.n_nodes_ == b.n_nodes_;
    }

private:
    double domain_radius_;
    std::size_t n_nodes_;
    double dr_ = 0.0;
    std::vector<double> half_coth_over_dr_;
};

/// v with g = e^{2v} h, sampled on a RadialGrid at one instant.
struct RelativeConformalField {
    std::vector<double> values;
    double time = 0.0;

    /// Absolute factor u = v + phi at node i (g = e^{2u} |dz|^2).
    double absolute(const RadialGrid& grid, std::size_t i) const {
        return values.at(i) + poincare_conformal_factor_at_radius(grid.node(i));
    }
};

enum class BoundaryKind {
    frozen,                   ///< boundary node keeps its value
    hyperbolic_continuation,  ///< boundary follows (e^{2 v_b(0)} + 2t) h, a scaled hyperbolic flow
    adversarial_oscillation,  ///< v_b(t) = v_b(0) + amplitude * sin(2 pi t / period)
    prescribed,               ///< v_b(t) given by a callable
};

/// Dirichlet data at r = R_dom. Values are advanced incrementally so the
/// scenario needs no knowledge of the initial field.
struct BoundaryScenario {
    BoundaryKind kind = BoundaryKind::frozen;
    double amplitude = 0.0;
    double period = 1.0;
    std::function<double(double)> value_at;  // prescribed only

    static BoundaryScenario frozen() { return {}; }
    static BoundaryScenario hyperbolic_continuation() {
        return {BoundaryKind::hyperbolic_continuation, 0.0, 1.0, {}};
    }
    static BoundaryScenario adversarial(double amplitude, double period) {
        BoundaryScenario s{BoundaryKind::adversarial_oscillation, amplitude, period, {}};
        s.validate();
        return s;
    }
    static BoundaryScenario prescribe(std::function<double(double)> f) {
        return {BoundaryKind::prescribed, 0.0, 1.0, std::move(f)};
    }

    void validate() const {
        if (!(amplitude >= 0.0)) {
            throw DomainError("BoundaryScenario: amplitude must be >= 0");
        }
        if (kind == BoundaryKind::adversarial_oscillation && !(period > 0.0)) {
            throw DomainError("BoundaryScenario: period must be > 0");
        }
        if (kind == BoundaryKind::prescribed && !value_at) {
            throw ContractError("BoundaryScenario: prescribed boundary without a function");
        }
    }

    /// Boundary value at t + dt given its value at t.
    double advance(double current, double t, double dt) const {
        switch (kind) {
        case BoundaryKind::frozen:
            return current;
        case BoundaryKind::hyperbolic_continuation:
            // e^{2v} + 2t is conserved by the spatially constant flow.
            return 0.5 * std::log(std::exp(2.0 * current) + 2.0 * dt);
        case BoundaryKind::adversarial_oscillation: {
            const double w = 2.0 * std::numbers::pi / period;
            return current + amplitude * (std::sin(w * (t + dt)) - std::sin(w * t));
        }
        case BoundaryKind::prescribed:
            return value_at(t + dt);
        }
        return current;
    }
};

struct SolverOptions {
    double safety = 0.9;        ///< sigma in (0, 1]
    double blowup_cap = 50.0;   ///< abort once max |v| exceeds this
    std::optional<double> fixed_dt;  ///< step with this dt instead of the automatic one
    bool keep_samples = true;  ///< false: keep only the first and latest field (times are all kept)
};

/// Sampled solution of one evolve call.
struct Trajectory {
    std::vector<RelativeConformalField> samples;
    std::vector<double> sample_times;
    double horizon = 0.0;
    std::size_t steps = 0;
    std::optional<double> failure_time;  ///< set when the blow-up cap tripped
    bool stopped_early = false;          ///< observer requested a stop
};

namespace detail {

inline void check_field(std::span<const double> v, const RadialGrid& grid) {
    if (v.size() != grid.n_nodes()) {
        throw ContractError("field has " + std::to_string(v.size()) + " values, grid has " +
                            std::to_string(grid.n_nodes()) + " nodes");
    }
}

inline void check_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw ContractError("conformal field contains a non-finite value");
        }
    }
}

// Interior and origin stencil.
inline double laplacian_at(std::span<const double> v, const RadialGrid& grid, std::size_t i) {
    const double inv_dr2 = 1.0 / (grid.dr() * grid.dr());
    if (i == 0) {
        // Ghost node v_{-1} = v_1; coth(r) v_r -> v_rr at r = 0.
        return 4.0 * (v[1] - v[0]) * inv_dr2;
    }
    return (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_dr2 +
           (v[i + 1] - v[i - 1]) * grid.half_coth_over_dr(i);
}

inline void advance_in_place(std::vector<double>& v, std::vector<double>& scratch, double t,
                             double dt, const RadialGrid& grid,
                             const BoundaryScenario& boundary) {
    const std::size_t n = v.size();
    scratch.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        scratch[i] = v[i] + dt * std::exp(-2.0 * v[i]) * (laplacian_at(v, grid, i) + 1.0);
    }
    scratch[n - 1] = boundary.advance(v[n - 1], t, dt);
    v.swap(scratch);
}

}  // namespace detail

/// Lap_h v for radial v. The last node uses one-sided second-order
/// differences; the stepper never reads it.
inline std::vector<double> laplace_beltrami_radial(std::span<const double> v,
                                                   const RadialGrid& grid) {
    detail::check_field(v, grid);
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        out[i] = detail::laplacian_at(v, grid, i);
    }
    const double dr = grid.dr();
    const double v_rr = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / (dr * dr);
    const double v_r = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dr);
    out[n - 1] = v_rr + v_r / std::tanh(grid.node(n - 1));
    return out;
}

inline std::vector<double> laplace_beltrami_radial(const RelativeConformalField& v,
                                                   const RadialGrid& grid) {
    return laplace_beltrami_radial(std::span<const double>(v.values), grid);
}

/// Largest monotone step: sigma * dr^2 * e^{2 min v} / 4. The factor 4 (not 2)
/// comes from the origin stencil 4 (v_1 - v_0) / dr^2.
inline double admissible_dt(std::span<const double> v, const RadialGrid& grid,
                            double safety = 0.9) {
    if (!(safety > 0.0 && safety <= 1.0)) {
        throw DomainError("admissible_dt: safety factor must lie in (0, 1]");
    }
    // The boundary node is Dirichlet data and does not enter the limit.
    const double vmin = *std::min_element(v.begin(), v.end() - 1);
    return safety * grid.dr() * grid.dr() * std::exp(2.0 * vmin) / 4.0;
}

/// One explicit Euler step; the boundary node is overwritten by the scenario.
inline RelativeConformalField step(const RelativeConformalField& state, double dt,
                                   const RadialGrid& grid, const BoundaryScenario& boundary,
                                   const SolverOptions& options = {}) {
    detail::check_field(state.values, grid);
    detail::check_finite(state.values);
    boundary.validate();
    if (!(dt > 0.0)) {
        throw DomainError("step: dt must be > 0");
    }
    const double limit = admissible_dt(state.values, grid, options.safety);
    if (dt > limit * (1.0 + 1e-12)) {
        throw CflViolation(dt, limit);
    }
    RelativeConformalField next{state.values, state.time + dt};
    std::vector<double> scratch;
    detail::advance_in_place(next.values, scratch, state.time, dt, grid, boundary);
    return next;
}

/// Called at every sample; returning false ends the integration.
using SampleObserver = std::function<bool(const RelativeConformalField&)>;

/// Integrates from initial.time to initial.time + t_end with the automatic step
/// (or options.fixed_dt), sampling every `sample_every` plus both end points.
inline Trajectory evolve(const RelativeConformalField& initial, const RadialGrid& grid,
                         const BoundaryScenario& boundary, double t_end, double sample_every,
                         const SolverOptions& options = {},
                         const SampleObserver& observer = {}) {
    detail::check_field(initial.values, grid);
    detail::check_finite(initial.values);
    boundary.validate();
    if (!(t_end > 0.0) || std::isinf(t_end)) {
        throw DomainError("evolve: t_end must be finite and > 0");
    }
    if (!(sample_every > 0.0)) {
        throw DomainError("evolve: sample_every must be > 0");
    }

    Trajectory traj;
    traj.horizon = t_end;
    traj.samples.push_back(initial);
    traj.sample_times.push_back(0.0);

    const double t0 = initial.time;
    std::vector<double> v = initial.values;
    std::vector<double> scratch;
    double elapsed = 0.0;
    std::size_t next_sample = 1;

    auto record = [&](double at) {
        if (options.keep_samples || traj.samples.size() < 2) {
            traj.samples.push_back(RelativeConformalField{v, t0 + at});
        } else {
            traj.samples.back() = RelativeConformalField{v, t0 + at};
        }
        traj.sample_times.push_back(at);
    };

    if (observer && !observer(traj.samples.back())) {
        traj.stopped_early = true;
        return traj;
    }

    while (elapsed < t_end) {
        const double target = std::min(t_end, static_cast<double>(next_sample) * sample_every);
        const double limit = admissible_dt(v, grid, options.safety);
        double dt = limit;
        if (options.fixed_dt) {
            if (*options.fixed_dt > limit * (1.0 + 1e-12)) {
                throw CflViolation(*options.fixed_dt, limit);
            }
            dt = *options.fixed_dt;
        }
        // Land exactly on the sample instant; absorb slivers below 1e-9 dt.
        bool hit = false;
        if (elapsed + dt * (1.0 + 1e-9) >= target) {
            dt = target - elapsed;
            hit = true;
        }
        detail::advance_in_place(v, scratch, t0 + elapsed, dt, grid, boundary);
        ++traj.steps;
        elapsed = hit ? target : elapsed + dt;

        double vmax = 0.0;
        bool finite = true;
        for (double x : v) {
            finite = finite && std::isfinite(x);
            vmax = std::max(vmax, std::abs(x));
        }
        if (!finite || vmax > options.blowup_cap) {
            traj.failure_time = elapsed;
            record(elapsed);
            return traj;
        }
        if (hit) {
            record(elapsed);
            while (static_cast<double>(next_sample) * sample_every <= elapsed * (1.0 + 1e-12)) {
                ++next_sample;
            }
            if (observer && !observer(traj.samples.back())) {
                traj.stopped_early = elapsed < t_end;
                return traj;
            }
        }
    }
    return traj;
}

/// sup over interior samples and non-boundary nodes of
/// |dv/dt - e^{-2v}(Lap_h v + 1)| with a three-point time derivative.
inline double residual_norm(const Trajectory& traj, const RadialGrid& grid) {
    const std::size_t m = traj.samples.size();
    if (m < 3) {
        throw ContractError("residual_norm: need at least 3 samples");
    }
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const auto& prev = traj.samples[k - 1].values;
        const auto& cur = traj.samples[k].values;
        const auto& next = traj.samples[k + 1].values;
        detail::check_field(cur, grid);
        const double h0 = traj.sample_times[k] - traj.sample_times[k - 1];
        const double h1 = traj.sample_times[k + 1] - traj.sample_times[k];
        const double a = -h1 / (h0 * (h0 + h1));
        const double b = (h1 - h0) / (h0 * h1);
        const double c = h0 / (h1 * (h0 + h1));
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double dvdt = a * prev[i] + b * cur[i] + c * next[i];
            const double rhs = std::exp(-2.0 * cur[i]) * (detail::laplacian_at(cur, grid, i) + 1.0);
            worst = std::max(worst, std::abs(dvdt - rhs));
        }
    }
    return worst;
}

}  // namespace hypflow
