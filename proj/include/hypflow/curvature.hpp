#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hypflow/errors.hpp"
#include "hypflow/solver.hpp"

namespace hypflow {

/// K = e^{-2v} (-Lap_h v - 1) for g = e^{2v} h, using the solver's stencil.
inline std::vector<double> gauss_curvature(std::span<const double> v, const RadialGrid& grid) {
    std::vector<double> lap = laplace_beltrami_radial(v, grid);
    for (std::size_t i = 0; i < lap.size(); ++i) {
        lap[i] = std::exp(-2.0 * v[i]) * (-lap[i] - 1.0);
    }
    return lap;
}

inline std::vector<double> gauss_curvature(const RelativeConformalField& v,
                                           const RadialGrid& grid) {
    return gauss_curvature(std::span<const double>(v.values), grid);
}

/// K at r = 0 only.
inline double center_curvature(std::span<const double> v, const RadialGrid& grid) {
    detail::check_field(v, grid);
    return std::exp(-2.0 * v[0]) * (-detail::laplacian_at(v, grid, 0) - 1.0);
}

/// Center curvature of g(t) and of the rescaled metric g(t) / (1 + 2t).
struct CurvatureTrace {
    double alpha_tol = 0.0;
    std::vector<double> times;
    std::vector<double> center_K;
    std::vector<double> center_K_rescaled;
    std::vector<double> pinch_margin;  ///< alpha_tol - |K_rescaled + 1|

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }

    void append(double t, double k) {
        if (!times.empty() && !(t > times.back())) {
            throw ContractError("CurvatureTrace: times must be strictly increasing");
        }
        const double rescaled = (1.0 + 2.0 * t) * k;
        times.push_back(t);
        center_K.push_back(k);
        center_K_rescaled.push_back(rescaled);
        pinch_margin.push_back(alpha_tol - std::abs(rescaled + 1.0));
    }
};

inline void check_alpha_tol(double alpha_tol) {
    if (!(alpha_tol > 0.0 && alpha_tol <= 1.0)) {
        throw DomainError("alpha_tol must lie in (0, 1]");
    }
}

/// Trace over the stored samples; times are the fields' absolute flow times.
inline CurvatureTrace rescaled_center_trace(const Trajectory& traj, const RadialGrid& grid,
                                            double alpha_tol) {
    check_alpha_tol(alpha_tol);
    if (traj.samples.empty()) {
        throw ContractError("rescaled_center_trace: empty trajectory");
    }
    CurvatureTrace trace;
    trace.alpha_tol = alpha_tol;
    for (const auto& s : traj.samples) {
        trace.append(s.time, center_curvature(s.values, grid));
    }
    return trace;
}

struct ControlTime {
    double value = 0.0;
    bool censored = false;  ///< true: margin never went negative, value is the horizon

    friend bool operator==(const ControlTime&, const ControlTime&) = default;
};

/// First time at or after `delay` where the pinching margin is negative,
/// linearly interpolated from the preceding sample. Censored at the last
/// sample time if the margin stays nonnegative.
inline ControlTime control_time(const CurvatureTrace& trace, double delay = 0.0) {
    if (trace.empty()) {
        throw ContractError("control_time: empty trace");
    }
    bool have_prev = false;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.times[i] < delay) {
            continue;
        }
        const double m = trace.pinch_margin[i];
        if (m < 0.0) {
            if (!have_prev) {
                return {trace.times[i], false};
            }
            const double t0 = trace.times[i - 1];
            const double m0 = trace.pinch_margin[i - 1];
            const double t = t0 + (trace.times[i] - t0) * m0 / (m0 - m);
            return {t, false};
        }
        have_prev = true;
    }
    return {trace.times.back(), true};
}

}  // namespace hypflow
