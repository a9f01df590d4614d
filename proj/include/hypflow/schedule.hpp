#pragma once

// Constants and time bookkeeping for iterating the barrier / curvature-control
// step over blocks of length eps in successively rescaled time:
//   block i covers global times [S_i, S_{i+1}],  S_i = sum_{k<i} eps (1+2eps)^k
//                                               = ((1+2eps)^i - 1) / 2.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hypflow/barriers.hpp"
#include "hypflow/errors.hpp"

namespace hypflow {

struct ConstantBundle {
    double eps = 0.0;
    double b = 0.0;
    double delta = 0.0;
    double alpha_tol = 0.0;
    double Lambda = 0.0;  ///< J(b) + 2
    double c = 0.0;       ///< log(1 + 2 eps) / (4 Lambda)
    double R_min = 0.0;   ///< smallest radius for the e^{cR} guarantee
};

inline ConstantBundle build_constants(double eps, double b, double delta, double alpha_tol) {
    if (!(eps > 0.0) || std::isinf(eps)) {
        throw DomainError("build_constants: eps must be finite and > 0");
    }
    if (!(b > 0.0 && b <= 0.5)) {
        throw DomainError("build_constants: b must lie in (0, 1/2]");
    }
    if (!(delta > 0.0 && delta < eps)) {
        throw DomainError("build_constants: delta must lie in (0, eps)");
    }
    if (!(alpha_tol > 0.0 && alpha_tol <= 1.0)) {
        throw DomainError("build_constants: alpha_tol must lie in (0, 1]");
    }
    ConstantBundle k;
    k.eps = eps;
    k.b = b;
    k.delta = delta;
    k.alpha_tol = alpha_tol;
    k.Lambda = barrier_J(b, eps) + 2.0;
    const double growth = std::log1p(2.0 * eps);
    k.c = growth / (4.0 * k.Lambda);
    k.R_min = std::max((1.0 + 2.0 / growth) * k.Lambda,
                       4.0 * k.Lambda * std::log(2.0 * std::sqrt(1.0 + 2.0 * eps)) / growth);
    return k;
}

/// S_i = sum_{k=0}^{i-1} eps (1+2eps)^k in closed form.
inline double block_start(std::int64_t i, double eps) {
    return 0.5 * std::expm1(static_cast<double>(i) * std::log1p(2.0 * eps));
}

/// Global time of block-local time s in block i: S_i + (1+2eps)^i s.
inline double rescale_time_map(std::int64_t i, double s, double eps) {
    if (i < 0) {
        throw DomainError("rescale_time_map: block index must be >= 0");
    }
    if (!(s >= 0.0)) {
        throw DomainError("rescale_time_map: s must be >= 0");
    }
    const double factor = std::exp(static_cast<double>(i) * std::log1p(2.0 * eps));
    return block_start(i, eps) + factor * s;
}

/// gamma_s = (s - delta) / (1 + 2 delta): restarting the flow at gamma_s and
/// rescaling by 1 + 2 gamma_s reaches time s after local time delta.
inline double gamma_shift(double s, double delta) {
    if (!(s >= delta)) {
        throw DomainError("gamma_shift: s must be >= delta");
    }
    return (s - delta) / (1.0 + 2.0 * delta);
}

struct IterationSchedule {
    double T = 0.0;
    double R = 0.0;
    double eps = 0.0;
    /// Largest l with S_{l+1} <= T; -1 when T < eps (no complete block).
    std::int64_t q = 0;
    std::int64_t blocks_available = 0;  ///< floor(R / Lambda)
    std::int64_t N = 0;                 ///< min{q, floor(R/Lambda) - 1}
    std::vector<double> tau;                ///< tau_1 .. tau_{N+1}
    std::vector<double> cumulative_starts;  ///< S_0 .. S_{N+1}
    double T_max = 0.0;

    double tau_at(std::int64_t i) const { return tau.at(static_cast<std::size_t>(i - 1)); }
};

inline IterationSchedule build_schedule(double T, double R, const ConstantBundle& bundle) {
    if (!(T > 0.0) || std::isinf(T)) {
        throw DomainError("build_schedule: T must be finite and > 0");
    }
    if (!(R >= bundle.Lambda)) {
        throw PreconditionError("build_schedule: R < Lambda, floor(R / Lambda) >= 1 fails");
    }
    const double eps = bundle.eps;
    const double growth = std::log1p(2.0 * eps);

    IterationSchedule s;
    s.T = T;
    s.R = R;
    s.eps = eps;

    // S_{l+1} <= T  <=>  (1+2eps)^{l+1} <= 1 + 2T; closed form, then repair rounding.
    std::int64_t q = static_cast<std::int64_t>(std::floor(std::log1p(2.0 * T) / growth)) - 1;
    while (q >= 0 && block_start(q + 1, eps) > T) {
        --q;
    }
    while (block_start(q + 2, eps) <= T) {
        ++q;
    }
    s.q = q;
    s.blocks_available = static_cast<std::int64_t>(std::floor(R / bundle.Lambda));
    s.N = std::min(q, s.blocks_available - 1);

    for (std::int64_t i = 0; i <= s.N + 1; ++i) {
        s.cumulative_starts.push_back(block_start(i, eps));
    }
    for (std::int64_t i = 1; i <= s.N + 1; ++i) {
        const double factor = std::exp(static_cast<double>(i) * growth);
        s.tau.push_back((T - block_start(i, eps)) / factor);
    }
    s.T_max = std::min(T, 0.5 * std::expm1(static_cast<double>(s.blocks_available) * growth));
    return s;
}

struct ExponentialMargins {
    /// exp[floor(R/Lambda) log(1+2eps)] - 1 - exp[(R/Lambda - 1) log(1+2eps) / 2]
    double block_count = 0.0;
    /// exp[R log(1+2eps) / (2 Lambda)] / (2 sqrt(1+2eps)) - e^{cR}
    double exponential = 0.0;
};

inline ExponentialMargins verify_exponential_bounds(double R, const ConstantBundle& bundle) {
    if (!(R >= bundle.R_min)) {
        throw PreconditionError("verify_exponential_bounds: R < R_min");
    }
    const double growth = std::log1p(2.0 * bundle.eps);
    const double ratio = R / bundle.Lambda;
    ExponentialMargins m;
    m.block_count = std::expm1(std::floor(ratio) * growth) - std::exp(0.5 * (ratio - 1.0) * growth);
    m.exponential = std::exp(0.5 * ratio * growth) / (2.0 * std::sqrt(1.0 + 2.0 * bundle.eps)) -
                    std::exp(bundle.c * R);
    return m;
}

/// Guaranteed control horizon min{T, (exp[floor(R/Lambda) log(1+2eps)] - 1)/2}.
inline double guaranteed_horizon(double T, double R, const ConstantBundle& bundle) {
    const double blocks = std::floor(R / bundle.Lambda);
    return std::min(T, 0.5 * std::expm1(blocks * std::log1p(2.0 * bundle.eps)));
}

}  // namespace hypflow
