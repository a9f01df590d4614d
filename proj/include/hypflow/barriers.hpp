#pragma once

// Explicit barrier flows trapping a rescaled almost-hyperbolic Ricci flow.
//
// For b in (0, 1/2] and a time scale eps the construction works on the
// Euclidean disc D_j, j = tanh((J - 2)/2), and sandwiches the flow between
// rescaled hyperbolic flows on the discs of radius alpha(j) < 1 < mu(j).
// J grows like 1/b, so 1 - j^2 is below double resolution for small b: every
// radius is carried together with the log of its gap to 1.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypflow/errors.hpp"
#include "hypflow/hyperbolic.hpp"

namespace hypflow {

/// Ricci flow of the hyperbolic metric of the disc of radius rho, scaled by kappa:
///     H(z, t) = phi(z / rho) + 1/2 log kappa + 1/2 log(1 + 2t / (kappa rho^2)).
/// Its Gauss curvature is -1 / (kappa rho^2 + 2t) everywhere.
class DiscFlow {
public:
    /// `shrunk` selects rho < 1; `log_gap` is log|1 - rho^2| (-inf for rho = 1).
    DiscFlow(bool shrunk, double log_gap, double scale)
        : shrunk_(shrunk), log_gap_(log_gap), scale_(scale) {
        if (!(scale > 0.0)) {
            throw DomainError("DiscFlow: scale must be > 0");
        }
        const double gap = std::exp(log_gap);
        if (shrunk && !(gap < 1.0)) {
            throw DomainError("DiscFlow: shrunk disc needs 1 - rho^2 in (0, 1)");
        }
        log_radius_sq_ = shrunk ? std::log1p(-gap) : std::log1p(gap);
    }

    static DiscFlow with_radius(double rho, double scale) {
        if (!(rho > 0.0)) {
            throw DomainError("DiscFlow: radius must be > 0");
        }
        return DiscFlow(rho < 1.0, std::log(std::abs(1.0 - rho * rho)), scale);
    }

    double radius() const { return std::exp(0.5 * log_radius_sq_); }
    double radius_sq() const { return std::exp(log_radius_sq_); }
    double scale() const noexcept { return scale_; }

    /// phi(z / rho) - phi(z) given log(1 - |z|^2).
    double spatial_offset(double log_one_minus_z_sq) const {
        const double ratio = std::exp(log_gap_ - log_one_minus_z_sq);
        if (shrunk_) {
            if (!(ratio < 1.0)) {
                throw DomainError("DiscFlow: point outside the barrier disc");
            }
            return log_radius_sq_ - std::log1p(-ratio);
        }
        return log_radius_sq_ - std::log1p(ratio);
    }

    double time_offset(double t) const {
        if (!(t >= 0.0)) {
            throw DomainError("DiscFlow: t must be >= 0");
        }
        return 0.5 * std::log(scale_) + 0.5 * std::log1p(2.0 * t / (scale_ * radius_sq()));
    }

    /// H - phi at hyperbolic distance r from the origin.
    double relative_at_radius(double r, double t) const {
        return spatial_offset(log_one_minus_modulus_sq_at_radius(r)) + time_offset(t);
    }

    /// H(z, t).
    double absolute(const DiscPoint& z, double t) const {
        return poincare_conformal_factor(z) + spatial_offset(std::log1p(-z.norm_sq())) +
               time_offset(t);
    }

    double curvature(double t) const { return -1.0 / (scale_ * radius_sq() + 2.0 * t); }

private:
    bool shrunk_;
    double log_gap_;
    double scale_;
    double log_radius_sq_ = 0.0;
};

/// J(b) = 2 + max{4 e^{10 eps}, 12} / b.
inline double barrier_J(double b, double eps) {
    return 2.0 + std::max(4.0 * std::exp(10.0 * eps), 12.0) / b;
}

struct BarrierParams {
    double b = 0.0;
    double eps = 0.0;
    double J = 0.0;
    double j = 0.0;           ///< tanh((J - 2)/2)
    double j0 = 0.0;          ///< tanh((J - 3/2)/2)
    double alpha_disc = 0.0;  ///< upper barrier disc radius, in (j, 1)
    double mu = 0.0;          ///< lower barrier disc radius, > 1

    double log_one_minus_j = 0.0;
    double log_one_minus_j_sq = 0.0;
    double log_one_minus_j0_sq = 0.0;
    double log_one_minus_alpha_sq = 0.0;
    double log_mu_sq_minus_one = 0.0;

    double alpha_sq() const { return -std::expm1(log_one_minus_alpha_sq); }
    double mu_sq() const { return 1.0 + std::exp(log_mu_sq_minus_one); }

    DiscFlow upper_flow() const { return DiscFlow(true, log_one_minus_alpha_sq, 1.0 + b); }
    DiscFlow lower_flow() const { return DiscFlow(false, log_mu_sq_minus_one, 1.0 - b); }
};

inline BarrierParams compute_barrier_params(double b, double eps) {
    if (!(b > 0.0 && b <= 0.5)) {
        throw DomainError("compute_barrier_params: b must lie in (0, 1/2]");
    }
    if (!(eps > 0.0) || std::isinf(eps)) {
        throw DomainError("compute_barrier_params: eps must be finite and > 0");
    }
    BarrierParams p;
    p.b = b;
    p.eps = eps;
    p.J = barrier_J(b, eps);
    if (!std::isfinite(p.J)) {
        throw DomainError("compute_barrier_params: J is not finite for this eps");
    }
    const double x = 0.5 * (p.J - 2.0);
    const double x0 = 0.5 * (p.J - 1.5);
    p.j = std::tanh(x);
    p.j0 = std::tanh(x0);
    // 1 - tanh(x) = 2 e^{-2x} / (1 + e^{-2x}) and 1 - tanh^2(x) = sech^2(x).
    p.log_one_minus_j = std::numbers::ln2 - 2.0 * x - std::log1p(std::exp(-2.0 * x));
    p.log_one_minus_j_sq = -2.0 * detail::log_cosh(x);
    p.log_one_minus_j0_sq = -2.0 * detail::log_cosh(x0);

    const double L = p.log_one_minus_j_sq;
    if (!(L < -10.0 * eps)) {
        throw ConsistencyError("compute_barrier_params: 1 - e^{-10 eps} < j^2 fails");
    }
    // 1 - alpha^2 = (1 - j^2)(e^{4 eps} - 1) / (e^{4 eps} - (1 - j^2))
    p.log_one_minus_alpha_sq =
        L + std::log(std::expm1(4.0 * eps)) - std::log(std::exp(4.0 * eps) - std::exp(L));
    // mu^2 - 1 = (1 - j^2)(E - 1) / (1 - (1 - j^2) E),  E = exp[(5 - 4b)/(1 - b) eps]
    const double k = (5.0 - 4.0 * b) / (1.0 - b);
    p.log_mu_sq_minus_one =
        L + std::log(std::expm1(k * eps)) - std::log(-std::expm1(L + k * eps));
    p.alpha_disc = std::sqrt(p.alpha_sq());
    p.mu = std::sqrt(p.mu_sq());

    const double log_j_gap_bound =
        std::log(std::min(0.5 * b * std::exp(-10.0 * eps), b / 6.0));
    if (!(p.log_one_minus_j <= log_j_gap_bound)) {
        throw ConsistencyError("compute_barrier_params: j below max{1 - b e^{-10 eps}/2, 1 - b/6}");
    }
    if (!(p.log_one_minus_j0_sq < p.log_one_minus_j_sq)) {
        throw ConsistencyError("compute_barrier_params: j0 <= j");
    }
    if (!(p.log_one_minus_alpha_sq < p.log_one_minus_j_sq)) {
        throw ConsistencyError("compute_barrier_params: alpha <= j");
    }
    return p;
}

/// H_alpha(z, t) = phi(z/alpha) + 1/2 log(1+b) + 1/2 log(1 + 2t / ((1+b) alpha^2)).
inline double upper_barrier_value(const DiscPoint& z, double t, const BarrierParams& p) {
    return p.upper_flow().absolute(z, t);
}

/// H_mu(z, t) = phi(z/mu) + 1/2 log(1-b) + 1/2 log(1 + 2t / ((1-b) mu^2)).
inline double lower_barrier_value(const DiscPoint& z, double t, const BarrierParams& p) {
    return p.lower_flow().absolute(z, t);
}

/// H_alpha - phi at hyperbolic radius r; the form the solver consumes.
inline double upper_barrier_relative(double r, double t, const BarrierParams& p) {
    return p.upper_flow().relative_at_radius(r, t);
}

inline double lower_barrier_relative(double r, double t, const BarrierParams& p) {
    return p.lower_flow().relative_at_radius(r, t);
}

struct SandwichMargins {
    double upper = 0.0;  ///< alpha^2 - 1/(1+b)
    double lower = 0.0;  ///< 1/(1-b) - mu^2
};

inline SandwichMargins check_sandwich_conditions(const BarrierParams& p) {
    return {p.b / (1.0 + p.b) - std::exp(p.log_one_minus_alpha_sq),
            p.b / (1.0 - p.b) - std::exp(p.log_mu_sq_minus_one)};
}

}  // namespace hypflow
