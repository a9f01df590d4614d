#pragma once

// Poincare disc model: D = {|z| < 1} with h = e^{2 phi} |dz|^2,
// phi(z) = log(2 / (1 - |z|^2)), Gauss curvature -1.

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>

#include "hypflow/errors.hpp"

namespace hypflow {

class DiscPoint {
public:
    DiscPoint() = default;

    DiscPoint(double re, double im) : re_(re), im_(im) {
        if (!(re * re + im * im < 1.0)) {
            throw DomainError("DiscPoint: |z| must be < 1");
        }
    }

    explicit DiscPoint(std::complex<double> z) : DiscPoint(z.real(), z.imag()) {}

    static DiscPoint polar(double modulus, double angle) {
        return DiscPoint(std::polar(modulus, angle));
    }

    double re() const noexcept { return re_; }
    double im() const noexcept { return im_; }
    std::complex<double> value() const noexcept { return {re_, im_}; }
    double norm_sq() const noexcept { return re_ * re_ + im_ * im_; }
    double modulus() const noexcept { return std::hypot(re_, im_); }

private:
    double re_ = 0.0;
    double im_ = 0.0;
};

namespace detail {

// log(cosh(x)) without overflow for large |x|.
inline double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace detail

/// phi(z) = log(2 / (1 - |z|^2)).
inline double poincare_conformal_factor(const DiscPoint& z) {
    return std::numbers::ln2 - std::log1p(-z.norm_sq());
}

/// phi at hyperbolic distance r from the origin: log(1 + cosh r).
inline double poincare_conformal_factor_at_radius(double r) {
    return std::numbers::ln2 + 2.0 * detail::log_cosh(0.5 * r);
}

/// log(1 - |z|^2) at hyperbolic distance r, i.e. -2 log cosh(r/2).
inline double log_one_minus_modulus_sq_at_radius(double r) {
    return -2.0 * detail::log_cosh(0.5 * r);
}

/// The hyperbolic ball B_h(0, R) is the Euclidean disc of radius tanh(R/2).
/// R = 0 is accepted as the closed extension and maps to 0.
inline double euclidean_radius(double hyperbolic_radius) {
    if (!(hyperbolic_radius >= 0.0) || std::isinf(hyperbolic_radius)) {
        throw DomainError("euclidean_radius: hyperbolic radius must be finite and >= 0");
    }
    return std::tanh(0.5 * hyperbolic_radius);
}

/// Inverse of euclidean_radius: 2 atanh(rho) for rho in [0, 1).
inline double hyperbolic_radius(double euclidean) {
    if (!(euclidean >= 0.0 && euclidean < 1.0)) {
        throw DomainError("hyperbolic_radius: Euclidean radius must lie in [0, 1)");
    }
    return 2.0 * std::atanh(euclidean);
}

inline double hyperbolic_distance(const DiscPoint& a, const DiscPoint& b) {
    const std::complex<double> za = a.value();
    const std::complex<double> zb = b.value();
    const double pseudo = std::abs(za - zb) / std::abs(1.0 - std::conj(zb) * za);
    return 2.0 * std::atanh(pseudo);
}

/// tanh(x) - (1 - 1/x); nonnegative for every x > 0.
inline double tanh_lower_bound_margin(double x) {
    if (!(x > 0.0)) {
        throw DomainError("tanh_lower_bound_margin: x must be > 0");
    }
    return std::tanh(x) - (1.0 - 1.0 / x);
}

/// Disc isometry z -> e^{i theta} (z + w) / (1 + conj(w) z); sends 0 to e^{i theta} w.
class MobiusMap {
public:
    MobiusMap() = default;
    explicit MobiusMap(DiscPoint target, double rotation = 0.0)
        : target_(target), rotation_(rotation) {}

    static MobiusMap identity() { return MobiusMap{}; }

    const DiscPoint& target() const noexcept { return target_; }
    double rotation() const noexcept { return rotation_; }

    DiscPoint operator()(const DiscPoint& z) const {
        return DiscPoint(clamp_into_disc(apply(z.value())));
    }

    /// |M'(z)| = (1 - |w|^2) / |1 + conj(w) z|^2.
    double derivative_modulus(const DiscPoint& z) const {
        const std::complex<double> w = target_.value();
        const double denom = std::norm(1.0 + std::conj(w) * z.value());
        return (1.0 - target_.norm_sq()) / denom;
    }

    MobiusMap inverse() const {
        const std::complex<double> w = target_.value();
        const std::complex<double> rot = std::polar(1.0, rotation_);
        return MobiusMap(DiscPoint(-w * rot), -rotation_);
    }

private:
    std::complex<double> apply(std::complex<double> z) const {
        const std::complex<double> w = target_.value();
        return std::polar(1.0, rotation_) * (z + w) / (1.0 + std::conj(w) * z);
    }

    // Rounding can push images of points very near the unit circle onto it.
    static std::complex<double> clamp_into_disc(std::complex<double> z) {
        const double m = std::abs(z);
        if (m < 1.0) {
            return z;
        }
        return z * (std::nextafter(1.0, 0.0) / m);
    }

    DiscPoint target_{};
    double rotation_ = 0.0;
};

template <class F>
concept ConformalFactor = std::invocable<const F&, const DiscPoint&> &&
    std::convertible_to<std::invoke_result_t<const F&, const DiscPoint&>, double>;

/// Pulls a conformal factor back through M: (M^* u)(z) = u(M(z)) + log|M'(z)|.
/// Differences of two factors transform as plain functions.
template <ConformalFactor F>
auto pullback_conformal_factor(F u, MobiusMap map) {
    return [u = std::move(u), map](const DiscPoint& z) -> double {
        return u(map(z)) + std::log(map.derivative_modulus(z));
    };
}

}  // namespace hypflow
