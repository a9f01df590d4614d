#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "hypflow/barriers.hpp"

using namespace hypflow;

namespace {

// Direct long-double evaluation of the disc radii from j, used as an oracle
// where 1 - j^2 is still representable.
struct Radii {
    long double alpha;
    long double mu;
};

Radii radii_from_j(long double j, long double b, long double eps) {
    const long double e4 = std::exp(4 * eps);
    const long double alpha = std::sqrt(e4 * j * j / (e4 + j * j - 1));
    const long double E = std::exp((5 - 4 * b) / (1 - b) * eps);
    const long double mu = j / std::sqrt(1 - (1 - j * j) * E);
    return {alpha, mu};
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        x[i] = a + (b - a) * i / (n - 1);
    }
    return x;
}

}  // namespace

TEST(BarrierJ, Examples) {
    EXPECT_DOUBLE_EQ(barrier_J(0.5, 0.05), 26.0);
    EXPECT_DOUBLE_EQ(barrier_J(0.1, 0.05), 122.0);
    // 4 e^{10 eps} overtakes 12 once eps > log(3) / 10.
    EXPECT_NEAR(barrier_J(0.5, 0.2), 2.0 + 8.0 * std::exp(2.0), 1e-12);
}

TEST(BarrierParams, DomainErrors) {
    EXPECT_THROW(compute_barrier_params(0.0, 0.05), DomainError);
    EXPECT_THROW(compute_barrier_params(0.6, 0.05), DomainError);
    EXPECT_THROW(compute_barrier_params(0.5, 0.0), DomainError);
    EXPECT_THROW(compute_barrier_params(0.5, -1.0), DomainError);
    EXPECT_NO_THROW(compute_barrier_params(0.5, 0.05));
}

TEST(BarrierParams, MatchesLongDoubleOracle) {
    for (double eps : {0.01, 0.05, 0.1}) {
        const BarrierParams p = compute_barrier_params(0.5, eps);
        const long double j = std::tanh(0.5L * (p.J - 2.0L));
        const Radii r = radii_from_j(j, 0.5L, eps);
        EXPECT_NEAR(p.j, static_cast<double>(j), 1e-15);
        EXPECT_NEAR(p.j0, static_cast<double>(std::tanh(0.5L * (p.J - 1.5L))), 1e-15);
        EXPECT_NEAR(p.alpha_disc, static_cast<double>(r.alpha), 1e-15);
        EXPECT_NEAR(p.mu, static_cast<double>(r.mu), 1e-15);
        // The stored gaps carry the significant digits.
        EXPECT_NEAR(p.log_one_minus_j_sq, static_cast<double>(std::log(1 - j * j)), 1e-6);
        EXPECT_NEAR(p.log_one_minus_alpha_sq,
                    static_cast<double>(std::log(1 - r.alpha * r.alpha)), 1e-6);
        EXPECT_NEAR(p.log_mu_sq_minus_one, static_cast<double>(std::log(r.mu * r.mu - 1)), 1e-6);
    }
}

TEST(BarrierParams, Invariants) {
    for (double b : linspace(0.01, 0.5, 50)) {
        for (double eps : linspace(0.01, 0.2, 20)) {
            const BarrierParams p = compute_barrier_params(b, eps);
            EXPECT_DOUBLE_EQ(p.J, 2 + std::max(4 * std::exp(10 * eps), 12.0) / b);
            EXPECT_LT(p.log_one_minus_j0_sq, p.log_one_minus_j_sq);
            EXPECT_LT(p.log_one_minus_alpha_sq, p.log_one_minus_j_sq);
            EXPECT_LT(p.log_one_minus_alpha_sq, 0.0);
            EXPECT_GT(p.log_mu_sq_minus_one, -std::numeric_limits<double>::infinity());
            EXPECT_GT(p.mu, 0.999999);
            EXPECT_GE(p.mu_sq(), 1.0);
            EXPECT_LE(p.alpha_disc, 1.0);
            EXPECT_GE(p.alpha_disc, p.j);
            // 1 - e^{-10 eps} < j^2 in log-complement form.
            EXPECT_LT(p.log_one_minus_j_sq, -10 * eps);
            // j >= max{1 - b e^{-10 eps} / 2, 1 - b / 6}.
            EXPECT_LE(p.log_one_minus_j, std::log(std::min(0.5 * b * std::exp(-10 * eps), b / 6)));
        }
    }
}

TEST(BarrierParams, AlphaTendsToOneAsJDoes) {
    // Small b pushes j to 1; alpha is squeezed between j and 1.
    double prev_gap = 1.0;
    for (double b : {0.5, 0.3, 0.2, 0.1}) {
        const BarrierParams p = compute_barrier_params(b, 0.05);
        EXPECT_LT(p.log_one_minus_alpha_sq, std::log(prev_gap));
        prev_gap = std::exp(p.log_one_minus_alpha_sq);
    }
    EXPECT_LT(prev_gap, 1e-40);
}

TEST(BarrierParams, AlphaTendsToZeroWithJ) {
    // The oracle formula's other limit; j this small is unreachable from (b, eps).
    EXPECT_LT(radii_from_j(1e-8L, 0.5L, 0.05L).alpha, 1e-7L);
    EXPECT_NEAR(static_cast<double>(radii_from_j(1.0L, 0.5L, 0.05L).alpha), 1.0, 1e-15);
}

TEST(SandwichConditions, PositiveOnExamplesAndGrid) {
    for (double b : {0.1, 0.5}) {
        const auto m = check_sandwich_conditions(compute_barrier_params(b, 0.05));
        EXPECT_GT(m.upper, 0.0);
        EXPECT_GT(m.lower, 0.0);
    }
    double worst = INFINITY;
    for (double b : linspace(0.01, 0.5, 50)) {
        for (double eps : linspace(0.01, 0.2, 20)) {
            const auto m = check_sandwich_conditions(compute_barrier_params(b, eps));
            worst = std::min({worst, m.upper, m.lower});
        }
    }
    EXPECT_GE(worst, 0.0);
}

TEST(UpperBarrier, Values) {
    const BarrierParams p = compute_barrier_params(0.1, 0.05);
    const DiscPoint o(0, 0);
    EXPECT_NEAR(upper_barrier_value(o, 0.0, p), std::log(2.0) + 0.5 * std::log(1.1), 1e-14);
    const double a2 = p.alpha_sq();
    EXPECT_NEAR(upper_barrier_value(o, 0.05, p),
                std::log(2.0) + 0.5 * std::log(1.1) + 0.5 * std::log(1 + 0.1 / (1.1 * a2)), 1e-14);
    double prev = -INFINITY;
    for (double t : linspace(0, 1, 50)) {
        const double h = upper_barrier_value(DiscPoint(0.3, 0.4), t, p);
        EXPECT_GT(h, prev);
        prev = h;
    }
}

TEST(UpperBarrier, MatchesBoundaryIdentityOnCircleOfRadiusJ) {
    for (double b : {0.5, 0.25, 0.1}) {
        const BarrierParams p = compute_barrier_params(b, 0.05);
        const double r = p.J - 2.0;  // hyperbolic radius of |z| = j
        EXPECT_NEAR(upper_barrier_relative(r, 0.0, p), 4 * 0.05 + 0.5 * std::log1p(b), 1e-9);
        EXPECT_NEAR(lower_barrier_relative(r, 0.0, p),
                    -4 * 0.05 - 0.05 / (1 - b) + 0.5 * std::log1p(-b), 1e-9);
    }
    // Point form agrees to the precision 1 - j^2 allows.
    const BarrierParams p = compute_barrier_params(0.5, 0.05);
    const DiscPoint z(p.j, 0.0);
    EXPECT_NEAR(upper_barrier_value(z, 0, p) - poincare_conformal_factor(z),
                0.2 + 0.5 * std::log(1.5), 1e-4);
}

TEST(UpperBarrier, OutsideDiscIsDomainError) {
    const BarrierParams p = compute_barrier_params(0.5, 0.05);
    EXPECT_THROW(upper_barrier_value(DiscPoint(std::nextafter(1.0, 0.0), 0), 0, p), DomainError);
    EXPECT_THROW(upper_barrier_value(DiscPoint(0, 0), -0.1, p), DomainError);
}

TEST(LowerBarrier, ValuesAndGrowthBound) {
    const BarrierParams p = compute_barrier_params(0.2, 0.05);
    EXPECT_NEAR(lower_barrier_value(DiscPoint(0, 0), 0, p), std::log(2.0) + 0.5 * std::log(0.8),
                1e-14);
    for (double m : {0.0, 0.5, 0.9, 0.999}) {
        const DiscPoint z(m, 0);
        for (double t : linspace(0, 2, 21)) {
            EXPECT_LE(lower_barrier_value(z, t, p),
                      lower_barrier_value(z, 0, p) + t / (0.8 * p.mu_sq()) + 1e-14);
        }
    }
}

TEST(Barriers, OrderingAtTimeZeroOnDj) {
    // Any u with the (1 +- b) band on D_{j0} sits between the barriers on D_j
    // iff the relative barriers bracket the band there.
    for (double b : {0.05, 0.1, 0.3, 0.5}) {
        const BarrierParams p = compute_barrier_params(b, 0.05);
        for (double r : linspace(0, p.J - 2.0, 400)) {
            // Near the center both barriers touch the band to rounding.
            EXPECT_GE(upper_barrier_relative(r, 0, p), 0.5 * std::log1p(b) - 1e-15);
            EXPECT_LE(lower_barrier_relative(r, 0, p), 0.5 * std::log1p(-b) + 1e-15);
        }
    }
}

TEST(Barriers, BoundaryOrderingOverFirstBlock) {
    for (double b : {0.05, 0.1, 0.5}) {
        const double eps = 0.05;
        const BarrierParams p = compute_barrier_params(b, eps);
        const double r = p.J - 2.0;
        for (double t : linspace(0, eps, 26)) {
            EXPECT_GE(upper_barrier_relative(r, t, p), 0.5 * std::log1p(b) + 4 * eps - 1e-9);
            EXPECT_LE(lower_barrier_relative(r, t, p), 0.5 * std::log1p(-b) - 4 * eps + 1e-9);
        }
    }
}

TEST(Barriers, CenterSandwichFollowsFromMargins) {
    for (double b : linspace(0.01, 0.5, 25)) {
        for (double eps : linspace(0.01, 0.2, 10)) {
            const BarrierParams p = compute_barrier_params(b, eps);
            for (double t : linspace(0, 5, 26)) {
                const double up = std::exp(2 * upper_barrier_relative(0, t, p)) / (1 + 2 * t);
                const double lo = std::exp(2 * lower_barrier_relative(0, t, p)) / (1 + 2 * t);
                EXPECT_LE(up, (1 + b) * (1 + 1e-14));
                EXPECT_GE(lo, (1 - b) * (1 - 1e-14));
            }
        }
    }
}

TEST(DiscFlow, ConsistentForms) {
    const DiscFlow f = DiscFlow::with_radius(0.9, 1.3);
    EXPECT_NEAR(f.radius(), 0.9, 1e-15);
    for (double r : {0.0, 0.5, 1.5, 2.5}) {
        const DiscPoint z(std::tanh(r / 2), 0);
        EXPECT_NEAR(f.absolute(z, 0.2) - poincare_conformal_factor(z), f.relative_at_radius(r, 0.2),
                    1e-12);
    }
    EXPECT_NEAR(f.curvature(0.5), -1.0 / (1.3 * 0.81 + 1.0), 1e-15);
    EXPECT_THROW(f.relative_at_radius(3.0, 0), DomainError);  // tanh(1.5) > 0.9
    EXPECT_THROW(DiscFlow::with_radius(0.0, 1.0), DomainError);
    EXPECT_THROW(DiscFlow::with_radius(0.5, 0.0), DomainError);
    const DiscFlow g = DiscFlow::with_radius(1.5, 0.7);
    EXPECT_NEAR(g.radius(), 1.5, 1e-15);
    EXPECT_NO_THROW(g.relative_at_radius(40.0, 0));
}
