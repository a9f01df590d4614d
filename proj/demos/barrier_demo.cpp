// Evolves the upper barrier H_alpha - phi with its own Dirichlet data and
// compares the center curvature with the closed form -1 / ((1+b) alpha^2 + 2t).

#include <cmath>
#include <cstdio>

#include "hypflow/barriers.hpp"
#include "hypflow/curvature.hpp"
#include "hypflow/solver.hpp"

int main() {
    using namespace hypflow;
    const double b = 0.5;
    const double eps = 0.05;
    const BarrierParams p = compute_barrier_params(b, eps);
    const DiscFlow upper = p.upper_flow();

    const RadialGrid grid(6.0, 601);
    RelativeConformalField v{std::vector<double>(grid.n_nodes()), 0.0};
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) {
        v.values[i] = upper.relative_at_radius(grid.node(i), 0.0);
    }
    const double R = grid.domain_radius();
    const auto boundary =
        BoundaryScenario::prescribe([&](double t) { return upper.relative_at_radius(R, t); });

    std::printf("J = %.12g  alpha = %.12g  mu = %.12g\n", p.J, p.alpha_disc, p.mu);
    std::printf("%8s %16s %16s %12s\n", "t", "K(0,t)", "exact", "error");
    const Trajectory traj = evolve(v, grid, boundary, eps, eps / 5);
    for (const auto& s : traj.samples) {
        const double k = center_curvature(s.values, grid);
        const double exact = upper.curvature(s.time);
        std::printf("%8.4f %16.10f %16.10f %12.3e\n", s.time, k, exact, std::abs(k - exact));
    }
}
