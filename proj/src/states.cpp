#include "vortex/states.hpp"

#include <cmath>
#include <random>

namespace vortex {

MatrixField random_smooth_state(const SplitSystemConfig& cfg, const SphereGrid& g, std::uint64_t seed,
                                double amplitude) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    int r = cfg.rank();
    MatrixField S(g.cells(), r, r);
    for (int p = 0; p < r; ++p) {
        double c[4];
        for (double& x : c) x = gauss(rng);
        double norm = std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3]);
        for (int cell = 0; cell < g.cells(); ++cell) {
            double th = g.theta[g.row(cell)], ph = g.phi[g.col(cell)];
            double v = c[0] + c[1] * std::cos(th) + c[2] * std::sin(th) * std::cos(ph) +
                       c[3] * std::sin(th) * std::sin(ph);
            S[cell](p, p) = amplitude * v / norm;
        }
    }
    for (int p = 0; p < r; ++p)
        for (int q = p + 1; q < r; ++q) {
            int m = cfg.charge(p, q);
            int am = std::abs(m);
            Polynomial poly(am + 1);
            double norm = 0;
            for (cd& x : poly) {
                x = cd(gauss(rng), gauss(rng));
                norm += std::abs(x);
            }
            for (cd& x : poly) x *= 0.5 * amplitude / norm;
            for (int cell = 0; cell < g.cells(); ++cell) {
                cd v = section_coefficient_north(poly, am, g.north_coord(cell));
                if (m < 0) v = std::conj(v);
                S[cell](p, q) = v;
                S[cell](q, p) = std::conj(v);
            }
        }
    return S;
}

} // namespace vortex
