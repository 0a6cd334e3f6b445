#include "vortex/sphere_grid.hpp"

#include "vortex/errors.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace vortex {

namespace {
constexpr double kPi = std::numbers::pi;
}

SphereGrid build_grid(int N, double R) {
    if (N < 8) throw ValidationError("grid resolution must be at least 8, got " + std::to_string(N));
    if (!(R > 1.0 && R <= 2.0)) throw ValidationError("chart overlap radius must lie in (1, 2]");
    SphereGrid g;
    g.N = N;
    g.n_phi = 2 * N;
    g.overlap_radius = R;
    g.dtheta = kPi / N;
    g.dphi = 2 * kPi / g.n_phi;
    g.theta_edge.resize(N + 1);
    g.sin_edge.resize(N + 1);
    for (int e = 0; e <= N; ++e) {
        g.theta_edge[e] = e * g.dtheta;
        g.sin_edge[e] = (e == 0 || e == N) ? 0.0 : std::sin(g.theta_edge[e]);
    }
    double total = 0;
    for (int j = 0; j < N; ++j) {
        double t = (j + 0.5) * g.dtheta;
        g.theta.push_back(t);
        g.sin_theta.push_back(std::sin(t));
        g.link_s.push_back(std::pow(std::sin(0.5 * t), 2));
        // cos(a) - cos(b) = 2 sin((a+b)/2) sin((b-a)/2), no cancellation at the poles
        double band = 2.0 * std::sin(t) * std::sin(0.5 * g.dtheta);
        g.unit_area.push_back(g.dphi * band);
        total += g.n_phi * g.dphi * band;
    }
    for (int j = 0; j < N; ++j) g.weight.push_back(g.unit_area[j] / total);
    for (int l = 0; l < g.n_phi; ++l) g.phi.push_back((l + 0.5) * g.dphi);
    return g;
}

cd SphereGrid::north_coord(int c) const {
    return std::polar(std::tan(0.5 * theta[row(c)]), phi[col(c)]);
}

cd SphereGrid::south_coord(int c) const {
    return std::polar(1.0 / std::tan(0.5 * theta[row(c)]), -phi[col(c)]);
}

bool SphereGrid::in_north(int c) const { return std::tan(0.5 * theta[row(c)]) <= overlap_radius; }
bool SphereGrid::in_south(int c) const { return 1.0 / std::tan(0.5 * theta[row(c)]) <= overlap_radius; }

double SphereGrid::north_blend(int c) const {
    double t = std::log(std::tan(0.5 * theta[row(c)])) / std::log(overlap_radius);
    if (t <= -1) return 1.0;
    if (t >= 1) return 0.0;
    double s = t * (15.0 - 10.0 * t * t + 3.0 * t * t * t * t) / 8.0;
    return 0.5 * (1.0 - s);
}

double integrate(const ScalarField& f, const SphereGrid& g) {
    double total = 0;
    for (int j = 0; j < g.N; ++j) {
        double row = 0;
        for (int l = 0; l < g.n_phi; ++l) row += f[g.index(j, l)];
        total += g.weight[j] * row;
    }
    return total;
}

cd integrate(const ComplexField& f, const SphereGrid& g) {
    cd total = 0;
    for (int j = 0; j < g.N; ++j) {
        cd row = 0;
        for (int l = 0; l < g.n_phi; ++l) row += f[g.index(j, l)];
        total += g.weight[j] * row;
    }
    return total;
}

ComplexField covariant_laplacian(const ComplexField& f, int m, const SphereGrid& g) {
    ComplexField out(g.cells());
    for (int j = 0; j < g.N; ++j) {
        double cn = g.dphi / g.dtheta;
        double cphi = g.dtheta / (g.dphi * g.sin_theta[j]);
        cd fwd = std::polar(1.0, -m * g.link_s[j] * g.dphi); // brings column l+1 to l
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            cd acc = 0;
            if (j + 1 < g.N) acc += cn * g.sin_edge[j + 1] * (f[g.index(j + 1, l)] - f[c]);
            if (j > 0) acc += cn * g.sin_edge[j] * (f[g.index(j - 1, l)] - f[c]);
            acc += cphi * (fwd * f[g.index(j, g.wrap(l + 1))] + std::conj(fwd) * f[g.index(j, g.wrap(l - 1))] - 2.0 * f[c]);
            out[c] = acc / g.unit_area[j];
        }
    }
    return out;
}

ScalarField laplacian(const ScalarField& f, const SphereGrid& g) {
    ComplexField z(f.begin(), f.end());
    auto lz = covariant_laplacian(z, 0, g);
    ScalarField out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = lz[i].real();
    return out;
}

ChartPair fs_background_metric(int a, const SphereGrid& g) {
    ChartPair p;
    for (int c = 0; c < g.cells(); ++c) {
        if (g.in_north(c)) {
            p.north.cells.push_back(c);
            p.north.values.push_back(std::pow(1.0 + std::norm(g.north_coord(c)), -a));
        }
        if (g.in_south(c)) {
            p.south.cells.push_back(c);
            p.south.values.push_back(std::pow(1.0 + std::norm(g.south_coord(c)), -a));
        }
    }
    return p;
}

void dump_fields_csv(std::ostream& os, const SphereGrid& g, const std::vector<DumpColumn>& columns) {
    os << "chart,i_theta,i_phi,theta,phi,x,y";
    for (const auto& col : columns) os << "," << col.name << "_re," << col.name << "_im";
    os << "\n";
    os.precision(17);
    for (int chart = 0; chart < 2; ++chart) {
        for (int c = 0; c < g.cells(); ++c) {
            bool covered = chart == 0 ? g.in_north(c) : g.in_south(c);
            if (!covered) continue;
            cd x = chart == 0 ? g.north_coord(c) : g.south_coord(c);
            os << (chart == 0 ? "north" : "south") << "," << g.row(c) << "," << g.col(c) << "," << g.theta[g.row(c)]
               << "," << g.phi[g.col(c)] << "," << x.real() << "," << x.imag();
            for (const auto& col : columns) {
                cd v = (*col.values)[c];
                if (chart == 1 && col.charge != 0) v *= std::pow(x / std::abs(x), col.charge);
                os << "," << v.real() << "," << v.imag();
            }
            os << "\n";
        }
    }
}

} // namespace vortex
