#pragma once

// Finite-volume mesh of the round sphere (area 2*pi) plus the two polar
// stereographic charts used to evaluate holomorphic data.
//
// Cells are uniform in colatitude theta (N rows) and longitude phi (2N
// columns). Cell (j, l) has centre theta_j = (j + 1/2) dtheta,
// phi_l = (l + 1/2) dphi and exact spherical area, so the quadrature weights
// sum to one up to rounding. North chart: z = tan(theta/2) e^{i phi}; south
// chart: w = 1/z.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace vortex {

using cd = std::complex<double>;
using ScalarField = std::vector<double>;
using ComplexField = std::vector<cd>;

class SphereGrid {
public:
    int N = 0;        // colatitude rows
    int n_phi = 0;    // longitude columns, 2N
    double overlap_radius = 0;
    double dtheta = 0, dphi = 0;

    std::vector<double> theta;      // row centres
    std::vector<double> theta_edge; // N + 1 row boundaries
    std::vector<double> sin_theta, sin_edge;
    std::vector<double> unit_area;  // cell area on the unit sphere, per row
    std::vector<double> weight;     // normalized quadrature weight, per row
    std::vector<double> link_s;     // sin^2(theta/2), per row
    std::vector<double> phi;        // column centres

    int cells() const { return N * n_phi; }
    int index(int j, int l) const { return j * n_phi + l; }
    int row(int c) const { return c / n_phi; }
    int col(int c) const { return c % n_phi; }
    int wrap(int l) const { return ((l % n_phi) + n_phi) % n_phi; }
    double cell_weight(int c) const { return weight[row(c)]; }

    cd north_coord(int c) const; // z
    cd south_coord(int c) const; // w = 1/z
    bool in_north(int c) const;  // |z| <= R
    bool in_south(int c) const;  // |w| <= R
    double north_blend(int c) const; // partition of unity weight of the north chart
    double south_blend(int c) const { return 1.0 - north_blend(c); }
};

// N >= 8 and 1 < R_overlap <= 2, else ValidationError.
SphereGrid build_grid(int N, double R_overlap = 1.5);

// Normalized integral (1/2pi) * int f omega.
double integrate(const ScalarField& f, const SphereGrid& g);
cd integrate(const ComplexField& f, const SphereGrid& g);

// Unit-curvature Laplace-Beltrami operator (first harmonics have eigenvalue
// -2), conservative finite volumes.
ScalarField laplacian(const ScalarField& f, const SphereGrid& g);

// Covariant Laplacian on sections of charge m in the north unitary frame,
// i.e. on entries of End(E) between summands with degree difference m.
ComplexField covariant_laplacian(const ComplexField& f, int charge, const SphereGrid& g);

// Values of a field restricted to one chart, in that chart's frame.
struct ChartValues {
    std::vector<int> cells;
    std::vector<double> values;
};

struct ChartPair {
    ChartValues north, south;
};

// Fubini-Study metric on O(a): (1+|z|^2)^{-a} on the north chart,
// (1+|w|^2)^{-a} on the south chart.
ChartPair fs_background_metric(int a, const SphereGrid& g);

// Scalar field sampled from a function of (theta, phi) at cell centres.
template <class F>
ScalarField sample(const SphereGrid& g, F&& f) {
    ScalarField out(g.cells());
    for (int c = 0; c < g.cells(); ++c) out[c] = f(g.theta[g.row(c)], g.phi[g.col(c)]);
    return out;
}

// CSV dump: chart,i_theta,i_phi,theta,phi,x,y followed by value columns.
// Each cell appears once per chart that covers it; chart-frame values are
// obtained by multiplying the north-frame value by (w/|w|)^charge on the
// south chart.
struct DumpColumn {
    std::string name;
    const ComplexField* values;
    int charge = 0;
};
void dump_fields_csv(std::ostream& os, const SphereGrid& g, const std::vector<DumpColumn>& columns);

} // namespace vortex
