#pragma once

// Operators on sections of a line bundle Hom(E2, E1) = O(m) carrying the
// metric e^sigma h_FS, used by the extension deformation: the Chern
// Laplacian in the metric's unitary frame, the discrete dbar on the
// Fubini-Study unitary frame and its adjoint, and Krylov solvers.

#include "vortex/sphere_grid.hpp"

#include <cstdint>
#include <functional>

namespace vortex {

using LinearMap = std::function<ComplexField(const ComplexField&)>;

class LineBundleOps {
public:
    // sigma: log of the metric relative to Fubini-Study, per cell
    LineBundleOps(const SphereGrid& g, int charge, ScalarField sigma);

    const SphereGrid& grid() const { return *g_; }
    int charge() const { return m_; }
    const ScalarField& sigma() const { return sigma_; }

    // Chern-connection Laplacian in the unitary frame of e^sigma h_FS
    // (finite volumes, zero flux through the poles).
    ComplexField laplacian(const ComplexField& u) const;

    // dbar in the Fubini-Study unitary frame: b with dbar u = b ebar,
    // ebar = (dtheta - i sin(theta) dphi)/sqrt(2), centred differences.
    ComplexField dbar(const ComplexField& u) const;
    // Formal adjoint for <u, v> = int conj(u) v e^sigma and
    // <b, c> = 2 int conj(b) c e^sigma, discretized on its own (divergence
    // form); the discrete transpose of dbar is inconsistent at the poles.
    ComplexField dbar_adjoint(const ComplexField& b) const;

private:
    const SphereGrid* g_;
    int m_;
    ScalarField sigma_;
    std::vector<cd> phi_link_;   // per cell: brings column l+1 to l on face (l|l+1)
    std::vector<cd> theta_link_; // per edge: brings row e to row e-1
};

struct KrylovResult {
    ComplexField x;
    int iterations = 0;
    double residual = 0; // weighted L2 norm of A x - b
};

// Conjugate gradients for A self-adjoint positive (semi)definite under
// <u, v> = sum weights conj(u) v.
KrylovResult conjugate_gradient(const LinearMap& A, const ComplexField& b, const std::vector<double>& weights,
                                double tol, int max_iterations);

// Smallest eigenvalue estimate of a self-adjoint positive semidefinite A by
// inverse iteration, each step a CG solve; the Rayleigh quotient of the last
// iterate. Near-singular operators give values near zero.
double smallest_eigenvalue(const LinearMap& A, const std::vector<double>& weights, int steps = 10,
                           std::uint64_t seed = 1);

// Per-cell quadrature weights of a grid, expanded to one entry per cell.
std::vector<double> cell_weights(const SphereGrid& g);

} // namespace vortex
