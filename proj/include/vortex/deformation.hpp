#pragma once

// Deformation of a split system E1 + E2 built from two solved line pieces
// towards the extension 0 -> E1 -> E -> E2 -> 0.
//
// The sub piece carries sections phi (frame with Gram alpha I), the quotient
// piece sections rho. Each rho_i is lifted by a section sigma_i of E1,
// orthogonal to the phi's with Gram alpha (1 - lambda^2) I, so that
// sigma_i + lambda rho_i is a frame of the extension data. At parameter s in
// (0, 1] the frame is {phi, gamma sigma + (lambda gamma / s) rho} with
// gamma = s / sqrt(s^2 (1 - lambda^2) + lambda^2); s -> 0 recovers the split
// solution and its J equals the extension gap.
//
// Everything is restricted to line pieces (rank 1 sub and quotient).

#include "vortex/flow_solver.hpp"
#include "vortex/line_operators.hpp"

#include <utility>

namespace vortex {

struct LinePiece {
    SplitSystemConfig config; // rank 1
    MatrixField S;            // solution of the vortex equations for config
};

struct DeformationInput {
    LinePiece sub, quotient;
    std::vector<Polynomial> lifts; // one section of the sub bundle per quotient section
    ComplexField extension;        // (0,1)-form coefficient in Hom(E2, E1), Fubini-Study frame; empty means 0
    double lambda = 0.5;
};

struct GaugeCorrection {
    ComplexField u;
    double residual = 0;       // weighted L2 norm of the corrected off-diagonal block
    double min_eigenvalue = 0; // estimate for the operator
    int iterations = 0;
};

struct DeformationFamily {
    const SphereGrid* grid = nullptr;
    double alpha = 0, lambda = 0;
    double tau = 0, tau_sub = 0, tau_quotient = 0;
    Rational gap;  // J of the split limit
    int charge = 0; // a_sub - a_quotient
    ScalarField sigma;                    // S_sub - S_quotient
    ScalarField K_sub, K_quotient;        // curvature of each piece
    std::vector<ComplexField> phi, lift, rho; // unitary-frame coefficients of the frames
    Eigen::MatrixXcd lift_matrix;         // lift = (raw lifts, orthogonalized) * lift_matrix
    Eigen::MatrixXcd quotient_matrix;     // rho = raw quotient sections * quotient_matrix
    ComplexField extension;               // Coulomb-gauge representative, Fubini-Study frame
    ScalarField extension_density;        // |b|^2 in the extension metric
    double extension_norm2 = 0;           // |beta|^2 = 2 int |b|^2
    ComplexField off_diagonal;            // before the gauge correction, unitary frame
    GaugeCorrection gauge;
    ComplexField corrected_off_diagonal;  // B + L u

    int k_sub() const { return static_cast<int>(phi.size()); }
    int k_quotient() const { return static_cast<int>(rho.size()); }
};

// Throws ValidationError for bad shapes or lambda outside (0, 1),
// PreconditionError when a piece is not solved (J > piece_tolerance),
// DependentSectionsError when the lifts are dependent modulo the sub
// sections, SingularOperatorError when the gauge operator is not invertible.
DeformationFamily build_deformation(const DeformationInput& in, const AlphaParam& alpha, const SphereGrid& g,
                                    double piece_tolerance = 1e-5);

double deformation_gamma(double lambda, double s);

enum class DeviationPath {
    formula, // split curvature replaced by tau_i minus the piece's own sections
    frame,   // curvature of the pieces plus the deformed frame vectors
};

struct DeformedState {
    double s = 0, gamma = 0, lift_scale = 0; // lift_scale = lambda gamma / s
    MatrixField frame;     // 2 x k per cell, unitary frames of E1 and E2
    Eigen::MatrixXcd gram; // of the deformed frame
    MatrixField deviation; // 2 x 2 per cell
    double J = 0;
};

DeformedState deform_at(const DeformationFamily& fam, double s, DeviationPath path = DeviationPath::formula);
std::vector<std::pair<double, double>> j_curve(const DeformationFamily& fam, const std::vector<double>& s_values,
                                               DeviationPath path = DeviationPath::formula);

// Gap - 2 s^2 |beta|^2 - c (1 - lambda^2) gamma^2 alpha; the deformation
// follows c = 2 k_quotient.
double predicted_j(const DeformationFamily& fam, double s, double section_coefficient);

// The undeformed extension data as a split rank-2 system with the product
// metric: sections (phi, 0) and (lift, lambda rho). Only meaningful without
// an extension class.
std::pair<SplitSystemConfig, MatrixField> undeformed_system(const DeformationInput& in, const DeformationFamily& fam);

// -Delta_A u - K/2 u + potential u, the dbar-Laplacian of Hom(E2, E1) plus
// the section term; ops carries the charge and the metric.
LinearMap gauge_operator(const LineBundleOps& ops, const ScalarField& curvature, const ScalarField& potential);

// Solves gauge_operator u = -B. Throws SingularOperatorError when the
// smallest eigenvalue estimate is below singular_threshold.
GaugeCorrection solve_gauge_correction(const LineBundleOps& ops, const ScalarField& curvature,
                                       const ScalarField& potential, const ComplexField& B, double tol = 1e-10,
                                       double singular_threshold = 1e-8);

// beta - dbar v with dbar^* (beta - dbar v) = 0 in the metric of ops, up to
// the discretization error of the normal equations.
ComplexField coulomb_projection(const LineBundleOps& ops, const ComplexField& beta, double tol = 1e-11);

} // namespace vortex
