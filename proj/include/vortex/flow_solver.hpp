#pragma once

// Descent on the squared L2 norm of the vortex deviation over metric states,
// with the section frame kept orthonormal (Loewdin) at every step.

#include "vortex/vortex_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vortex {

struct FlowParams {
    double step = 1.0;        // initial step size
    double max_step = 4.0;
    double backtrack = 0.5;   // step factor on Armijo failure
    double armijo = 1e-4;
    double tol_a = 1e-6;      // sup-norm of the deviation
    double tol_J = 1e-7;
    int max_iterations = 5000;
    int stall_window = 50;
    double stall_tolerance = 1e-10; // relative l2 decrease over the window
    double shift = 0;         // preconditioner shift; 0 picks alpha k / (2r), or 1/2 without sections
    double divergence_limit = 500; // largest |eigenvalue of S| before giving up
    Exec exec = Exec::parallel;

    void validate() const;
};

struct HistoryRow {
    int iteration = 0;
    double J = 0, l2 = 0, sup_residual = 0, step = 0;
};

enum class SolveStatus { converged, stalled, max_iterations, diverged };
std::string to_string(SolveStatus s);

struct SolveReport {
    bool converged = false;
    SolveStatus status = SolveStatus::stalled;
    double J = 0, l2 = 0, sup_residual = 0, gram_residual = 0;
    double min_J = 0; // smallest J seen along the run
    int iterations = 0;
    std::vector<HistoryRow> history;
    MatrixField S;
    Eigen::MatrixXcd frame;
    std::optional<Rational> lower_bound; // obstruction bound when a witness is known
    std::optional<double> margin;        // min_J - lower_bound
};

// Starts from S0 (zero state when empty). Non-convergence is a result, not an
// error; DependentSectionsError is thrown for dependent sections.
SolveReport solve_vortex(const SplitSystemConfig& cfg, const AlphaParam& alpha, const SphereGrid& g,
                         const FlowParams& params = {}, const MatrixField* S0 = nullptr);

struct GradientCheck {
    double max_relative_error = 0;
    double max_abs_derivative = 0;
};

// Analytic directional derivatives of l2 against central differences with
// step fd_step along `directions` random smooth Hermitian directions.
GradientCheck gradient_check(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                             const SphereGrid& g, std::uint64_t seed = 1, int directions = 10,
                             double fd_step = 1e-4);

// Sup over cells of |h1 - h2| after scaling each metric so that det h = 1 at
// the reference cell; the residual constant scalar gauge is removed this way.
double metric_distance(const MatrixField& S1, const MatrixField& S2, int reference_cell = 0);

// Lower bound for J on an unstable system with destabilizing subobject `sub`
// and quotient total - sub: R1 (mu(sub) - mu) + R2 (mu - mu(quotient)) with
// R1, R2 the ranks. Requires mu(sub) >= mu, else PreconditionError.
Rational obstruction_bound(const SystemType& total, const SubobjectType& sub, const SubobjectType& quotient,
                           const AlphaParam& alpha);

// R1 (mu - mu(sub)) + R2 (mu(quotient) - mu): the value of J reached in the
// limit of the split extension 0 -> sub -> total -> quotient -> 0.
Rational extension_gap(const SystemType& total, const SubobjectType& sub, const SubobjectType& quotient,
                       const AlphaParam& alpha);

// Witness subobject for an unstable decomposable system and its bound.
struct Obstruction {
    IndexedSubobject witness;
    Rational bound;
};
std::optional<Obstruction> decomposable_obstruction(const DecomposableSystem& sys, const AlphaParam& alpha);

} // namespace vortex
