#pragma once

// Discrete vortex equations for a split coherent system on the sphere.
//
// The unknown is a Hermitian endomorphism field S; the metric is
// H = H0^{1/2} e^S H0^{1/2} with H0 the Fubini-Study metric on each summand,
// and everything is expressed in the H0-unitary north frame, where entry
// (p, q) of an endomorphism has U(1) charge a_p - a_q.
//
// Curvature is computed as the circulation of h^{-1} d_A h around each cell
// (face values shared between neighbours), so the integrated trace equals the
// degree to rounding for every S.

#include "vortex/matrix_field.hpp"
#include "vortex/system_config.hpp"

#include <Eigen/Dense>

namespace vortex {

enum class Exec { serial, parallel };

struct Evaluation {
    MatrixField h, hs, hsi;            // e^S, e^{S/2}, e^{-S/2}
    std::vector<HermEig> eig;          // decomposition of S per cell
    MatrixField theta_face_inv, theta_face_flux; // per colatitude edge, (N+1) x 2N
    MatrixField phi_face_inv, phi_face_flux;     // per longitude face (j, l|l+1)
    MatrixField K;                     // i Lambda F as an endomorphism (not yet hermitized)
    Eigen::MatrixXcd G, Ginv;          // Gram matrix of the raw sections
    MatrixField deviation;             // herm(h^{1/2}(K + Phi Phi^* h - tau) h^{-1/2})
    double l2 = 0, J = 0, sup_residual = 0;
};

class VortexModel {
public:
    VortexModel(SplitSystemConfig cfg, const SphereGrid& grid, const AlphaParam& alpha);

    const SphereGrid& grid() const { return *grid_; }
    const SplitSystemConfig& config() const { return cfg_; }
    int rank() const { return r_; }
    int k() const { return k_; }
    double alpha() const { return alpha_; }
    double tau() const { return tau_; }
    const Rational& tau_exact() const { return tau_exact_; }
    const MatrixField& sections() const { return P_; }

    MatrixField zero_state() const { return MatrixField(grid_->cells(), r_, r_); }

    // Throws ValidationError for non-Hermitian S and DependentSectionsError
    // when the Gram matrix is numerically singular.
    Evaluation evaluate(const MatrixField& S, Exec exec = Exec::parallel) const;

    // Directional derivative of l2 along dS (in S) or along dh (in h = e^S).
    double l2_derivative(const Evaluation& ev, const MatrixField& dS, Exec exec = Exec::parallel) const;
    double l2_derivative_h(const Evaluation& ev, const MatrixField& dh, Exec exec = Exec::parallel) const;

    MatrixField curvature_field(const Evaluation& ev) const; // herm(h^{1/2} K h^{-1/2})
    Eigen::MatrixXcd frame(const Evaluation& ev) const;      // sqrt(alpha) G^{-1/2}
    double gram_residual(const Evaluation& ev) const;        // |B^* G B - alpha I|
    double yang_mills_higgs(const Evaluation& ev) const;

    // Per-row link phases e^{i m s dphi} for every entry, and the sign
    // (-1)^m applied when a colatitude stencil crosses the south pole.
    const CMat& link(int row) const { return link_[row]; }
    const CMat& half_link(int row) const { return half_link_[row]; }
    const CMat& pole_sign() const { return pole_sign_; }

private:
    void centered(const MatrixField& X, MatrixField& dphi, MatrixField& dtheta, Exec exec) const;
    void face_terms(const MatrixField& X, const MatrixField& dphi, const MatrixField& dtheta, MatrixField& t_avg,
                    MatrixField& t_flux, MatrixField& p_avg, MatrixField& p_flux, Exec exec) const;
    void assemble(const MatrixField& t_theta, const MatrixField& p_theta, MatrixField& K, bool with_degree,
                  Exec exec) const;

    SplitSystemConfig cfg_;
    const SphereGrid* grid_;
    int r_, k_;
    double alpha_, tau_;
    Rational tau_exact_;
    MatrixField P_;
    std::vector<CMat> link_, half_link_;
    CMat pole_sign_;
};

// Operations on (config, S, grid) that build a model internally.
MatrixField curvature(const SplitSystemConfig& cfg, const MatrixField& S, const SphereGrid& g);
Eigen::MatrixXcd gram(const SplitSystemConfig& cfg, const MatrixField& S, const Eigen::MatrixXcd& B, const SphereGrid& g);
Eigen::MatrixXcd lowdin_frame(const Eigen::MatrixXcd& G, double alpha);
MatrixField moment_map_deviation(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                                 const SphereGrid& g);
double trace_norm_l2(const MatrixField& field, const SphereGrid& g); // (int nu^2)^{1/2}
double trace_norm_functional(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                             const SphereGrid& g);
double l2_objective(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha, const SphereGrid& g);
double l2_norm_squared(const MatrixField& field, const SphereGrid& g);
double yang_mills_higgs(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                        const SphereGrid& g);

// Straightforward cell-by-cell evaluation of the deviation field with no
// shared face data and no threading; kept to check the production kernels.
MatrixField reference_deviation(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                                const SphereGrid& g);

} // namespace vortex
