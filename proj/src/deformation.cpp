#include "vortex/deformation.hpp"

#include "vortex/errors.hpp"

#include <cmath>

namespace vortex {

namespace {

double weighted_norm(const ComplexField& f, const std::vector<double>& w) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
    return std::sqrt(s);
}

cd weighted_inner(const ComplexField& a, const ComplexField& b, const SphereGrid& g) {
    cd s = 0;
    for (int c = 0; c < g.cells(); ++c) s += g.cell_weight(c) * std::conj(a[c]) * b[c];
    return s;
}

struct SolvedPiece {
    double tau = 0;
    ScalarField S, K;
    std::vector<ComplexField> raw;   // unitary-frame coefficients of the config's sections
    Eigen::MatrixXcd frame;          // raw * frame has Gram alpha I
};

SolvedPiece solved_piece(const LinePiece& piece, const AlphaParam& alpha, const SphereGrid& g, double tol,
                         const char* role) {
    if (piece.config.rank() != 1)
        throw ValidationError(std::string(role) + " piece must be a line bundle, got rank " +
                              std::to_string(piece.config.rank()));
    if (piece.S.cells() != g.cells() || piece.S.rows() != 1)
        throw ValidationError(std::string(role) + " piece state does not match the grid");
    VortexModel model(piece.config, g, alpha);
    auto ev = model.evaluate(piece.S);
    if (!(ev.J <= tol))
        throw PreconditionError(std::string(role) + " piece is not a vortex solution: J = " + std::to_string(ev.J));
    SolvedPiece out;
    out.tau = model.tau();
    auto K = model.curvature_field(ev);
    for (int c = 0; c < g.cells(); ++c) {
        out.S.push_back(piece.S[c](0, 0).real());
        out.K.push_back(K[c](0, 0).real());
    }
    for (int i = 0; i < model.k(); ++i) {
        ComplexField f(g.cells());
        for (int c = 0; c < g.cells(); ++c) f[c] = std::exp(0.5 * out.S[c]) * model.sections()[c](0, i);
        out.raw.push_back(std::move(f));
    }
    out.frame = model.k() > 0 ? model.frame(ev) : Eigen::MatrixXcd(0, 0);
    return out;
}

std::vector<ComplexField> combine(const std::vector<ComplexField>& raw, const Eigen::MatrixXcd& M) {
    std::vector<ComplexField> out;
    for (int j = 0; j < M.cols(); ++j) {
        ComplexField f(raw.empty() ? 0 : raw[0].size(), cd(0));
        for (int i = 0; i < M.rows(); ++i)
            for (std::size_t c = 0; c < f.size(); ++c) f[c] += M(i, j) * raw[i][c];
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace

double deformation_gamma(double lambda, double s) { return s / std::sqrt(s * s * (1 - lambda * lambda) + lambda * lambda); }

LinearMap gauge_operator(const LineBundleOps& ops, const ScalarField& curvature, const ScalarField& potential) {
    return [&ops, &curvature, &potential](const ComplexField& u) {
        ComplexField out = ops.laplacian(u);
        for (std::size_t c = 0; c < u.size(); ++c) out[c] = -out[c] + (potential[c] - 0.5 * curvature[c]) * u[c];
        return out;
    };
}

GaugeCorrection solve_gauge_correction(const LineBundleOps& ops, const ScalarField& curvature,
                                       const ScalarField& potential, const ComplexField& B, double tol,
                                       double singular_threshold) {
    const SphereGrid& g = ops.grid();
    if (static_cast<int>(curvature.size()) != g.cells() || static_cast<int>(potential.size()) != g.cells() ||
        static_cast<int>(B.size()) != g.cells())
        throw ValidationError("gauge correction fields do not match the grid");
    auto A = gauge_operator(ops, curvature, potential);
    auto w = cell_weights(g);
    GaugeCorrection out;
    out.min_eigenvalue = smallest_eigenvalue(A, w);
    if (out.min_eigenvalue < singular_threshold)
        throw SingularOperatorError("gauge operator is singular: smallest eigenvalue ~ " +
                                        std::to_string(out.min_eigenvalue),
                                    out.min_eigenvalue);
    ComplexField rhs(B.size());
    for (std::size_t c = 0; c < B.size(); ++c) rhs[c] = -B[c];
    auto res = conjugate_gradient(A, rhs, w, tol, 20 * g.cells());
    out.u = std::move(res.x);
    out.residual = res.residual;
    out.iterations = res.iterations;
    if (!(out.residual <= 10 * tol))
        throw NumericalError("gauge correction did not converge: residual " + std::to_string(out.residual));
    return out;
}

ComplexField coulomb_projection(const LineBundleOps& ops, const ComplexField& beta, double tol) {
    const SphereGrid& g = ops.grid();
    if (static_cast<int>(beta.size()) != g.cells()) throw ValidationError("extension field does not match the grid");
    // dbar^* dbar v = dbar^* beta with the left side replaced by its compact
    // Weitzenbock form: the centred dbar is square and has no cokernel, so
    // its own normal equations would swallow the harmonic part.
    auto lap_sigma = laplacian(ops.sigma(), g);
    ScalarField K(g.cells()), none(g.cells(), 0.0);
    for (int c = 0; c < g.cells(); ++c) K[c] = ops.charge() - lap_sigma[c];
    auto dsb = ops.dbar_adjoint(beta);
    for (int c = 0; c < g.cells(); ++c) dsb[c] *= std::exp(0.5 * ops.sigma()[c]);
    auto w = cell_weights(g);
    double scale = std::max(1.0, weighted_norm(dsb, w));
    auto res = conjugate_gradient(gauge_operator(ops, K, none), dsb, w, tol * scale, 20 * g.cells());
    for (int c = 0; c < g.cells(); ++c) res.x[c] *= std::exp(-0.5 * ops.sigma()[c]);
    auto dv = ops.dbar(res.x);
    ComplexField out(beta.size());
    for (std::size_t c = 0; c < beta.size(); ++c) out[c] = beta[c] - dv[c];
    return out;
}

DeformationFamily build_deformation(const DeformationInput& in, const AlphaParam& alpha, const SphereGrid& g,
                                    double piece_tolerance) {
    if (!(in.lambda > 0 && in.lambda < 1))
        throw ValidationError("lambda must lie in (0, 1), got " + std::to_string(in.lambda));
    auto sub = solved_piece(in.sub, alpha, g, piece_tolerance, "sub");
    auto quo = solved_piece(in.quotient, alpha, g, piece_tolerance, "quotient");
    int k1 = in.sub.config.k(), k2 = in.quotient.config.k();
    if (k2 == 0) throw ValidationError("quotient piece needs sections to deform");
    if (static_cast<int>(in.lifts.size()) != k2)
        throw ValidationError("need one lift per quotient section: " + std::to_string(in.lifts.size()) + " for " +
                              std::to_string(k2));

    DeformationFamily fam;
    fam.grid = &g;
    fam.alpha = to_double(alpha.value());
    fam.lambda = in.lambda;
    fam.tau_sub = sub.tau;
    fam.tau_quotient = quo.tau;
    int a1 = in.sub.config.degrees[0], a2 = in.quotient.config.degrees[0];
    fam.charge = a1 - a2;
    SystemType total{a1 + a2, 2, k1 + k2};
    fam.tau = to_double(tau_of_alpha(total, alpha));
    fam.gap = extension_gap(total, in.sub.config.type(), in.quotient.config.type(), alpha);
    fam.K_sub = sub.K;
    fam.K_quotient = quo.K;
    for (int c = 0; c < g.cells(); ++c) fam.sigma.push_back(sub.S[c] - quo.S[c]);

    fam.phi = combine(sub.raw, sub.frame);
    fam.quotient_matrix = quo.frame;
    fam.rho = combine(quo.raw, quo.frame);

    // lifts: unitary coefficients, minus their phi components, then Lowdin
    SplitSystemConfig lift_cfg{{a1}, {}};
    for (const auto& q : in.lifts) lift_cfg.sections.push_back({q});
    lift_cfg.validate();
    auto P = evaluate_sections(lift_cfg, g);
    std::vector<ComplexField> raw;
    double lift_norm2 = 0;
    for (int i = 0; i < k2; ++i) {
        ComplexField f(g.cells());
        for (int c = 0; c < g.cells(); ++c) f[c] = std::exp(0.5 * sub.S[c]) * P[c](0, i);
        lift_norm2 = std::max(lift_norm2, weighted_inner(f, f, g).real());
        for (const auto& ph : fam.phi) {
            cd proj = weighted_inner(ph, f, g) / fam.alpha;
            for (int c = 0; c < g.cells(); ++c) f[c] -= proj * ph[c];
        }
        raw.push_back(std::move(f));
    }
    Eigen::MatrixXcd G(k2, k2);
    for (int i = 0; i < k2; ++i)
        for (int j = 0; j < k2; ++j) G(i, j) = weighted_inner(raw[i], raw[j], g);
    double smallest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(G, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (!(smallest > 1e-10 * lift_norm2))
        throw DependentSectionsError("lifts are dependent modulo the sub sections");
    fam.lift_matrix = lowdin_frame(G, fam.alpha * (1 - in.lambda * in.lambda));
    fam.lift = combine(raw, fam.lift_matrix);

    LineBundleOps ops(g, fam.charge, fam.sigma);
    if (in.extension.empty()) {
        fam.extension.assign(g.cells(), cd(0));
    } else {
        fam.extension = coulomb_projection(ops, in.extension);
    }
    fam.extension_density.resize(g.cells());
    for (int c = 0; c < g.cells(); ++c) fam.extension_density[c] = std::exp(fam.sigma[c]) * std::norm(fam.extension[c]);
    fam.extension_norm2 = 2 * integrate(fam.extension_density, g);

    // off-diagonal block dbar^* beta + lambda sum sigma rho^*, unitary frame
    auto dsb = ops.dbar_adjoint(fam.extension);
    fam.off_diagonal.resize(g.cells());
    ScalarField potential(g.cells(), 0.0), KL(g.cells());
    for (int c = 0; c < g.cells(); ++c) {
        cd b = std::exp(0.5 * fam.sigma[c]) * dsb[c];
        for (int i = 0; i < k2; ++i) {
            b += in.lambda * fam.lift[i][c] * std::conj(fam.rho[i][c]);
            potential[c] += in.lambda * in.lambda * std::norm(fam.rho[i][c]);
        }
        fam.off_diagonal[c] = b;
        KL[c] = fam.K_sub[c] - fam.K_quotient[c];
    }
    fam.gauge = solve_gauge_correction(ops, KL, potential, fam.off_diagonal);
    auto Lu = gauge_operator(ops, KL, potential)(fam.gauge.u);
    fam.corrected_off_diagonal.resize(g.cells());
    for (int c = 0; c < g.cells(); ++c) fam.corrected_off_diagonal[c] = fam.off_diagonal[c] + Lu[c];
    return fam;
}

DeformedState deform_at(const DeformationFamily& fam, double s, DeviationPath path) {
    if (!(s > 0 && s <= 1)) throw ValidationError("deformation parameter must lie in (0, 1], got " + std::to_string(s));
    const SphereGrid& g = *fam.grid;
    int k1 = fam.k_sub(), k2 = fam.k_quotient(), k = k1 + k2;
    double lam = fam.lambda;
    DeformedState st;
    st.s = s;
    st.gamma = deformation_gamma(lam, s);
    st.lift_scale = lam * st.gamma / s;
    double g2 = st.gamma * st.gamma;
    double off_scale = g2 / s;

    st.frame = MatrixField(g.cells(), 2, k);
    st.deviation = MatrixField(g.cells(), 2, 2);
    st.gram = Eigen::MatrixXcd::Zero(k, k);
    for (int c = 0; c < g.cells(); ++c) {
        auto F = st.frame[c];
        for (int i = 0; i < k1; ++i) F(0, i) = fam.phi[i][c];
        for (int i = 0; i < k2; ++i) {
            F(0, k1 + i) = st.gamma * fam.lift[i][c];
            F(1, k1 + i) = st.lift_scale * fam.rho[i][c];
        }
        st.gram += g.cell_weight(c) * Eigen::MatrixXcd(F).adjoint() * Eigen::MatrixXcd(F);

        double ext = 2 * s * s * fam.extension_density[c];
        double top, bottom;
        if (path == DeviationPath::formula) {
            double lifts = 0, rhos = 0;
            for (int i = 0; i < k2; ++i) {
                lifts += std::norm(fam.lift[i][c]);
                rhos += std::norm(fam.rho[i][c]);
            }
            top = (fam.tau_sub - fam.tau) + ext + g2 * lifts;
            bottom = (fam.tau_quotient - fam.tau) - ext - g2 * (1 - lam * lam) * rhos;
        } else {
            top = fam.K_sub[c] - fam.tau + ext;
            bottom = fam.K_quotient[c] - fam.tau - ext;
            for (int i = 0; i < k; ++i) {
                top += std::norm(F(0, i));
                bottom += std::norm(F(1, i));
            }
        }
        auto D = st.deviation[c];
        D(0, 0) = top;
        D(1, 1) = bottom;
        D(0, 1) = off_scale * fam.corrected_off_diagonal[c];
        D(1, 0) = std::conj(D(0, 1));
    }
    st.J = trace_norm_l2(st.deviation, g);
    return st;
}

std::vector<std::pair<double, double>> j_curve(const DeformationFamily& fam, const std::vector<double>& s_values,
                                               DeviationPath path) {
    std::vector<std::pair<double, double>> out;
    for (double s : s_values) out.emplace_back(s, deform_at(fam, s, path).J);
    return out;
}

double predicted_j(const DeformationFamily& fam, double s, double section_coefficient) {
    double gm = deformation_gamma(fam.lambda, s);
    return to_double(fam.gap) - 2 * s * s * fam.extension_norm2 -
           section_coefficient * (1 - fam.lambda * fam.lambda) * gm * gm * fam.alpha;
}

std::pair<SplitSystemConfig, MatrixField> undeformed_system(const DeformationInput& in, const DeformationFamily& fam) {
    const SphereGrid& g = *fam.grid;
    int a1 = in.sub.config.degrees[0], a2 = in.quotient.config.degrees[0];
    SplitSystemConfig cfg{{a1, a2}, {}};
    for (const auto& sec : in.sub.config.sections) cfg.sections.push_back({sec[0], Polynomial{cd(0)}});
    Eigen::MatrixXcd C = fam.quotient_matrix * fam.lift_matrix.inverse();
    for (int l = 0; l < fam.k_quotient(); ++l) {
        Polynomial bottom(a2 + 1, cd(0));
        for (int j = 0; j < fam.k_quotient(); ++j) {
            const auto& p = in.quotient.config.sections[j][0];
            for (std::size_t d = 0; d < p.size(); ++d) bottom[d] += fam.lambda * C(j, l) * p[d];
        }
        cfg.sections.push_back({in.lifts[l], bottom});
    }
    MatrixField S(g.cells(), 2, 2);
    for (int c = 0; c < g.cells(); ++c) {
        S[c](0, 0) = in.sub.S[c](0, 0);
        S[c](1, 1) = in.quotient.S[c](0, 0);
    }
    return {cfg, S};
}

} // namespace vortex
