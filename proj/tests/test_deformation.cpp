#include "vortex/deformation.hpp"
#include "vortex/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace vortex;

namespace {

AlphaParam ratio(long p, long q) { return AlphaParam(Rational(BigInt(p)) / BigInt(q)); }

LinePiece solved(int degree, std::vector<Polynomial> sections, const AlphaParam& alpha, const SphereGrid& g) {
    SplitSystemConfig cfg{{degree}, {}};
    for (auto& p : sections) cfg.sections.push_back({p});
    FlowParams fp;
    fp.tol_J = 1e-9;
    auto rep = solve_vortex(cfg, alpha, g, fp);
    EXPECT_TRUE(rep.converged);
    return {cfg, rep.S};
}

// O(1) with {1}, lifted by z, over O(2) with {1}; k_sub = k_quotient = 1
DeformationInput toy(const AlphaParam& alpha, const SphereGrid& g, bool sub_sections = true) {
    DeformationInput in;
    in.sub = solved(1, sub_sections ? std::vector<Polynomial>{{1.0}} : std::vector<Polynomial>{}, alpha, g);
    in.quotient = solved(2, {{1.0}}, alpha, g);
    in.lifts = {{0.0, 1.0}};
    in.lambda = 0.5;
    return in;
}

ComplexField random_field(int n, unsigned seed, double amplitude) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    ComplexField f(n);
    for (auto& v : f) v = amplitude * cd(nd(rng), nd(rng));
    return f;
}

double weighted_norm(const ComplexField& f, const SphereGrid& g) {
    double s = 0;
    for (int c = 0; c < g.cells(); ++c) s += g.cell_weight(c) * std::norm(f[c]);
    return std::sqrt(s);
}

Eigen::MatrixXcd dense(const LinearMap& A, int n) {
    Eigen::MatrixXcd M(n, n);
    for (int j = 0; j < n; ++j) {
        ComplexField e(n, cd(0));
        e[j] = 1;
        auto col = A(e);
        for (int i = 0; i < n; ++i) M(i, j) = col[i];
    }
    return M;
}

} // namespace

TEST(Deformation, GammaLimits) {
    EXPECT_NEAR(deformation_gamma(0.5, 1.0), 1.0, 1e-15);
    double s = 1e-3;
    double gm = deformation_gamma(0.5, s);
    EXPECT_NEAR(gm, s / 0.5, 1e-8);
    EXPECT_NEAR(0.5 * gm / s, 1.0, 1e-5);
}

TEST(Deformation, ToyCurveFollowsTwiceQuotientSections) {
    auto g = build_grid(32);
    auto alpha = ratio(3, 20);
    auto in = toy(alpha, g);
    auto fam = build_deformation(in, alpha, g);
    EXPECT_EQ(to_double(fam.gap), 1.0);
    EXPECT_LT(fam.gauge.residual, 1e-8);

    double prev = 2;
    for (double s : {1e-3, 0.1, 0.25, 0.5, 0.75, 1.0}) {
        auto st = deform_at(fam, s);
        EXPECT_LT((st.gram - fam.alpha * Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-12) << s;
        EXPECT_NEAR(st.J, predicted_j(fam, s, 2.0 * fam.k_quotient()), 5e-3) << s;
        EXPECT_LT(st.J, prev);
        prev = st.J;
    }
    EXPECT_NEAR(deform_at(fam, 1e-3).J, to_double(fam.gap), 1e-5);
    // k_quotient alone is far off at s = 1
    EXPECT_GT(std::abs(deform_at(fam, 1.0).J - predicted_j(fam, 1.0, fam.k_quotient())), 0.05);
}

// Without sub sections the total k differs from 2 k_quotient, which is the
// coefficient the curve follows.
TEST(Deformation, CoefficientIsNotTotalSectionCount) {
    auto g = build_grid(32);
    auto alpha = ratio(3, 20);
    auto fam = build_deformation(toy(alpha, g, false), alpha, g);
    int k = fam.k_sub() + fam.k_quotient();
    ASSERT_EQ(k, 1);
    auto st = deform_at(fam, 1.0);
    EXPECT_NEAR(st.J, predicted_j(fam, 1.0, 2.0 * fam.k_quotient()), 5e-3);
    EXPECT_GT(std::abs(st.J - predicted_j(fam, 1.0, k)), 0.05);
}

TEST(Deformation, PathsAgreeWithDirectEvaluation) {
    auto g = build_grid(32);
    auto alpha = ratio(1, 10);
    auto in = toy(alpha, g);
    auto fam = build_deformation(in, alpha, g);
    for (double s : {0.2, 0.6, 1.0}) EXPECT_NEAR(deform_at(fam, s).J, deform_at(fam, s, DeviationPath::frame).J, 1e-6);

    // at s = 1 the block-diagonal part of the untouched split system matches
    auto [cfg, S] = undeformed_system(in, fam);
    auto dev = moment_map_deviation(cfg, S, alpha, g);
    MatrixField blocks = dev;
    for (int c = 0; c < g.cells(); ++c) blocks[c](0, 1) = blocks[c](1, 0) = 0;
    auto st = deform_at(fam, 1.0, DeviationPath::frame);
    EXPECT_NEAR(trace_norm_l2(blocks, g), st.J, 1e-9);
    for (int c = 0; c < g.cells(); c += 37) {
        EXPECT_NEAR(std::abs(dev[c](0, 1) - fam.off_diagonal[c]), 0.0, 1e-9);
        EXPECT_NEAR(dev[c](0, 0).real(), st.deviation[c](0, 0).real(), 1e-9);
    }
}

TEST(Deformation, GaugeCorrectionMatchesDenseSolve) {
    auto g = build_grid(16);
    auto alpha = ratio(3, 20);
    auto in = toy(alpha, g);
    auto fam = build_deformation(in, alpha, g);
    LineBundleOps ops(g, fam.charge, fam.sigma);
    ScalarField K(g.cells()), V(g.cells());
    for (int c = 0; c < g.cells(); ++c) {
        K[c] = fam.K_sub[c] - fam.K_quotient[c];
        V[c] = 0.25 * std::norm(fam.rho[0][c]);
    }
    auto L = dense(gauge_operator(ops, K, V), g.cells());
    Eigen::VectorXcd b(g.cells());
    for (int c = 0; c < g.cells(); ++c) b(c) = -fam.off_diagonal[c];
    Eigen::VectorXcd u = L.partialPivLu().solve(b);
    double diff = 0, norm = 0;
    for (int c = 0; c < g.cells(); ++c) {
        diff = std::max(diff, std::abs(u(c) - fam.gauge.u[c]));
        norm = std::max(norm, std::abs(u(c)));
    }
    EXPECT_LT(diff, 1e-7 * norm);
    EXPECT_LT(fam.gauge.residual, 1e-8);
    EXPECT_LT(weighted_norm(fam.corrected_off_diagonal, g), 1e-8);

    // L is self-adjoint for the quadrature weights, so W^{1/2} L W^{-1/2} is Hermitian
    Eigen::VectorXd w(g.cells());
    for (int c = 0; c < g.cells(); ++c) w(c) = std::sqrt(g.cell_weight(c));
    Eigen::MatrixXcd H = w.asDiagonal() * L * w.cwiseInverse().asDiagonal();
    double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(0.5 * (H + H.adjoint())).eigenvalues()(0);
    EXPECT_GT(lo, 0.0);
    // a Rayleigh quotient, so never below the true value
    EXPECT_GT(fam.gauge.min_eigenvalue, lo - 1e-9);
    EXPECT_LT(fam.gauge.min_eigenvalue, 1.01 * lo);
}

TEST(Deformation, GaugeCorrectionEdgeCases) {
    auto g = build_grid(16);
    LineBundleOps ops(g, -1, ScalarField(g.cells(), 0.0));
    ScalarField K(g.cells(), -1.0), V(g.cells(), 0.1);
    auto zero = solve_gauge_correction(ops, K, V, ComplexField(g.cells(), cd(0)));
    EXPECT_EQ(weighted_norm(zero.u, g), 0.0);

    LineBundleOps flat(g, 0, ScalarField(g.cells(), 0.0));
    ScalarField none(g.cells(), 0.0);
    EXPECT_THROW(solve_gauge_correction(flat, none, none, random_field(g.cells(), 1, 1.0)), SingularOperatorError);
    EXPECT_THROW(solve_gauge_correction(ops, K, V, ComplexField(3)), ValidationError);
}

// conj of a holomorphic section of O(-m): a smooth section of O(m), m < 0
ComplexField smooth_section(int m, const Polynomial& p, const SphereGrid& g) {
    SplitSystemConfig cfg{{-m}, {{p}}};
    auto f = evaluate_sections(cfg, g).entry(0, 0);
    for (auto& v : f) v = std::conj(v);
    return f;
}

TEST(Deformation, CoulombProjection) {
    auto sigma_of = [](const SphereGrid& g) {
        return sample(g, [](double t, double p) { return 0.3 * std::cos(t) + 0.2 * std::sin(t) * std::sin(p); });
    };
    double prev_exact = 0, prev_closed = 0;
    for (int N : {16, 32}) {
        auto g = build_grid(N);
        // Hom(O(2), O(1)) has no first cohomology: exact forms project away
        LineBundleOps ops(g, -1, sigma_of(g));
        auto exact = ops.dbar(smooth_section(-1, {1.0, cd(0.4, -0.7)}, g));
        double e = weighted_norm(coulomb_projection(ops, exact), g) / weighted_norm(exact, g);

        // Hom(O(2), O(0)) does: the harmonic part survives and is co-closed
        LineBundleOps ops2(g, -2, sigma_of(g));
        ComplexField beta(g.cells());
        for (int c = 0; c < g.cells(); ++c) beta[c] = std::polar(1.0 + 0.3 * std::cos(g.theta[g.row(c)]), -g.phi[g.col(c)]);
        auto proj = coulomb_projection(ops2, beta);
        EXPECT_GT(weighted_norm(proj, g), 0.1 * weighted_norm(beta, g));
        double closed = weighted_norm(ops2.dbar_adjoint(proj), g) / weighted_norm(ops2.dbar_adjoint(beta), g);

        // adding an exact form does not change the result
        auto shifted = beta;
        auto dv = ops2.dbar(smooth_section(-2, {0.5, 1.0, cd(0, 0.3)}, g));
        for (int c = 0; c < g.cells(); ++c) shifted[c] += dv[c];
        auto proj2 = coulomb_projection(ops2, shifted);
        ComplexField diff(g.cells());
        for (int c = 0; c < g.cells(); ++c) diff[c] = proj2[c] - proj[c];
        EXPECT_LT(weighted_norm(diff, g), 0.05 * weighted_norm(dv, g));

        if (prev_exact > 0) {
            EXPECT_GT(prev_exact / e, 3.0);
            EXPECT_GT(prev_closed / closed, 3.0);
        }
        prev_exact = e;
        prev_closed = closed;
    }
    EXPECT_LT(prev_exact, 0.01);
    EXPECT_LT(prev_closed, 0.01);
}

TEST(Deformation, ExtensionClassLowersCurve) {
    auto g = build_grid(32);
    auto alpha = ratio(1, 10);
    DeformationInput in;
    in.sub = solved(0, {}, alpha, g);
    in.quotient = solved(2, {{1.0}}, alpha, g);
    in.lifts = {{1.0}};
    in.lambda = 0.5;
    in.extension = ComplexField(g.cells());
    for (int c = 0; c < g.cells(); ++c) in.extension[c] = std::polar(0.12, -g.phi[g.col(c)]);
    auto fam = build_deformation(in, alpha, g);
    EXPECT_GT(fam.extension_norm2, 1e-3);
    EXPECT_LT(fam.gauge.residual, 1e-8);
    for (double s : {0.3, 0.7, 1.0}) EXPECT_NEAR(deform_at(fam, s).J, predicted_j(fam, s, 2.0), 5e-3) << s;
}

TEST(Deformation, RejectsBadInput) {
    auto g = build_grid(16);
    auto alpha = ratio(3, 20);
    auto in = toy(alpha, g);

    auto bad = in;
    bad.lambda = 1.0;
    EXPECT_THROW(build_deformation(bad, alpha, g), ValidationError);

    bad = in;
    bad.quotient.S = MatrixField(g.cells(), 1, 1);
    bad.quotient.S[0](0, 0) = 1.0;
    EXPECT_THROW(build_deformation(bad, alpha, g), PreconditionError);

    bad = in;
    bad.lifts = {{1.0}};
    EXPECT_THROW(build_deformation(bad, alpha, g), DependentSectionsError);

    bad = in;
    bad.lifts = {};
    EXPECT_THROW(build_deformation(bad, alpha, g), ValidationError);

    auto fam = build_deformation(in, alpha, g);
    EXPECT_THROW(deform_at(fam, 0.0), ValidationError);
    EXPECT_THROW(deform_at(fam, 1.5), ValidationError);
}
