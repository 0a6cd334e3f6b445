#include <gtest/gtest.h>

#include "vortex/errors.hpp"
#include "vortex/flow_solver.hpp"
#include "vortex/preconditioner.hpp"
#include "vortex/states.hpp"

#include <cmath>

using namespace vortex;

namespace {

AlphaParam alpha_of(long p, long q = 1) { return AlphaParam(Rational(BigInt(p)) / BigInt(q)); }
Rational R(long p, long q = 1) { return Rational(BigInt(p)) / BigInt(q); }

SplitSystemConfig line_with_two_sections() { return {{1}, {{{cd(1)}}, {{cd(0), cd(1)}}}}; }

} // namespace

TEST(Preconditioner, InvertsTheShiftedOperator) {
    auto g = build_grid(16);
    for (int m : {0, 1, -2, 3}) {
        ComplexField f(g.cells());
        for (int c = 0; c < g.cells(); ++c) f[c] = cd(std::sin(0.3 * c), std::cos(0.7 * c));
        auto x = shifted_laplacian_solve(f, m, 0.75, g);
        auto lx = covariant_laplacian(x, m, g);
        double err = 0;
        for (int c = 0; c < g.cells(); ++c) err = std::max(err, std::abs(0.75 * x[c] - lx[c] - f[c]));
        EXPECT_LT(err, 1e-10) << "charge " << m;
    }
    EXPECT_THROW(shifted_laplacian_solve(ComplexField(g.cells()), 0, 0.0, g), ValidationError);
}

TEST(Preconditioner, KeepsFieldsHermitian) {
    auto g = build_grid(12);
    SplitSystemConfig cfg{{2, -1, 0}, {}};
    auto X = random_smooth_state(cfg, g, 4, 1.0);
    auto Y = precondition(X, cfg, 1.0, g);
    for (int c = 0; c < g.cells(); ++c) EXPECT_LT((CMat(Y[c]) - CMat(Y[c]).adjoint()).norm(), 1e-14);
    auto Z = precondition(X, cfg, 1.0, g, Exec::serial);
    for (int c = 0; c < g.cells(); ++c) EXPECT_EQ((CMat(Y[c]) - CMat(Z[c])).norm(), 0.0);
}

TEST(FlowParams, Validation) {
    FlowParams p;
    EXPECT_NO_THROW(p.validate());
    p.backtrack = 1.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.tol_J = 0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.step = -1;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(FlowSolver, TrivialLineFromRandomStart) {
    auto g = build_grid(32);
    SplitSystemConfig cfg{{0}, {{{cd(1)}}}};
    auto S0 = random_smooth_state(cfg, g, 17, 1.0);
    auto rep = solve_vortex(cfg, alpha_of(1), g, {}, &S0);
    ASSERT_TRUE(rep.converged);
    EXPECT_LT(rep.J, 1e-6);
    // |phi|_H = 1 everywhere
    VortexModel m(cfg, g, alpha_of(1));
    auto ev = m.evaluate(rep.S);
    Eigen::MatrixXcd B = m.frame(ev);
    for (int c = 0; c < g.cells(); ++c) {
        cd phi = m.sections()[c](0, 0) * B(0, 0);
        EXPECT_NEAR(std::norm(phi) * ev.h[c](0, 0).real(), 1.0, 1e-6);
    }
}

TEST(FlowSolver, FubiniStudyFromPerturbedStart) {
    auto g = build_grid(32);
    auto cfg = line_with_two_sections();
    auto S0 = random_smooth_state(cfg, g, 2, 0.5);
    auto rep = solve_vortex(cfg, alpha_of(1), g, {}, &S0);
    ASSERT_TRUE(rep.converged);
    auto K = curvature(cfg, rep.S, g);
    double sup = 0;
    for (int c = 0; c < g.cells(); ++c) sup = std::max(sup, std::abs(K[c](0, 0) - 1.0));
    EXPECT_LT(sup, 1e-3);
    EXPECT_LT(rep.gram_residual, 1e-12);
}

TEST(FlowSolver, HistoryIsMonotone) {
    auto g = build_grid(16);
    SplitSystemConfig cfg{{2, 1}, {{{cd(0), cd(0), cd(1)}, {cd(1)}}}};
    auto S0 = random_smooth_state(cfg, g, 5, 1.0);
    auto rep = solve_vortex(cfg, alpha_of(2), g, {}, &S0);
    ASSERT_GT(rep.history.size(), 2u);
    for (std::size_t i = 1; i < rep.history.size(); ++i) {
        EXPECT_LE(rep.history[i].l2, rep.history[i - 1].l2);
        EXPECT_EQ(rep.history[i].iteration, static_cast<int>(i));
        EXPECT_GT(rep.history[i].step, 0.0);
    }
    EXPECT_TRUE(rep.converged);
}

TEST(FlowSolver, UnstableSplitSystemsRespectTheBound) {
    auto g = build_grid(16);
    struct Case {
        SplitSystemConfig cfg;
        Rational bound;
    };
    std::vector<Case> cases{
        {{{2, 0}, {{{cd(1)}, {}}}}, R(3)},
        {{{2, 0}, {{{}, {cd(1)}}}}, R(1)},
    };
    for (const auto& c : cases) {
        auto S0 = random_smooth_state(c.cfg, g, 9, 0.5);
        auto rep = solve_vortex(c.cfg, alpha_of(1), g, {}, &S0);
        EXPECT_FALSE(rep.converged);
        ASSERT_TRUE(rep.lower_bound.has_value());
        EXPECT_EQ(*rep.lower_bound, c.bound);
        for (const auto& row : rep.history) EXPECT_GE(row.J, to_double(c.bound) - 1e-2);
        EXPECT_GE(*rep.margin, -1e-2);
    }
}

TEST(FlowSolver, SolutionsAgreeUpToScalarGauge) {
    auto g = build_grid(16);
    SplitSystemConfig cfg{{1, 1}, {{{cd(0), cd(1)}, {cd(1)}}}};
    auto S1 = random_smooth_state(cfg, g, 31, 1.0), S2 = random_smooth_state(cfg, g, 32, 1.0);
    auto a = solve_vortex(cfg, alpha_of(1), g, {}, &S1), b = solve_vortex(cfg, alpha_of(1), g, {}, &S2);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_GT(metric_distance(S1, S2), 0.1);
    EXPECT_LT(metric_distance(a.S, b.S), 1e-3);
}

TEST(FlowSolver, DeterministicAndBoundedByIterations) {
    auto g = build_grid(12);
    auto cfg = line_with_two_sections();
    auto S0 = random_smooth_state(cfg, g, 6);
    FlowParams p;
    p.max_iterations = 3;
    auto a = solve_vortex(cfg, alpha_of(1), g, p, &S0), b = solve_vortex(cfg, alpha_of(1), g, p, &S0);
    EXPECT_EQ(a.status, SolveStatus::max_iterations);
    EXPECT_EQ(a.iterations, 3);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].l2, b.history[i].l2);
    p.exec = Exec::serial;
    auto c = solve_vortex(cfg, alpha_of(1), g, p, &S0);
    EXPECT_EQ(c.history.back().l2, a.history.back().l2);
}

TEST(FlowSolver, RejectsDependentSections) {
    auto g = build_grid(8);
    SplitSystemConfig cfg{{1}, {{{cd(1), cd(1)}}, {{cd(2), cd(2)}}}};
    EXPECT_THROW(solve_vortex(cfg, alpha_of(1), g), DependentSectionsError);
}

TEST(GradientCheck, AgreesWithFiniteDifferences) {
    auto g = build_grid(16);
    SplitSystemConfig cfg{{2, -1}, {{{cd(1), cd(0.5)}, {}}}};
    auto S = random_smooth_state(cfg, g, 77, 0.7);
    EXPECT_LT(gradient_check(cfg, S, alpha_of(3, 2), g).max_relative_error, 1e-4);
}

TEST(GradientCheck, VanishesAtAnExactSolution) {
    auto g = build_grid(16);
    SplitSystemConfig cfg{{0}, {{{cd(1)}}}};
    auto r = gradient_check(cfg, MatrixField(g.cells(), 1, 1), alpha_of(1), g);
    EXPECT_LT(r.max_abs_derivative, 1e-8);
}

TEST(GradientCheck, CentralDifferenceOrder) {
    auto g = build_grid(12);
    auto cfg = line_with_two_sections();
    auto S = random_smooth_state(cfg, g, 3, 0.8);
    double coarse = gradient_check(cfg, S, alpha_of(1), g, 4, 3, 1e-2).max_relative_error;
    double fine = gradient_check(cfg, S, alpha_of(1), g, 4, 3, 1e-3).max_relative_error;
    EXPECT_GT(coarse / fine, 30.0);
}

TEST(ObstructionBound, Examples) {
    EXPECT_EQ(obstruction_bound({2, 2, 1}, {2, 1, 1}, {0, 1, 0}, alpha_of(1)), R(3));
    // sub slope equal to the total slope: the quotient slope ties too
    EXPECT_EQ(obstruction_bound({2, 2, 1}, {2, 1, 0}, {0, 1, 1}, alpha_of(2)), R(0));
    EXPECT_THROW(obstruction_bound({2, 2, 1}, {0, 1, 0}, {2, 1, 1}, alpha_of(1)), PreconditionError);
    EXPECT_THROW(obstruction_bound({2, 2, 1}, {2, 1, 1}, {1, 1, 0}, alpha_of(1)), ValidationError);
    EXPECT_EQ(extension_gap({2, 2, 1}, {2, 1, 1}, {0, 1, 0}, alpha_of(1)), R(-3));
    // shrinking the slope gap drives the bound to zero
    Rational prev = R(100);
    for (long q : {10, 100, 1000}) {
        Rational b = obstruction_bound({2, 2, 1}, {2, 1, 0}, {0, 1, 1}, AlphaParam(R(2) - R(1, q)));
        EXPECT_LT(b, prev);
        prev = b;
    }
    EXPECT_EQ(prev, R(1, 1000));
}

TEST(ObstructionBound, WitnessForDecomposableSystems) {
    DecomposableSystem sys({{2, 1}, {0, 0}});
    auto ob = decomposable_obstruction(sys, alpha_of(1));
    ASSERT_TRUE(ob.has_value());
    EXPECT_EQ(ob->witness.indices, std::vector<int>{0});
    EXPECT_EQ(ob->bound, R(3));
    EXPECT_FALSE(decomposable_obstruction(DecomposableSystem({{1, 1}, {1, 1}}), alpha_of(1)).has_value());
    EXPECT_FALSE(decomposable_obstruction(DecomposableSystem({{3, 2}}), alpha_of(1)).has_value());
}
