#include "vortex/line_operators.hpp"
#include "vortex/errors.hpp"
#include "vortex/system_config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace vortex;

namespace {

ScalarField bumpy(const SphereGrid& g) {
    return sample(g, [](double t, double p) { return 0.4 * std::cos(t) + 0.3 * std::sin(t) * std::cos(p) - 0.2 * std::sin(t) * std::sin(t) * std::sin(2 * p); });
}

ComplexField holomorphic(int m, const Polynomial& p, const SphereGrid& g) {
    SplitSystemConfig cfg{{m}, {{p}}};
    return evaluate_sections(cfg, g).entry(0, 0);
}

double sup(const ComplexField& f) {
    double s = 0;
    for (auto v : f) s = std::max(s, std::abs(v));
    return s;
}

ComplexField random_field(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    ComplexField f(n);
    for (auto& v : f) v = cd(nd(rng), nd(rng));
    return f;
}

} // namespace

TEST(LineOperators, FlatMetricMatchesCovariantLaplacian) {
    auto g = build_grid(16);
    auto f = random_field(g.cells(), 3);
    for (int m : {-2, 0, 1, 3}) {
        LineBundleOps ops(g, m, ScalarField(g.cells(), 0.0));
        auto a = ops.laplacian(f), b = covariant_laplacian(f, m, g);
        for (int c = 0; c < g.cells(); ++c) EXPECT_NEAR(std::abs(a[c] - b[c]), 0.0, 1e-12);
    }
}

TEST(LineOperators, DbarKillsHolomorphicSections) {
    double prev = 0;
    for (int N : {16, 32, 64}) {
        auto g = build_grid(N);
        LineBundleOps ops(g, 2, ScalarField(g.cells(), 0.0));
        double err = sup(ops.dbar(holomorphic(2, {1.0, cd(0.5, 1), 0.7}, g)));
        if (prev > 0) EXPECT_GT(prev / err, 3.0);
        prev = err;
    }
    EXPECT_LT(prev, 1e-2);
}

// A holomorphic section written in the unitary frame of e^sigma h_FS is
// annihilated by -Delta_A - K/2 with K = m - Delta sigma.
TEST(LineOperators, WeitzenbockOnHolomorphicSections) {
    double prev = 0;
    for (int N : {16, 32, 64}) {
        auto g = build_grid(N);
        int m = 1;
        auto sigma = bumpy(g);
        LineBundleOps ops(g, m, sigma);
        auto u = holomorphic(m, {1.0, cd(0.3, -0.8)}, g);
        auto lap_sigma = laplacian(sigma, g);
        for (int c = 0; c < g.cells(); ++c) u[c] *= std::exp(0.5 * sigma[c]);
        auto lu = ops.laplacian(u);
        // the pole row is first order in the max norm, so measure in L2
        double err = 0;
        for (int c = 0; c < g.cells(); ++c) err += g.cell_weight(c) * std::norm(-lu[c] - 0.5 * (m - lap_sigma[c]) * u[c]);
        err = std::sqrt(err);
        if (prev > 0) EXPECT_GT(prev / err, 3.0);
        prev = err;
    }
    EXPECT_LT(prev, 1e-3);
}

// conj of a holomorphic section of O(-m): a smooth section of O(m), m < 0
ComplexField smooth_section(int m, const Polynomial& p, const SphereGrid& g) {
    auto f = holomorphic(-m, p, g);
    for (auto& v : f) v = std::conj(v);
    return f;
}

// Integration by parts holds up to discretization error on smooth data.
TEST(LineOperators, DbarAdjointIdentity) {
    for (int m : {-1, -2}) {
        double prev = 0;
        for (int N : {16, 32, 64}) {
            auto g = build_grid(N);
            auto sigma = bumpy(g);
            LineBundleOps ops(g, m, sigma);
            auto u = smooth_section(m, {1.0, cd(0.2, 0.5)}, g);
            auto b = ops.dbar(smooth_section(m, {cd(0.3, -1), 0.7}, g));
            if (m == -2)
                for (int c = 0; c < g.cells(); ++c) b[c] += std::polar(std::exp(-sigma[c]), -g.phi[g.col(c)]);
            auto du = ops.dbar(u), dsb = ops.dbar_adjoint(b);
            cd lhs = 0, rhs = 0;
            double scale = 0;
            for (int c = 0; c < g.cells(); ++c) {
                double w = g.cell_weight(c) * std::exp(sigma[c]);
                lhs += 2.0 * w * std::conj(du[c]) * b[c];
                rhs += w * std::conj(u[c]) * dsb[c];
                scale += 2.0 * w * std::abs(du[c]) * std::abs(b[c]);
            }
            double err = std::abs(lhs - rhs) / scale;
            if (prev > 0) EXPECT_GT(prev / err, 1.8) << m;
            prev = err;
        }
        EXPECT_LT(prev, 5e-3) << m;
    }
}

// e^{-sigma - i phi} is the harmonic representative for Hom(O(2), O(0))
TEST(LineOperators, HarmonicFormIsCoclosed) {
    double prev = 0;
    for (int N : {16, 32, 64}) {
        auto g = build_grid(N);
        auto sigma = bumpy(g);
        LineBundleOps ops(g, -2, sigma);
        ComplexField b(g.cells());
        for (int c = 0; c < g.cells(); ++c) b[c] = std::polar(std::exp(-sigma[c]), -g.phi[g.col(c)]);
        auto d = ops.dbar_adjoint(b);
        double err = 0;
        for (int c = 0; c < g.cells(); ++c) err += g.cell_weight(c) * std::norm(d[c]);
        err = std::sqrt(err);
        if (prev > 0) EXPECT_GT(prev / err, 1.8);
        prev = err;
    }
    EXPECT_LT(prev, 0.01);
}

TEST(LineOperators, LaplacianSelfAdjoint) {
    auto g = build_grid(16);
    LineBundleOps ops(g, -1, bumpy(g));
    auto w = cell_weights(g);
    auto u = random_field(g.cells(), 7), v = random_field(g.cells(), 8);
    auto lu = ops.laplacian(u), lv = ops.laplacian(v);
    cd a = 0, b = 0;
    for (int c = 0; c < g.cells(); ++c) {
        a += w[c] * std::conj(lu[c]) * v[c];
        b += w[c] * std::conj(u[c]) * lv[c];
    }
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-10 * std::abs(a));
}

TEST(LineOperators, KrylovSolversOnShiftedLaplacian) {
    auto g = build_grid(16);
    LineBundleOps ops(g, 1, bumpy(g));
    auto w = cell_weights(g);
    LinearMap A = [&](const ComplexField& u) {
        auto out = ops.laplacian(u);
        for (int c = 0; c < g.cells(); ++c) out[c] = 0.75 * u[c] - out[c];
        return out;
    };
    auto b = random_field(g.cells(), 9);
    auto res = conjugate_gradient(A, b, w, 1e-10, 2000);
    EXPECT_LT(res.residual, 1e-10);
    // -Delta_A is nonnegative, so the shift bounds the spectrum below
    double lo = smallest_eigenvalue(A, w);
    EXPECT_GT(lo, 0.75 - 1e-6);
    EXPECT_LT(lo, 2.0);
}

TEST(LineOperators, RejectsMismatchedMetric) {
    auto g = build_grid(16);
    EXPECT_THROW(LineBundleOps(g, 0, ScalarField(5, 0.0)), ValidationError);
}
