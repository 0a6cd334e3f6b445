#include "vortex/line_operators.hpp"

#include "vortex/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace vortex {

namespace {

double pole_continued(const ScalarField& f, int j, int l, const SphereGrid& g) {
    if (j < 0) return f[g.index(0, g.wrap(l + g.N))];
    if (j >= g.N) return f[g.index(g.N - 1, g.wrap(l + g.N))];
    return f[g.index(j, g.wrap(l))];
}

double inner(const ComplexField& a, const ComplexField& b, const std::vector<double>& w) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::real(std::conj(a[i]) * b[i]);
    return s;
}

// Emits (source cell, coefficient) pairs of the centred dbar stencil at (j, l).
template <class Emit>
void dbar_stencil(const SphereGrid& g, int m, int j, int l, Emit&& emit) {
    const double r2 = 1.0 / std::sqrt(2.0);
    double ct = r2 / (2 * g.dtheta);
    if (j + 1 < g.N) emit(g.index(j + 1, l), cd(ct));
    else emit(g.index(g.N - 1, g.wrap(l + g.N)), cd(m % 2 != 0 ? -ct : ct));
    if (j > 0) emit(g.index(j - 1, l), cd(-ct));
    else emit(g.index(0, g.wrap(l + g.N)), cd(-ct));

    cd fwd = std::polar(1.0, -m * g.link_s[j] * g.dphi);
    cd cp = cd(0, r2 / (g.sin_theta[j] * 2 * g.dphi));
    emit(g.index(j, g.wrap(l + 1)), cp * fwd);
    emit(g.index(j, g.wrap(l - 1)), -cp * std::conj(fwd));
}

} // namespace

std::vector<double> cell_weights(const SphereGrid& g) {
    std::vector<double> w(g.cells());
    for (int c = 0; c < g.cells(); ++c) w[c] = g.cell_weight(c);
    return w;
}

LineBundleOps::LineBundleOps(const SphereGrid& g, int charge, ScalarField sigma)
    : g_(&g), m_(charge), sigma_(std::move(sigma)) {
    if (static_cast<int>(sigma_.size()) != g.cells())
        throw ValidationError("metric field has " + std::to_string(sigma_.size()) + " cells, grid has " +
                              std::to_string(g.cells()));
    int n = g.n_phi;
    std::vector<double> st(g.cells()), sp(g.cells());
    for (int j = 0; j < g.N; ++j)
        for (int l = 0; l < n; ++l) {
            st[g.index(j, l)] = (pole_continued(sigma_, j + 1, l, g) - pole_continued(sigma_, j - 1, l, g)) / (2 * g.dtheta);
            sp[g.index(j, l)] = (sigma_[g.index(j, g.wrap(l + 1))] - sigma_[g.index(j, g.wrap(l - 1))]) / (2 * g.dphi);
        }
    // unitary-frame connection A_FS + (i/2) *d sigma
    phi_link_.resize(g.cells());
    for (int j = 0; j < g.N; ++j)
        for (int l = 0; l < n; ++l) {
            double face_t = 0.5 * (st[g.index(j, l)] + st[g.index(j, g.wrap(l + 1))]);
            double angle = m_ * g.link_s[j] * g.dphi - 0.5 * g.sin_theta[j] * face_t * g.dphi;
            phi_link_[g.index(j, l)] = std::polar(1.0, -angle);
        }
    theta_link_.assign(std::size_t(g.N + 1) * n, cd(1));
    for (int e = 1; e < g.N; ++e)
        for (int l = 0; l < n; ++l) {
            // average d_phi sigma / sin(theta), not d_phi sigma: the pole row amplifies the difference
            double ratio = 0.5 * (sp[g.index(e - 1, l)] / g.sin_theta[e - 1] + sp[g.index(e, l)] / g.sin_theta[e]);
            theta_link_[std::size_t(e) * n + l] = std::polar(1.0, -0.5 * ratio * g.dtheta);
        }
}

ComplexField LineBundleOps::laplacian(const ComplexField& f) const {
    const SphereGrid& g = *g_;
    int n = g.n_phi;
    ComplexField out(g.cells());
    double cn = g.dphi / g.dtheta;
    for (int j = 0; j < g.N; ++j) {
        double cphi = g.dtheta / (g.dphi * g.sin_theta[j]);
        for (int l = 0; l < n; ++l) {
            int c = g.index(j, l);
            cd acc = 0;
            if (j + 1 < g.N)
                acc += cn * g.sin_edge[j + 1] * (theta_link_[std::size_t(j + 1) * n + l] * f[g.index(j + 1, l)] - f[c]);
            if (j > 0)
                acc += cn * g.sin_edge[j] * (std::conj(theta_link_[std::size_t(j) * n + l]) * f[g.index(j - 1, l)] - f[c]);
            int lm = g.wrap(l - 1);
            acc += cphi * (phi_link_[c] * f[g.index(j, g.wrap(l + 1))] + std::conj(phi_link_[g.index(j, lm)]) * f[g.index(j, lm)] -
                           2.0 * f[c]);
            out[c] = acc / g.unit_area[j];
        }
    }
    return out;
}

ComplexField LineBundleOps::dbar(const ComplexField& u) const {
    const SphereGrid& g = *g_;
    ComplexField out(g.cells());
    for (int j = 0; j < g.N; ++j)
        for (int l = 0; l < g.n_phi; ++l) {
            cd acc = 0;
            dbar_stencil(g, m_, j, l, [&](int src, cd coef) { acc += coef * u[src]; });
            out[g.index(j, l)] = acc;
        }
    return out;
}

ComplexField LineBundleOps::dbar_adjoint(const ComplexField& b) const {
    // sqrt(2) e^{-sigma} [-(1/sin) d_theta (sin e^sigma b) + (i/sin) D_phi (e^sigma b)],
    // colatitude part as a divergence so nothing crosses the poles
    const SphereGrid& g = *g_;
    ComplexField eb(g.cells()), out(g.cells());
    for (int c = 0; c < g.cells(); ++c) eb[c] = std::exp(sigma_[c]) * b[c];
    const double r2 = std::sqrt(2.0);
    for (int j = 0; j < g.N; ++j) {
        cd fwd = std::polar(1.0, -m_ * g.link_s[j] * g.dphi);
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            cd flux = 0;
            if (j + 1 < g.N) flux += g.sin_edge[j + 1] * 0.5 * (eb[c] + eb[g.index(j + 1, l)]);
            if (j > 0) flux -= g.sin_edge[j] * 0.5 * (eb[c] + eb[g.index(j - 1, l)]);
            cd div = flux * g.dphi / g.unit_area[j];
            cd dphi = (fwd * eb[g.index(j, g.wrap(l + 1))] - std::conj(fwd) * eb[g.index(j, g.wrap(l - 1))]) / (2 * g.dphi);
            out[c] = r2 * std::exp(-sigma_[c]) * (-div + cd(0, 1) / g.sin_theta[j] * dphi);
        }
    }
    return out;
}

KrylovResult conjugate_gradient(const LinearMap& A, const ComplexField& b, const std::vector<double>& w, double tol,
                                int max_iterations) {
    KrylovResult res;
    std::size_t n = b.size();
    res.x.assign(n, cd(0));
    ComplexField r = b, p = b;
    double rr = inner(r, r, w);
    res.residual = std::sqrt(rr);
    while (res.residual > tol && res.iterations < max_iterations) {
        ComplexField Ap = A(p);
        double pAp = inner(p, Ap, w);
        if (!(pAp > 0)) break;
        double a = rr / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += a * p[i];
            r[i] -= a * Ap[i];
        }
        double rr_new = inner(r, r, w);
        double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++res.iterations;
        res.residual = std::sqrt(rr);
    }
    // report the true residual, not the recursive one
    ComplexField Ax = A(res.x);
    for (std::size_t i = 0; i < n; ++i) Ax[i] -= b[i];
    res.residual = std::sqrt(inner(Ax, Ax, w));
    return res;
}

double smallest_eigenvalue(const LinearMap& A, const std::vector<double>& w, int steps, std::uint64_t seed) {
    std::size_t n = w.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    ComplexField x(n);
    for (auto& v : x) v = cd(nd(rng), nd(rng));
    double estimate = inner(x, A(x), w) / inner(x, x, w);
    for (int it = 0; it < steps; ++it) {
        double nx = std::sqrt(inner(x, x, w));
        for (auto& v : x) v /= nx;
        // a singular A leaves the CG iterate growing without converging
        auto y = conjugate_gradient(A, x, w, 1e-6, static_cast<int>(std::min<std::size_t>(n, 2000))).x;
        double yy = inner(y, y, w);
        if (!(yy > 0)) break;
        estimate = inner(y, x, w) / yy;
        x = std::move(y);
    }
    return estimate;
}

} // namespace vortex
