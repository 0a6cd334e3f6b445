#include "vortex/preconditioner.hpp"

#include "vortex/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace vortex {

namespace {

template <class F>
void for_range(int n, Exec exec, F&& f) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) f(i);
    } else {
        for (int i = 0; i < n; ++i) f(i);
    }
}

} // namespace

ComplexField shifted_laplacian_solve(const ComplexField& f, int charge, double shift, const SphereGrid& g,
                                     Exec exec) {
    if (!(shift > 0)) throw ValidationError("preconditioner shift must be positive");
    const int N = g.N, M = g.n_phi;
    std::vector<cd> modes(std::size_t(N) * M);
    for_range(N, exec, [&](int j) {
        Eigen::FFT<double> fft;
        std::vector<cd> in(f.begin() + std::size_t(j) * M, f.begin() + std::size_t(j + 1) * M), out;
        fft.fwd(out, in);
        std::copy(out.begin(), out.end(), modes.begin() + std::size_t(j) * M);
    });
    // Column l of mode n is e^{2 pi i n l / M}; the longitude stencil
    // multiplies it by 2cos((n - m s_j) dphi) - 2.
    for_range(M, exec, [&](int n) {
        std::vector<double> diag(N), off(N + 1, 0.0), cp(N);
        std::vector<cd> rhs(N);
        for (int j = 0; j < N; ++j) {
            double cn = g.dphi / g.dtheta;
            double cphi = g.dtheta / (g.dphi * g.sin_theta[j]);
            double arg = 0.5 * (n - charge * g.link_s[j]) * g.dphi;
            double up = j > 0 ? cn * g.sin_edge[j] : 0.0;
            double down = j + 1 < N ? cn * g.sin_edge[j + 1] : 0.0;
            diag[j] = shift * g.unit_area[j] + up + down + 4.0 * cphi * std::sin(arg) * std::sin(arg);
            off[j + 1] = down; // coupling between j and j+1
            rhs[j] = g.unit_area[j] * modes[std::size_t(j) * M + n];
        }
        // Thomas algorithm; the matrix is symmetric and diagonally dominant
        cp[0] = -off[1] / diag[0];
        rhs[0] /= diag[0];
        for (int j = 1; j < N; ++j) {
            double denom = diag[j] + off[j] * cp[j - 1];
            cp[j] = j + 1 < N ? -off[j + 1] / denom : 0.0;
            rhs[j] = (rhs[j] + off[j] * rhs[j - 1]) / denom;
        }
        for (int j = N - 2; j >= 0; --j) rhs[j] -= cp[j] * rhs[j + 1];
        for (int j = 0; j < N; ++j) modes[std::size_t(j) * M + n] = rhs[j];
    });
    ComplexField out(f.size());
    for_range(N, exec, [&](int j) {
        Eigen::FFT<double> fft;
        std::vector<cd> in(modes.begin() + std::size_t(j) * M, modes.begin() + std::size_t(j + 1) * M), res;
        fft.inv(res, in);
        std::copy(res.begin(), res.end(), out.begin() + std::size_t(j) * M);
    });
    return out;
}

MatrixField precondition(const MatrixField& X, const SplitSystemConfig& cfg, double shift, const SphereGrid& g,
                         Exec exec) {
    int r = cfg.rank();
    MatrixField out(X.cells(), r, r);
    for (int p = 0; p < r; ++p)
        for (int q = p; q < r; ++q) {
            ComplexField x = shifted_laplacian_solve(X.entry(p, q), cfg.charge(p, q), shift, g, exec);
            if (p == q)
                for (cd& v : x) v = v.real();
            out.set_entry(p, q, x);
            if (p != q) {
                for (cd& v : x) v = std::conj(v);
                out.set_entry(q, p, x);
            }
        }
    return out;
}

} // namespace vortex
