#include "vortex/vortex_model.hpp"

#include <cmath>

namespace vortex {

namespace {

using Mat = Eigen::MatrixXcd;

struct Reference {
    const SplitSystemConfig& cfg;
    const SphereGrid& g;
    int r;
    std::vector<Mat> h;

    Mat phase(int j, double fraction) const {
        Mat m(r, r);
        for (int p = 0; p < r; ++p)
            for (int q = 0; q < r; ++q)
                m(p, q) = std::polar(1.0, fraction * cfg.charge(p, q) * g.link_s[j] * g.dphi);
        return m;
    }

    Mat at(int j, int l) const { return h[g.index(j, g.wrap(l))]; }

    // value at row j (possibly -1 or N) seen from column l of the sphere
    Mat row_value(int j, int l) const {
        if (j < 0) return at(0, l + g.N);
        if (j >= g.N) {
            Mat v = at(g.N - 1, l + g.N);
            for (int p = 0; p < r; ++p)
                for (int q = 0; q < r; ++q)
                    if ((cfg.charge(p, q) % 2) != 0) v(p, q) = -v(p, q);
            return v;
        }
        return at(j, l);
    }

    Mat d_phi(int j, int l) const {
        Mat L = phase(j, 1.0);
        return (at(j, l + 1).cwiseProduct(L.conjugate()) - at(j, l - 1).cwiseProduct(L)) / (2 * g.dphi);
    }

    Mat d_theta(int j, int l) const { return (row_value(j + 1, l) - row_value(j - 1, l)) / (2 * g.dtheta); }

    // connection term across the colatitude edge above row e
    Mat theta_face(int e, int l) const {
        if (e == 0 || e == g.N) return Mat::Zero(r, r);
        Mat a = at(e - 1, l), b = at(e, l);
        Mat avg = 0.5 * (a + b);
        Mat num = cd(0, 1) * g.sin_edge[e] * (b - a) / g.dtheta + 0.5 * (d_phi(e - 1, l) + d_phi(e, l));
        return 0.5 * avg.inverse() * num;
    }

    // connection term across the longitude face between columns l and l+1
    Mat phi_face(int j, int l) const {
        Mat H = phase(j, 0.5);
        Mat left = at(j, l).cwiseProduct(H), right = at(j, l + 1).cwiseProduct(H.conjugate());
        Mat avg = 0.5 * (left + right);
        Mat dt = 0.5 * (d_theta(j, l).cwiseProduct(H) + d_theta(j, l + 1).cwiseProduct(H.conjugate()));
        Mat num = dt - (cd(0, 1) / g.sin_theta[j]) * (right - left) / g.dphi;
        return 0.5 * avg.inverse() * num;
    }

    Mat curvature(int j, int l) const {
        Mat H = phase(j, 0.5);
        Mat circ = g.dphi * (theta_face(j + 1, l) - theta_face(j, l)) +
                   g.dtheta * (phi_face(j, g.wrap(l - 1)).cwiseProduct(H) - phi_face(j, l).cwiseProduct(H.conjugate()));
        Mat K = cd(0, 2.0 / g.unit_area[j]) * circ;
        for (int p = 0; p < r; ++p) K(p, p) += double(cfg.degrees[p]);
        return K;
    }
};

Mat fn_of(const Mat& S, double c) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.adjoint()));
    Eigen::VectorXd d = (c * es.eigenvalues().array()).exp();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

MatrixField reference_deviation(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                                const SphereGrid& g) {
    cfg.validate();
    int r = cfg.rank(), k = cfg.k();
    double a = to_double(alpha.value());
    double tau = to_double(tau_of_alpha(cfg.type(), alpha));
    Reference ref{cfg, g, r, {}};
    for (int c = 0; c < g.cells(); ++c) ref.h.push_back(fn_of(Mat(S[c]), 1.0));

    MatrixField P = evaluate_sections(cfg, g);
    Mat G = Mat::Zero(k, k);
    for (int c = 0; c < g.cells(); ++c) G += g.cell_weight(c) * Mat(P[c]).adjoint() * ref.h[c] * Mat(P[c]);
    Mat Ginv = k > 0 ? Mat(G.inverse()) : Mat(0, 0);

    MatrixField out(g.cells(), r, r);
    for (int j = 0; j < g.N; ++j)
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            Mat hs = fn_of(Mat(S[c]), 0.5), hsi = fn_of(Mat(S[c]), -0.5);
            Mat F = hs * ref.curvature(j, l) * hsi;
            Mat d = 0.5 * (F + F.adjoint());
            if (k > 0) d += a * hs * Mat(P[c]) * Ginv * Mat(P[c]).adjoint() * hs;
            d -= tau * Mat::Identity(r, r);
            out[c] = 0.5 * (d + d.adjoint());
        }
    return out;
}

} // namespace vortex
