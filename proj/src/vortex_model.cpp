#include "vortex/vortex_model.hpp"

#include <cmath>

namespace vortex {

namespace {

template <class F>
void for_rows(int n, Exec exec, F&& f) {
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j) f(j);
    } else {
        for (int j = 0; j < n; ++j) f(j);
    }
}

const cd I(0, 1);

} // namespace

VortexModel::VortexModel(SplitSystemConfig cfg, const SphereGrid& grid, const AlphaParam& alpha)
    : cfg_(std::move(cfg)), grid_(&grid) {
    cfg_.validate();
    r_ = cfg_.rank();
    k_ = cfg_.k();
    alpha_ = to_double(alpha.value());
    tau_exact_ = tau_of_alpha(cfg_.type(), alpha);
    tau_ = to_double(tau_exact_);
    P_ = evaluate_sections(cfg_, grid);

    pole_sign_ = CMat(r_, r_);
    for (int p = 0; p < r_; ++p)
        for (int q = 0; q < r_; ++q) pole_sign_(p, q) = (cfg_.charge(p, q) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < grid.N; ++j) {
        CMat L(r_, r_), H(r_, r_);
        for (int p = 0; p < r_; ++p)
            for (int q = 0; q < r_; ++q) {
                double angle = cfg_.charge(p, q) * grid.link_s[j] * grid.dphi;
                L(p, q) = std::polar(1.0, angle);
                H(p, q) = std::polar(1.0, 0.5 * angle);
            }
        link_.push_back(L);
        half_link_.push_back(H);
    }
}

void VortexModel::centered(const MatrixField& X, MatrixField& dphi, MatrixField& dtheta, Exec exec) const {
    const auto& g = *grid_;
    dphi = MatrixField(g.cells(), r_, r_);
    dtheta = MatrixField(g.cells(), r_, r_);
    for_rows(g.N, exec, [&](int j) {
        const CMat& L = link_[j];
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            CMat right = CMat(X[g.index(j, g.wrap(l + 1))]).cwiseProduct(L.conjugate());
            CMat left = CMat(X[g.index(j, g.wrap(l - 1))]).cwiseProduct(L);
            dphi[c] = (right - left) / (2 * g.dphi);
            CMat up = j > 0 ? CMat(X[g.index(j - 1, l)]) : CMat(X[g.index(0, g.wrap(l + g.N))]);
            CMat down = j + 1 < g.N ? CMat(X[g.index(j + 1, l)])
                                    : CMat(CMat(X[g.index(g.N - 1, g.wrap(l + g.N))]).cwiseProduct(pole_sign_));
            dtheta[c] = (down - up) / (2 * g.dtheta);
        }
    });
}

void VortexModel::face_terms(const MatrixField& X, const MatrixField& dphi, const MatrixField& dtheta,
                             MatrixField& t_avg, MatrixField& t_flux, MatrixField& p_avg, MatrixField& p_flux,
                             Exec exec) const {
    const auto& g = *grid_;
    int n_edges = (g.N + 1) * g.n_phi;
    t_avg = MatrixField(n_edges, r_, r_);
    t_flux = MatrixField(n_edges, r_, r_);
    p_avg = MatrixField(g.cells(), r_, r_);
    p_flux = MatrixField(g.cells(), r_, r_);
    // colatitude edges e = 1..N-1 between rows e-1 and e
    for_rows(g.N - 1, exec, [&](int i) {
        int e = i + 1;
        for (int l = 0; l < g.n_phi; ++l) {
            int a = g.index(e - 1, l), b = g.index(e, l), f = e * g.n_phi + l;
            t_avg[f] = 0.5 * (X[a] + X[b]);
            t_flux[f] = I * g.sin_edge[e] * (X[b] - X[a]) / g.dtheta + 0.5 * (dphi[a] + dphi[b]);
        }
    });
    // longitude faces between columns l and l+1, in the frame of the face
    for_rows(g.N, exec, [&](int j) {
        const CMat& H = half_link_[j];
        CMat Hc = H.conjugate();
        for (int l = 0; l < g.n_phi; ++l) {
            int a = g.index(j, l), b = g.index(j, g.wrap(l + 1));
            CMat left = CMat(X[a]).cwiseProduct(H);
            CMat right = CMat(X[b]).cwiseProduct(Hc);
            p_avg[a] = 0.5 * (left + right);
            CMat dt = 0.5 * (CMat(dtheta[a]).cwiseProduct(H) + CMat(dtheta[b]).cwiseProduct(Hc));
            p_flux[a] = dt - (I / g.sin_theta[j]) * (right - left) / g.dphi;
        }
    });
}

void VortexModel::assemble(const MatrixField& t_theta, const MatrixField& p_theta, MatrixField& K, bool with_degree,
                           Exec exec) const {
    const auto& g = *grid_;
    K = MatrixField(g.cells(), r_, r_);
    for_rows(g.N, exec, [&](int j) {
        const CMat& H = half_link_[j];
        CMat Hc = H.conjugate();
        cd scale = 2.0 * I / g.unit_area[j];
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            CMat circ = CMat::Zero(r_, r_);
            if (j + 1 < g.N) circ += g.dphi * CMat(t_theta[(j + 1) * g.n_phi + l]);
            if (j > 0) circ -= g.dphi * CMat(t_theta[j * g.n_phi + l]);
            circ += g.dtheta * CMat(p_theta[g.index(j, g.wrap(l - 1))]).cwiseProduct(H);
            circ -= g.dtheta * CMat(p_theta[c]).cwiseProduct(Hc);
            CMat k = scale * circ;
            if (with_degree)
                for (int p = 0; p < r_; ++p) k(p, p) += double(cfg_.degrees[p]);
            K[c] = k;
        }
    });
}

Evaluation VortexModel::evaluate(const MatrixField& S, Exec exec) const {
    const auto& g = *grid_;
    if (S.cells() != g.cells() || S.rows() != r_ || S.cols() != r_)
        throw ValidationError("metric state does not match the grid and rank");
    Evaluation ev;
    ev.h = MatrixField(g.cells(), r_, r_);
    ev.hs = MatrixField(g.cells(), r_, r_);
    ev.hsi = MatrixField(g.cells(), r_, r_);
    ev.eig.resize(g.cells());
    bool bad = false;
    for_rows(g.N, exec, [&](int j) {
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            CMat s = S[c];
            double asym = (s - s.adjoint()).norm();
            if (!(asym <= 1e-10 * (1.0 + s.norm()))) bad = true;
            ev.eig[c] = herm_eig(herm(s));
            ev.h[c] = apply_fn(ev.eig[c], [](double x) { return std::exp(x); });
            ev.hs[c] = apply_fn(ev.eig[c], [](double x) { return std::exp(0.5 * x); });
            ev.hsi[c] = apply_fn(ev.eig[c], [](double x) { return std::exp(-0.5 * x); });
        }
    });
    if (bad) throw ValidationError("metric state is not Hermitian (or not finite)");

    MatrixField dphi, dtheta, t_avg, p_avg;
    centered(ev.h, dphi, dtheta, exec);
    face_terms(ev.h, dphi, dtheta, t_avg, ev.theta_face_flux, p_avg, ev.phi_face_flux, exec);
    ev.theta_face_inv = MatrixField(t_avg.cells(), r_, r_);
    ev.phi_face_inv = MatrixField(p_avg.cells(), r_, r_);
    for_rows(g.N - 1, exec, [&](int i) {
        for (int l = 0; l < g.n_phi; ++l) {
            int f = (i + 1) * g.n_phi + l;
            CMat inv = CMat(t_avg[f]).inverse();
            ev.theta_face_inv[f] = inv;
            ev.theta_face_flux[f] = 0.5 * inv * CMat(ev.theta_face_flux[f]);
        }
    });
    for_rows(g.N, exec, [&](int j) {
        for (int l = 0; l < g.n_phi; ++l) {
            int f = g.index(j, l);
            CMat inv = CMat(p_avg[f]).inverse();
            ev.phi_face_inv[f] = inv;
            ev.phi_face_flux[f] = 0.5 * inv * CMat(ev.phi_face_flux[f]);
        }
    });
    assemble(ev.theta_face_flux, ev.phi_face_flux, ev.K, true, exec);

    // Gram matrix, reduced per row then in a fixed order
    std::vector<Eigen::MatrixXcd> rowG(g.N, Eigen::MatrixXcd::Zero(k_, k_));
    if (k_ > 0) {
        for_rows(g.N, exec, [&](int j) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(k_, k_);
            for (int l = 0; l < g.n_phi; ++l) {
                int c = g.index(j, l);
                acc.noalias() += P_[c].adjoint() * ev.h[c] * P_[c];
            }
            rowG[j] = g.weight[j] * acc;
        });
    }
    ev.G = Eigen::MatrixXcd::Zero(k_, k_);
    for (int j = 0; j < g.N; ++j) ev.G += rowG[j];
    ev.G = 0.5 * (ev.G + ev.G.adjoint()).eval();
    if (k_ > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ev.G);
        double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
        if (!(lo > 1e-12 * hi)) throw DependentSectionsError("sections are linearly dependent (Gram condition too large)");
        ev.Ginv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    } else {
        ev.Ginv = Eigen::MatrixXcd::Zero(0, 0);
    }

    ev.deviation = MatrixField(g.cells(), r_, r_);
    std::vector<double> row_l2(g.N), row_nu2(g.N), row_sup(g.N);
    for_rows(g.N, exec, [&](int j) {
        double l2 = 0, nu2 = 0, sup = 0;
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            CMat hs = ev.hs[c], hsi = ev.hsi[c];
            CMat d = herm(hs * CMat(ev.K[c]) * hsi);
            if (k_ > 0) {
                SecMat p = P_[c];
                CMat q = p * ev.Ginv * p.adjoint();
                d += alpha_ * hs * q * hs;
            }
            d.diagonal().array() -= tau_;
            d = herm(d);
            ev.deviation[c] = d;
            l2 += d.squaredNorm();
            double nu = trace_norm(d);
            nu2 += nu * nu;
            sup = std::max(sup, max_abs_eigenvalue(d));
        }
        row_l2[j] = g.weight[j] * l2;
        row_nu2[j] = g.weight[j] * nu2;
        row_sup[j] = sup;
    });
    double nu2 = 0;
    for (int j = 0; j < g.N; ++j) {
        ev.l2 += row_l2[j];
        nu2 += row_nu2[j];
        ev.sup_residual = std::max(ev.sup_residual, row_sup[j]);
    }
    ev.J = std::sqrt(nu2);
    if (!std::isfinite(ev.l2) || !std::isfinite(ev.J)) throw NumericalError("non-finite value in the deviation field");
    return ev;
}

double VortexModel::l2_derivative(const Evaluation& ev, const MatrixField& dS, Exec exec) const {
    const auto& g = *grid_;
    MatrixField dh(g.cells(), r_, r_);
    for_rows(g.N, exec, [&](int j) {
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            dh[c] = dexp(ev.eig[c], herm(CMat(dS[c])), 1.0);
        }
    });
    return l2_derivative_h(ev, dh, exec);
}

double VortexModel::l2_derivative_h(const Evaluation& ev, const MatrixField& dh, Exec exec) const {
    const auto& g = *grid_;
    // square-root tangents from h^{1/2} dhs + dhs h^{1/2} = dh
    MatrixField dhs(g.cells(), r_, r_), dhsi(g.cells(), r_, r_);
    for_rows(g.N, exec, [&](int j) {
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            const HermEig& e = ev.eig[c];
            CMat t = e.U.adjoint() * CMat(dh[c]) * e.U;
            for (int p = 0; p < r_; ++p)
                for (int q = 0; q < r_; ++q) t(p, q) /= std::exp(0.5 * e.lambda(p)) + std::exp(0.5 * e.lambda(q));
            CMat d = e.U * t * e.U.adjoint();
            dhs[c] = d;
            dhsi[c] = -CMat(ev.hsi[c]) * d * CMat(ev.hsi[c]);
        }
    });

    MatrixField dphi, dtheta, t_avg, t_flux, p_avg, p_flux;
    centered(dh, dphi, dtheta, exec);
    face_terms(dh, dphi, dtheta, t_avg, t_flux, p_avg, p_flux, exec);
    for_rows(g.N - 1, exec, [&](int i) {
        for (int l = 0; l < g.n_phi; ++l) {
            int f = (i + 1) * g.n_phi + l;
            CMat inv = ev.theta_face_inv[f];
            t_flux[f] = inv * (0.5 * CMat(t_flux[f]) - CMat(t_avg[f]) * CMat(ev.theta_face_flux[f]));
        }
    });
    for_rows(g.N, exec, [&](int j) {
        for (int l = 0; l < g.n_phi; ++l) {
            int f = g.index(j, l);
            CMat inv = ev.phi_face_inv[f];
            p_flux[f] = inv * (0.5 * CMat(p_flux[f]) - CMat(p_avg[f]) * CMat(ev.phi_face_flux[f]));
        }
    });
    MatrixField dK;
    assemble(t_flux, p_flux, dK, false, exec);

    Eigen::MatrixXcd dGinv = Eigen::MatrixXcd::Zero(k_, k_);
    if (k_ > 0) {
        std::vector<Eigen::MatrixXcd> rowG(g.N);
        for_rows(g.N, exec, [&](int j) {
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(k_, k_);
            for (int l = 0; l < g.n_phi; ++l) {
                int c = g.index(j, l);
                acc.noalias() += P_[c].adjoint() * dh[c] * P_[c];
            }
            rowG[j] = g.weight[j] * acc;
        });
        Eigen::MatrixXcd dG = Eigen::MatrixXcd::Zero(k_, k_);
        for (int j = 0; j < g.N; ++j) dG += rowG[j];
        dGinv = -ev.Ginv * dG * ev.Ginv;
    }

    std::vector<double> rows(g.N);
    for_rows(g.N, exec, [&](int j) {
        double acc = 0;
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            CMat hs = ev.hs[c], hsi = ev.hsi[c], K = ev.K[c];
            CMat d = herm(CMat(dhs[c]) * K * hsi + hs * CMat(dK[c]) * hsi + hs * K * CMat(dhsi[c]));
            if (k_ > 0) {
                SecMat p = P_[c];
                CMat q = p * ev.Ginv * p.adjoint();
                CMat dq = p * dGinv * p.adjoint();
                CMat ds = dhs[c];
                d += alpha_ * herm(ds * q * hs + hs * dq * hs + hs * q * ds);
            }
            acc += (CMat(ev.deviation[c]) * d).trace().real();
        }
        rows[j] = 2.0 * g.weight[j] * acc;
    });
    double total = 0;
    for (double v : rows) total += v;
    return total;
}

MatrixField VortexModel::curvature_field(const Evaluation& ev) const {
    MatrixField out(grid_->cells(), r_, r_);
    for (int c = 0; c < grid_->cells(); ++c) out[c] = herm(CMat(ev.hs[c]) * CMat(ev.K[c]) * CMat(ev.hsi[c]));
    return out;
}

Eigen::MatrixXcd VortexModel::frame(const Evaluation& ev) const { return lowdin_frame(ev.G, alpha_); }

double VortexModel::gram_residual(const Evaluation& ev) const {
    if (k_ == 0) return 0.0;
    Eigen::MatrixXcd B = frame(ev);
    return (B.adjoint() * ev.G * B - alpha_ * Eigen::MatrixXcd::Identity(k_, k_)).norm();
}

double VortexModel::yang_mills_higgs(const Evaluation& ev) const {
    const auto& g = *grid_;
    double F2 = l2_norm_squared(curvature_field(ev), g);
    if (k_ == 0) return F2 + tau_ * tau_ * r_;
    Eigen::MatrixXcd B = frame(ev);
    MatrixField phi(g.cells(), r_, k_);
    for (int c = 0; c < g.cells(); ++c) phi[c] = P_[c] * B;

    MatrixField hphi, htheta;
    centered(ev.h, hphi, htheta, Exec::serial);
    double D2 = 0, V2 = 0;
    for (int j = 0; j < g.N; ++j) {
        double rowD = 0, rowV = 0;
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            auto at = [&](int jj, int ll, int flip) {
                SecMat v = phi[g.index(jj, g.wrap(ll))];
                if (flip)
                    for (int p = 0; p < r_; ++p)
                        if (cfg_.degrees[p] % 2 != 0) v.row(p) *= -1.0;
                return v;
            };
            SecMat right = phi[g.index(j, g.wrap(l + 1))], left = phi[g.index(j, g.wrap(l - 1))];
            for (int p = 0; p < r_; ++p) {
                cd ph = std::polar(1.0, cfg_.degrees[p] * g.link_s[j] * g.dphi);
                right.row(p) *= std::conj(ph);
                left.row(p) *= ph;
            }
            SecMat dph = (right - left) / (2 * g.dphi);
            SecMat up = j > 0 ? at(j - 1, l, 0) : at(0, l + g.N, 0);
            SecMat down = j + 1 < g.N ? at(j + 1, l, 0) : at(g.N - 1, l + g.N, 1);
            SecMat dth = (down - up) / (2 * g.dtheta);
            CMat hinv = CMat(ev.hsi[c]) * CMat(ev.hsi[c]);
            CMat conn = hinv * (CMat(htheta[c]) - (I / g.sin_theta[j]) * CMat(hphi[c]));
            SecMat v = dth - (I / g.sin_theta[j]) * dph + conn * SecMat(phi[c]);
            rowD += (v.adjoint() * CMat(ev.h[c]) * v).trace().real();
            CMat hs = ev.hs[c];
            CMat pot = hs * SecMat(phi[c]) * SecMat(phi[c]).adjoint() * hs;
            pot.diagonal().array() -= tau_;
            rowV += pot.squaredNorm();
        }
        D2 += g.weight[j] * rowD;
        V2 += g.weight[j] * rowV;
    }
    // real 1-form norm: twice the Kaehler pairing of the (1,0) part
    return F2 + 2.0 * D2 + V2;
}

MatrixField curvature(const SplitSystemConfig& cfg, const MatrixField& S, const SphereGrid& g) {
    SplitSystemConfig bare = cfg;
    bare.sections.clear();
    VortexModel m(bare, g, AlphaParam(1));
    return m.curvature_field(m.evaluate(S));
}

Eigen::MatrixXcd gram(const SplitSystemConfig& cfg, const MatrixField& S, const Eigen::MatrixXcd& B, const SphereGrid& g) {
    VortexModel m(cfg, g, AlphaParam(1));
    auto ev = m.evaluate(S);
    return B.adjoint() * ev.G * B;
}

Eigen::MatrixXcd lowdin_frame(const Eigen::MatrixXcd& G, double alpha) {
    if (G.rows() == 0) return G;
    Eigen::MatrixXcd Gh = 0.5 * (G + G.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gh);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-14 * std::max(hi, 1e-300))) throw DependentSectionsError("Gram matrix is not positive definite");
    Eigen::VectorXd s = es.eigenvalues().cwiseSqrt().cwiseInverse() * std::sqrt(alpha);
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixField moment_map_deviation(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                                 const SphereGrid& g) {
    return VortexModel(cfg, g, alpha).evaluate(S).deviation;
}

double trace_norm_l2(const MatrixField& field, const SphereGrid& g) {
    double acc = 0;
    for (int j = 0; j < g.N; ++j) {
        double row = 0;
        for (int l = 0; l < g.n_phi; ++l) {
            double nu = trace_norm(CMat(field[g.index(j, l)]));
            row += nu * nu;
        }
        acc += g.weight[j] * row;
    }
    return std::sqrt(acc);
}

double l2_norm_squared(const MatrixField& field, const SphereGrid& g) { return inner(field, field, g); }

double trace_norm_functional(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                             const SphereGrid& g) {
    return VortexModel(cfg, g, alpha).evaluate(S).J;
}

double l2_objective(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha, const SphereGrid& g) {
    return VortexModel(cfg, g, alpha).evaluate(S).l2;
}

double yang_mills_higgs(const SplitSystemConfig& cfg, const MatrixField& S, const AlphaParam& alpha,
                        const SphereGrid& g) {
    VortexModel m(cfg, g, alpha);
    return m.yang_mills_higgs(m.evaluate(S));
}

} // namespace vortex
