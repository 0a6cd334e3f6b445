#include "vortex/matrix_field.hpp"

#include <cmath>

namespace vortex {

ComplexField MatrixField::entry(int p, int q) const {
    ComplexField out(cells_);
    for (int c = 0; c < cells_; ++c) out[c] = (*this)[c](p, q);
    return out;
}

void MatrixField::set_entry(int p, int q, const ComplexField& f) {
    for (int c = 0; c < cells_; ++c) (*this)[c](p, q) = f[c];
}

HermEig herm_eig(const CMat& a) {
    HermEig e;
    if (a.rows() == 1) {
        e.U = CMat::Identity(1, 1);
        e.lambda = RVec::Constant(1, a(0, 0).real());
        return e;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    e.U = es.eigenvectors();
    e.lambda = es.eigenvalues();
    return e;
}

namespace {

// sinh(x)/x without cancellation near 0
double sinhc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

// (log a - log b)/(a - b) for a, b > 0, written in terms of la = log a
double log_divided(double la, double lb) {
    // (la - lb) / (e^la - e^lb) = 1 / (e^{(la+lb)/2} * 2 sinh((la-lb)/2)/(la-lb))
    return 1.0 / (std::exp(0.5 * (la + lb)) * sinhc(0.5 * (la - lb)));
}

} // namespace

CMat dexp(const HermEig& e, const CMat& dS, double c) {
    int n = static_cast<int>(e.lambda.size());
    CMat t = e.U.adjoint() * dS * e.U;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double li = e.lambda(i), lj = e.lambda(j);
            // (e^{c li} - e^{c lj})/(li - lj)
            double g = c * std::exp(0.5 * c * (li + lj)) * sinhc(0.5 * c * (li - lj));
            t(i, j) *= g;
        }
    return e.U * t * e.U.adjoint();
}

CMat dlog(const HermEig& e, const CMat& dh) {
    int n = static_cast<int>(e.lambda.size());
    CMat t = e.U.adjoint() * dh * e.U;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) t(i, j) *= log_divided(e.lambda(i), e.lambda(j));
    return e.U * t * e.U.adjoint();
}

double trace_norm(const CMat& a) {
    if (a.rows() == 1) return std::abs(a(0, 0).real());
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double max_abs_eigenvalue(const CMat& a) {
    if (a.rows() == 1) return std::abs(a(0, 0).real());
    Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double inner(const MatrixField& a, const MatrixField& b, const SphereGrid& g) {
    double total = 0;
    for (int j = 0; j < g.N; ++j) {
        double row = 0;
        for (int l = 0; l < g.n_phi; ++l) {
            int c = g.index(j, l);
            row += (a[c].adjoint() * b[c]).trace().real();
        }
        total += g.weight[j] * row;
    }
    return total;
}

} // namespace vortex
