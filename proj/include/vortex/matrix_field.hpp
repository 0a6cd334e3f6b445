#pragma once

// Small dense matrices per grid cell, stored contiguously.

#include "vortex/sphere_grid.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vortex {

constexpr int kMaxRank = 4;
constexpr int kMaxSections = 8;

// Fixed-capacity types keep per-cell temporaries off the heap.
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRank, kMaxRank>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxRank, 1>;
using SecMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxRank, kMaxSections>;

class MatrixField {
public:
    MatrixField() = default;
    MatrixField(int cells, int rows, int cols) : cells_(cells), rows_(rows), cols_(cols), data_(std::size_t(cells) * rows * cols) {}

    int cells() const { return cells_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Eigen::Map<Eigen::MatrixXcd> operator[](int c) { return {data_.data() + std::size_t(c) * rows_ * cols_, rows_, cols_}; }
    Eigen::Map<const Eigen::MatrixXcd> operator[](int c) const {
        return {data_.data() + std::size_t(c) * rows_ * cols_, rows_, cols_};
    }

    std::vector<cd>& data() { return data_; }
    const std::vector<cd>& data() const { return data_; }

    // entry (p, q) of every cell as a scalar field
    ComplexField entry(int p, int q) const;
    void set_entry(int p, int q, const ComplexField& f);

private:
    int cells_ = 0, rows_ = 0, cols_ = 0;
    std::vector<cd> data_;
};

inline CMat herm(const CMat& a) { return 0.5 * (a + a.adjoint()); }

// Eigen-decomposition of a Hermitian matrix; the 1x1 case skips the solver.
struct HermEig {
    CMat U;
    RVec lambda;
};
HermEig herm_eig(const CMat& a);

// U f(Lambda) U^*
template <class F>
CMat apply_fn(const HermEig& e, F&& f) {
    int n = static_cast<int>(e.lambda.size());
    CMat d = CMat::Zero(n, n);
    for (int i = 0; i < n; ++i) d(i, i) = f(e.lambda(i));
    return e.U * d * e.U.adjoint();
}

// Directional derivative of the matrix exponential exp(c S) at S along the
// Hermitian direction dS, given the decomposition of S (Daleckii-Krein).
CMat dexp(const HermEig& e, const CMat& dS, double c);

// Directional derivative of log at the positive matrix h = U diag(mu) U^*
// along dh, where e holds the decomposition of log h.
CMat dlog(const HermEig& e, const CMat& dh);

// Sum of absolute eigenvalues of a Hermitian matrix.
double trace_norm(const CMat& a);
double max_abs_eigenvalue(const CMat& a);

// Normalized L2 pairing sum_c w_c Re tr(a_c^* b_c).
double inner(const MatrixField& a, const MatrixField& b, const SphereGrid& g);

} // namespace vortex
