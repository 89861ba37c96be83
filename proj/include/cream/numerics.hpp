#pragma once

#include <complex>
#include <vector>

namespace cream {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Small sizes only (N <= a few hundred).
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    static CMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    cplx* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const cplx* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
std::vector<cplx> matvec(const CMatrix& a, const std::vector<cplx>& x);
double frobenius(const CMatrix& a);
double max_abs(const CMatrix& a);

/// Eigen pairs of a Hermitian matrix, eigenvalues sorted descending,
/// eigenvector columns orthonormal and ordered to match.
struct HermEig {
    std::vector<double> eigenvalues;
    CMatrix eigenvectors;
};

/// Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
/// The input is symmetrized as (A + A^H)/2; gross asymmetry (beyond 1e-8
/// relative Frobenius) is rejected. Cap: 100 sweeps.
HermEig eig_hermitian(const CMatrix& a);

/// n x n symmetric banded Toeplitz: entry (i,j) = coeffs[|i-j|] for
/// |i-j| < coeffs.size(), zero beyond the band.
CMatrix banded_toeplitz(const std::vector<cplx>& coeffs, int n);

/// y = T x for the banded symmetric Toeplitz T defined by coeffs, without
/// materializing T.
std::vector<cplx> banded_toeplitz_apply(const std::vector<cplx>& coeffs, const std::vector<cplx>& x);

/// Solves A x = b by Gaussian elimination with partial pivoting. The ridge
/// (A + ridge I) is applied only when the plain solve fails conditioning or
/// its residual exceeds 1e-8 |b|; ridge <= 0 selects the default
/// 1e-10 trace(A)/n. Throws if the system is singular even after the ridge.
std::vector<cplx> solve_regularized(const CMatrix& a, const std::vector<cplx>& b, double ridge = 0.0);

} // namespace cream
