#include "cream/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cream {

CMatrix CMatrix::identity(int n) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()));
    CMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        const cplx* ar = a.row(i);
        cplx* cr = c.row(i);
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = ar[k];
            if (aik == cplx{}) continue;
            const cplx* br = b.row(k);
            for (int j = 0; j < b.cols(); ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

CMatrix adjoint(const CMatrix& a) {
    CMatrix t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

std::vector<cplx> matvec(const CMatrix& a, const std::vector<cplx>& x) {
    if (a.cols() != static_cast<int>(x.size()))
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<cplx> y(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        const cplx* ar = a.row(i);
        cplx acc{};
        for (int j = 0; j < a.cols(); ++j) acc += ar[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double frobenius(const CMatrix& a) {
    double s = 0.0;
    for (const cplx& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const CMatrix& a) {
    double s = 0.0;
    for (const cplx& v : a.data()) s = std::max(s, std::abs(v));
    return s;
}

namespace {

// One complex Jacobi rotation zeroing a(p,q). Updates a (Hermitian) and
// accumulates the rotation into v.
void jacobi_rotate(CMatrix& a, CMatrix& v, int p, int q) {
    const cplx apq = a(p, q);
    const double r = std::abs(apq);
    if (r == 0.0) return;
    const cplx phase = apq / r;
    const double alpha = a(p, p).real();
    const double beta = a(q, q).real();
    const double tau = (alpha - beta) / (2.0 * r);
    const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                  : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const cplx s = (t * c) * std::conj(phase); // rotation: col p' = c p + s q, col q' = -conj(s) p + c q
    const cplx sc = std::conj(s);

    const int n = a.rows();
    // Column update A <- A U.
    for (int i = 0; i < n; ++i) {
        const cplx aip = a(i, p);
        const cplx aiq = a(i, q);
        a(i, p) = c * aip + s * aiq;
        a(i, q) = -sc * aip + c * aiq;
    }
    // Row update A <- U^H A.
    for (int j = 0; j < n; ++j) {
        const cplx apj = a(p, j);
        const cplx aqj = a(q, j);
        a(p, j) = c * apj + sc * aqj;
        a(q, j) = -s * apj + c * aqj;
    }
    // The rotation is exact on the 2x2 block; pin the results.
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = cplx{a(p, p).real(), 0.0};
    a(q, q) = cplx{a(q, q).real(), 0.0};

    for (int i = 0; i < n; ++i) {
        const cplx vip = v(i, p);
        const cplx viq = v(i, q);
        v(i, p) = c * vip + s * viq;
        v(i, q) = -sc * vip + c * viq;
    }
}

double offdiag_frobenius(const CMatrix& a) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

} // namespace

HermEig eig_hermitian(const CMatrix& input) {
    const int n = input.rows();
    if (n != input.cols())
        throw std::invalid_argument("eig_hermitian: matrix is " + std::to_string(input.rows()) +
                                    "x" + std::to_string(input.cols()) + ", expected square");

    CMatrix a(n, n);
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx h = 0.5 * (input(i, j) + std::conj(input(j, i)));
            asym += std::norm(input(i, j) - h);
            a(i, j) = h;
        }
    const double input_fro = frobenius(input);
    if (input_fro > 0.0 && std::sqrt(asym) > 1e-8 * input_fro)
        throw std::invalid_argument("eig_hermitian: input is not Hermitian to 1e-8 relative tolerance");
    const double fro = frobenius(a);

    CMatrix v = CMatrix::identity(n);
    const double tol = 1e-12 * std::max(fro, 1e-300);
    constexpr int kMaxSweeps = 100;

    bool converged = (n <= 1) || offdiag_frobenius(a) <= tol;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
        converged = offdiag_frobenius(a) <= tol;
    }
    if (!converged)
        throw std::runtime_error("eig_hermitian: no convergence after 100 sweeps on " +
                                 std::to_string(n) + "x" + std::to_string(n) + " matrix");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a(i, i).real() > a(j, j).real(); });

    HermEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = a(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

CMatrix banded_toeplitz(const std::vector<cplx>& coeffs, int n) {
    const int band = static_cast<int>(coeffs.size());
    if (band < 1) throw std::invalid_argument("banded_toeplitz: empty coefficient vector");
    if (band > n)
        throw std::invalid_argument("banded_toeplitz: band " + std::to_string(band) +
                                    " exceeds size " + std::to_string(n));
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - band + 1); j < std::min(n, i + band); ++j)
            m(i, j) = coeffs[static_cast<size_t>(std::abs(i - j))];
    return m;
}

std::vector<cplx> banded_toeplitz_apply(const std::vector<cplx>& coeffs, const std::vector<cplx>& x) {
    const int n = static_cast<int>(x.size());
    const int band = static_cast<int>(coeffs.size());
    if (band < 1 || band > n) throw std::invalid_argument("banded_toeplitz_apply: bad band size");
    std::vector<cplx> y(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = coeffs[0] * x[i];
        const int lmax = std::min(band - 1, std::max(i, n - 1 - i));
        for (int l = 1; l <= lmax; ++l) {
            cplx s{};
            if (i - l >= 0) s += x[i - l];
            if (i + l < n) s += x[i + l];
            acc += coeffs[l] * s;
        }
        y[i] = acc;
    }
    return y;
}

namespace {

// Gaussian elimination with partial pivoting; returns false on a pivot
// collapse instead of dividing through garbage.
bool gepp(CMatrix a, std::vector<cplx> b, std::vector<cplx>& x) {
    const int n = a.rows();
    const double scale = std::max(max_abs(a), 1e-300);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best <= 1e-13 * scale) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        const cplx inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx f = a(i, k) * inv;
            if (f == cplx{}) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, cplx{});
    for (int i = n - 1; i >= 0; --i) {
        cplx acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return true;
}

double residual_norm(const CMatrix& a, const std::vector<cplx>& x, const std::vector<cplx>& b) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        cplx acc = -b[i];
        const cplx* ar = a.row(i);
        for (int j = 0; j < a.cols(); ++j) acc += ar[j] * x[j];
        s += std::norm(acc);
    }
    return std::sqrt(s);
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

} // namespace

std::vector<cplx> solve_regularized(const CMatrix& a, const std::vector<cplx>& b, double ridge) {
    const int n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("solve_regularized: matrix not square");
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("solve_regularized: rhs length mismatch");

    std::vector<cplx> x;
    if (gepp(a, b, x) && residual_norm(a, x, b) <= 1e-8 * std::max(vec_norm(b), 1e-300))
        return x;

    cplx tr{};
    for (int i = 0; i < n; ++i) tr += a(i, i);
    const double delta = ridge > 0.0 ? ridge : 1e-10 * std::abs(tr) / n;
    if (delta <= 0.0)
        throw std::runtime_error("solve_regularized: singular " + std::to_string(n) + "x" +
                                 std::to_string(n) + " system and no usable ridge");

    CMatrix ar = a;
    for (int i = 0; i < n; ++i) ar(i, i) += delta;
    if (!gepp(ar, b, x))
        throw std::runtime_error("solve_regularized: singular " + std::to_string(n) + "x" +
                                 std::to_string(n) + " system even after ridge");
    return x;
}

} // namespace cream
