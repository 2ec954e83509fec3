#include "wamg/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wamg {

DenseMatrix DenseMatrix::identity(index_t n) {
    DenseMatrix I(n, n);
    for (index_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& A) {
    DenseMatrix M(A.n, A.n);
    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            M(i, A.col_idx[k]) = A.values[k];
    return M;
}

Vec DenseMatrix::apply(const Vec& x) const {
    require_same_size(x.size(), static_cast<std::size_t>(cols), "DenseMatrix::apply");
    Vec y(static_cast<std::size_t>(rows), 0.0);
    for (index_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (index_t j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double DenseMatrix::sym_error() const {
    double m = 0.0;
    for (index_t i = 0; i < rows; ++i)
        for (index_t j = i + 1; j < cols; ++j)
            m = std::max(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
}

CholeskyFactor::CholeskyFactor(const DenseMatrix& A) : n_(A.rows), L_(A.rows, A.cols) {
    if (A.rows != A.cols) throw std::invalid_argument("CholeskyFactor: matrix not square");
    for (index_t j = 0; j < n_; ++j) {
        double d = A(j, j);
        for (index_t k = 0; k < j; ++k) d -= L_(j, k) * L_(j, k);
        if (!(d > 0.0)) throw std::runtime_error("CholeskyFactor: matrix not SPD (pivot <= 0)");
        const double ljj = std::sqrt(d);
        L_(j, j) = ljj;
        for (index_t i = j + 1; i < n_; ++i) {
            double s = A(i, j);
            for (index_t k = 0; k < j; ++k) s -= L_(i, k) * L_(j, k);
            L_(i, j) = s / ljj;
        }
    }
}

Vec CholeskyFactor::solve(const Vec& b) const {
    require_same_size(b.size(), static_cast<std::size_t>(n_), "CholeskyFactor::solve");
    Vec y(b);
    for (index_t i = 0; i < n_; ++i) {
        double s = y[i];
        for (index_t k = 0; k < i; ++k) s -= L_(i, k) * y[k];
        y[i] = s / L_(i, i);
    }
    for (index_t i = n_ - 1; i >= 0; --i) {
        double s = y[i];
        for (index_t k = i + 1; k < n_; ++k) s -= L_(k, i) * y[k];
        y[i] = s / L_(i, i);
    }
    return y;
}

Vec dense_cholesky_solve(const DenseMatrix& M, const Vec& b) {
    return CholeskyFactor(M).solve(b);
}

namespace {

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

// Householder reduction to symmetric tridiagonal form, accumulating the
// orthogonal transformation in V. EISPACK tred2, 0-based.
void tred2(DenseMatrix& V, Vec& d, Vec& e) {
    const index_t n = V.rows;
    for (index_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

    for (index_t i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (index_t k = 0; k < i; ++k) scale += std::fabs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (index_t j = 0; j < i; ++j) {
                d[j] = V(i - 1, j);
                V(i, j) = 0.0;
                V(j, i) = 0.0;
            }
        } else {
            for (index_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (index_t j = 0; j < i; ++j) e[j] = 0.0;

            for (index_t j = 0; j < i; ++j) {
                f = d[j];
                V(j, i) = f;
                g = e[j] + V(j, j) * f;
                for (index_t k = j + 1; k <= i - 1; ++k) {
                    g += V(k, j) * d[k];
                    e[k] += V(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (index_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (index_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (index_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (index_t k = j; k <= i - 1; ++k) V(k, j) -= (f * e[k] + g * d[k]);
                d[j] = V(i - 1, j);
                V(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (index_t i = 0; i < n - 1; ++i) {
        V(n - 1, i) = V(i, i);
        V(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (index_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
            for (index_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (index_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
                for (index_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
            }
        }
        for (index_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
    }
    for (index_t j = 0; j < n; ++j) {
        d[j] = V(n - 1, j);
        V(n - 1, j) = 0.0;
    }
    V(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL for a symmetric tridiagonal matrix, eigenvalues sorted
// ascending. EISPACK tql2, 0-based.
void tql2(DenseMatrix& V, Vec& d, Vec& e) {
    const index_t n = V.rows;
    for (index_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (index_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        index_t m = l;
        while (m < n) {
            if (std::fabs(e[m]) <= eps * tst1) break;
            ++m;
        }

        if (m > l) {
            int iter = 0;
            do {
                if (++iter > 50) throw std::runtime_error("tql2: no convergence in 50 iterations");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = hypot2(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (index_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0, s2 = 0.0;
                for (index_t i = m - 1; i >= l; --i) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot2(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (index_t k = 0; k < n; ++k) {
                        h = V(k, i + 1);
                        V(k, i + 1) = s * V(k, i) + c * h;
                        V(k, i) = c * V(k, i) - s * h;
                    }
                    if (i == l) break;
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // sort eigenvalues ascending, carrying eigenvectors along
    for (index_t i = 0; i < n - 1; ++i) {
        index_t k = i;
        double p = d[i];
        for (index_t j = i + 1; j < n; ++j) {
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        }
        if (k != i) {
            d[k] = d[i];
            d[i] = p;
            for (index_t j = 0; j < n; ++j) std::swap(V(j, i), V(j, k));
        }
    }
}

} // namespace

SymmetricEig symmetric_eig(const DenseMatrix& A) {
    if (A.rows != A.cols) throw std::invalid_argument("symmetric_eig: matrix not square");
    const index_t n = A.rows;
    SymmetricEig out;
    out.eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) {
        out.vectors = DenseMatrix(0, 0);
        return out;
    }
    DenseMatrix V = A;
    // symmetrize the input so roundoff asymmetry does not perturb the result
    for (index_t i = 0; i < n; ++i)
        for (index_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (V(i, j) + V(j, i));
            V(i, j) = v;
            V(j, i) = v;
        }
    Vec& d = out.eigenvalues;
    Vec e(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        d[0] = V(0, 0);
        out.vectors = DenseMatrix::identity(1);
        return out;
    }
    tred2(V, d, e);
    tql2(V, d, e);
    out.vectors = std::move(V);
    return out;
}

SymmetricEig generalized_symmetric_eig(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows != A.cols || B.rows != B.cols || A.rows != B.rows)
        throw std::invalid_argument("generalized_symmetric_eig: dimension mismatch");
    const index_t n = A.rows;
    CholeskyFactor chol(B); // throws if B is not SPD

    // Re-run the factorization locally to access L for the congruence
    // transform C = inv(L) A inv(L)'.
    DenseMatrix L(n, n);
    {
        for (index_t j = 0; j < n; ++j) {
            double d = B(j, j);
            for (index_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
            const double ljj = std::sqrt(d);
            L(j, j) = ljj;
            for (index_t i = j + 1; i < n; ++i) {
                double s = B(i, j);
                for (index_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
                L(i, j) = s / ljj;
            }
        }
    }

    // W = inv(L) * A  (forward substitution per column)
    DenseMatrix W = A;
    for (index_t j = 0; j < n; ++j) {
        for (index_t i = 0; i < n; ++i) {
            double s = W(i, j);
            for (index_t k = 0; k < i; ++k) s -= L(i, k) * W(k, j);
            W(i, j) = s / L(i, i);
        }
    }
    // C = W * inv(L)'  i.e. solve C L' = W  (forward substitution per row)
    DenseMatrix C(n, n);
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = 0; j < n; ++j) {
            double s = W(i, j);
            for (index_t k = 0; k < j; ++k) s -= C(i, k) * L(j, k);
            C(i, j) = s / L(j, j);
        }
    }

    SymmetricEig eig = symmetric_eig(C);

    // back-transform eigenvectors: x = inv(L)' u
    DenseMatrix X(n, n);
    for (index_t col = 0; col < n; ++col) {
        for (index_t i = n - 1; i >= 0; --i) {
            double s = eig.vectors(i, col);
            for (index_t k = i + 1; k < n; ++k) s -= L(k, i) * X(k, col);
            X(i, col) = s / L(i, i);
        }
    }
    eig.vectors = std::move(X);
    return eig;
}

} // namespace wamg
