#include "wamg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace wamg {

double SparseMatrix::at(index_t i, index_t j) const {
    const index_t lo = row_ptr[i], hi = row_ptr[i + 1];
    auto first = col_idx.begin() + lo;
    auto last = col_idx.begin() + hi;
    auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return values[static_cast<std::size_t>(it - col_idx.begin())];
    return 0.0;
}

SparseMatrix SparseMatrix::identity(index_t n) {
    SparseMatrix I;
    I.n = n;
    I.row_ptr.resize(n + 1);
    I.col_idx.resize(n);
    I.values.assign(n, 1.0);
    for (index_t i = 0; i <= n; ++i) I.row_ptr[i] = i;
    std::iota(I.col_idx.begin(), I.col_idx.end(), index_t{0});
    return I;
}

SparseMatrix SparseMatrix::from_triplets(index_t n, std::vector<index_t> rows,
                                         std::vector<index_t> cols, std::vector<double> vals,
                                         bool symmetrize_pattern) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw std::invalid_argument("from_triplets: triplet arrays differ in length");
    const std::size_t m = rows.size();
    for (std::size_t k = 0; k < m; ++k) {
        if (rows[k] < 0 || rows[k] >= n || cols[k] < 0 || cols[k] >= n)
            throw std::out_of_range("from_triplets: index out of range");
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(rows[a], cols[a]) < std::tie(rows[b], cols[b]);
    });

    SparseMatrix A;
    A.n = n;
    A.row_ptr.assign(n + 1, 0);
    A.col_idx.reserve(m);
    A.values.reserve(m);
    index_t prev_r = -1, prev_c = -1;
    for (std::size_t k : order) {
        if (rows[k] == prev_r && cols[k] == prev_c)
            throw std::invalid_argument("from_triplets: duplicate entry");
        prev_r = rows[k];
        prev_c = cols[k];
        A.col_idx.push_back(cols[k]);
        A.values.push_back(vals[k]);
        ++A.row_ptr[rows[k] + 1];
    }
    for (index_t i = 0; i < n; ++i) A.row_ptr[i + 1] += A.row_ptr[i];

    if (symmetrize_pattern) {
        // insert explicit zeros where (j,i) exists but (i,j) does not
        std::vector<index_t> er, ec;
        std::vector<double> ev;
        for (index_t i = 0; i < n; ++i) {
            for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
                const index_t j = A.col_idx[k];
                if (j == i) continue;
                const index_t lo = A.row_ptr[j], hi = A.row_ptr[j + 1];
                if (!std::binary_search(A.col_idx.begin() + lo, A.col_idx.begin() + hi, i)) {
                    er.push_back(j);
                    ec.push_back(i);
                    ev.push_back(0.0);
                }
            }
        }
        if (!er.empty()) {
            std::vector<index_t> nr(A.col_idx.size()), nc = A.col_idx;
            for (index_t i = 0; i < n; ++i)
                for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) nr[k] = i;
            std::vector<double> nv = A.values;
            nr.insert(nr.end(), er.begin(), er.end());
            nc.insert(nc.end(), ec.begin(), ec.end());
            nv.insert(nv.end(), ev.begin(), ev.end());
            return from_triplets(n, std::move(nr), std::move(nc), std::move(nv), false);
        }
    }
    return A;
}

void SparseMatrix::validate(bool check_values) const {
    if (static_cast<index_t>(row_ptr.size()) != n + 1)
        throw std::runtime_error("SparseMatrix: row_ptr size mismatch");
    if (row_ptr.front() != 0 || row_ptr.back() != nnz())
        throw std::runtime_error("SparseMatrix: row_ptr endpoints invalid");
    double amax = 0.0;
    for (double v : values) amax = std::max(amax, std::fabs(v));
    for (index_t i = 0; i < n; ++i) {
        if (row_ptr[i] > row_ptr[i + 1])
            throw std::runtime_error("SparseMatrix: row_ptr not monotone");
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            if (col_idx[k] < 0 || col_idx[k] >= n)
                throw std::runtime_error("SparseMatrix: column index out of range");
            if (k > row_ptr[i] && col_idx[k - 1] >= col_idx[k])
                throw std::runtime_error("SparseMatrix: columns not sorted/unique");
            const index_t j = col_idx[k];
            const index_t lo = row_ptr[j], hi = row_ptr[j + 1];
            if (!std::binary_search(col_idx.begin() + lo, col_idx.begin() + hi, i))
                throw std::runtime_error("SparseMatrix: pattern not structurally symmetric");
            if (check_values) {
                double aji = 0.0;
                auto it = std::lower_bound(col_idx.begin() + lo, col_idx.begin() + hi, i);
                aji = values[static_cast<std::size_t>(it - col_idx.begin())];
                if (std::fabs(values[k] - aji) > 1e-14 * std::max(1.0, amax))
                    throw std::runtime_error("SparseMatrix: values not symmetric");
            }
        }
    }
}

double SparseMatrix::norm_inf() const {
    double m = 0.0;
    for (index_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::fabs(values[k]);
        m = std::max(m, s);
    }
    return m;
}

void DiagonalMatrix::validate() const {
    for (double d : entries)
        if (!(d > 0.0)) throw std::runtime_error("DiagonalMatrix: nonpositive entry");
}

Vec DiagonalMatrix::apply(const Vec& x) const {
    require_same_size(x.size(), entries.size(), "DiagonalMatrix::apply");
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = entries[i] * x[i];
    return y;
}

Vec DiagonalMatrix::solve(const Vec& b) const {
    require_same_size(b.size(), entries.size(), "DiagonalMatrix::solve");
    Vec y(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) y[i] = b[i] / entries[i];
    return y;
}

Vec spmv(const SparseMatrix& A, const Vec& x) {
    require_same_size(x.size(), static_cast<std::size_t>(A.n), "spmv");
    return spmv_rect(A, A.n, x);
}

Vec spmv_rect(const SparseMatrix& A, index_t cols, const Vec& x) {
    require_same_size(x.size(), static_cast<std::size_t>(cols), "spmv_rect");
    Vec y(static_cast<std::size_t>(A.n));
    for (index_t i = 0; i < A.n; ++i) {
        double s = 0.0;
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            s += A.values[k] * x[A.col_idx[k]];
        y[i] = s;
    }
    return y;
}

Vec spmv_transpose(const SparseMatrix& A, index_t cols, const Vec& x) {
    require_same_size(x.size(), static_cast<std::size_t>(A.n), "spmv_transpose");
    Vec y(static_cast<std::size_t>(cols), 0.0);
    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            y[A.col_idx[k]] += A.values[k] * x[i];
    return y;
}

SparseMatrix transpose(const SparseMatrix& A, index_t cols) {
    SparseMatrix T;
    T.n = cols;
    T.row_ptr.assign(cols + 1, 0);
    T.col_idx.resize(A.col_idx.size());
    T.values.resize(A.values.size());
    for (index_t k = 0; k < A.nnz(); ++k) ++T.row_ptr[A.col_idx[k] + 1];
    for (index_t j = 0; j < cols; ++j) T.row_ptr[j + 1] += T.row_ptr[j];
    std::vector<index_t> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t pos = next[A.col_idx[k]]++;
            T.col_idx[pos] = i;
            T.values[pos] = A.values[k];
        }
    }
    return T;
}

SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B, index_t b_cols) {
    SparseMatrix C;
    C.n = A.n;
    C.row_ptr.assign(A.n + 1, 0);

    std::vector<double> acc(static_cast<std::size_t>(b_cols), 0.0);
    std::vector<index_t> marker(static_cast<std::size_t>(b_cols), -1);
    std::vector<index_t> touched;

    for (index_t i = 0; i < A.n; ++i) {
        touched.clear();
        for (index_t ka = A.row_ptr[i]; ka < A.row_ptr[i + 1]; ++ka) {
            const index_t j = A.col_idx[ka];
            const double a = A.values[ka];
            for (index_t kb = B.row_ptr[j]; kb < B.row_ptr[j + 1]; ++kb) {
                const index_t c = B.col_idx[kb];
                if (marker[c] != i) {
                    marker[c] = i;
                    acc[c] = 0.0;
                    touched.push_back(c);
                }
                acc[c] += a * B.values[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (index_t c : touched) {
            C.col_idx.push_back(c);
            C.values.push_back(acc[c]);
        }
        C.row_ptr[i + 1] = static_cast<index_t>(C.col_idx.size());
    }
    return C;
}

SparseMatrix galerkin_product(const SparseMatrix& P, index_t n_c, const SparseMatrix& A) {
    if (P.n != A.n) throw std::invalid_argument("galerkin_product: dimension mismatch");
    SparseMatrix Pt = transpose(P, n_c);
    SparseMatrix AP = multiply(A, P, n_c);
    SparseMatrix C = multiply(Pt, AP, n_c);
    // enforce exact symmetry of the result
    SparseMatrix Ct = transpose(C, n_c);
    for (index_t k = 0; k < C.nnz(); ++k) C.values[k] = 0.5 * (C.values[k] + Ct.values[k]);
    return C;
}

DiagonalMatrix l1_jacobi_diagonal(const SparseMatrix& A) {
    DiagonalMatrix M;
    M.entries.resize(static_cast<std::size_t>(A.n));
    for (index_t i = 0; i < A.n; ++i) {
        double diag = 0.0, off = 0.0;
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            if (A.col_idx[k] == i)
                diag = A.values[k];
            else
                off += std::fabs(A.values[k]);
        }
        if (!(diag > 0.0)) throw std::runtime_error("l1_jacobi_diagonal: nonpositive diagonal");
        M.entries[i] = diag + off;
    }
    return M;
}

DiagonalMatrix diagonal_of(const SparseMatrix& A) {
    DiagonalMatrix D;
    D.entries.resize(static_cast<std::size_t>(A.n));
    for (index_t i = 0; i < A.n; ++i) {
        const double d = A.at(i, i);
        if (!(d > 0.0)) throw std::runtime_error("diagonal_of: nonpositive diagonal");
        D.entries[i] = d;
    }
    return D;
}

SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double beta) {
    if (A.n != B.n) throw std::invalid_argument("add: dimension mismatch");
    SparseMatrix C;
    C.n = A.n;
    C.row_ptr.assign(A.n + 1, 0);
    for (index_t i = 0; i < A.n; ++i) {
        index_t ka = A.row_ptr[i], kb = B.row_ptr[i];
        while (ka < A.row_ptr[i + 1] || kb < B.row_ptr[i + 1]) {
            index_t ca = ka < A.row_ptr[i + 1] ? A.col_idx[ka] : A.n;
            index_t cb = kb < B.row_ptr[i + 1] ? B.col_idx[kb] : A.n;
            if (ca < cb) {
                C.col_idx.push_back(ca);
                C.values.push_back(A.values[ka++]);
            } else if (cb < ca) {
                C.col_idx.push_back(cb);
                C.values.push_back(beta * B.values[kb++]);
            } else {
                C.col_idx.push_back(ca);
                C.values.push_back(A.values[ka++] + beta * B.values[kb++]);
            }
        }
        C.row_ptr[i + 1] = static_cast<index_t>(C.col_idx.size());
    }
    return C;
}

} // namespace wamg
