#ifndef WAMG_SPARSE_HPP
#define WAMG_SPARSE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wamg/vec.hpp"

namespace wamg {

using index_t = std::int64_t;

/// Square sparse matrix in CSR format with sorted, duplicate-free columns
/// per row. Every matrix handled by the library is structurally symmetric:
/// (i,j) present implies (j,i) present.
struct SparseMatrix {
    index_t n = 0;
    std::vector<index_t> row_ptr; // size n+1
    std::vector<index_t> col_idx; // sorted ascending within each row
    std::vector<double> values;

    index_t nnz() const { return static_cast<index_t>(col_idx.size()); }

    /// Entry lookup by binary search; returns 0 for positions outside the pattern.
    double at(index_t i, index_t j) const;

    /// Identity matrix of dimension n.
    static SparseMatrix identity(index_t n);

    /// Build from coordinate triplets. Entries are sorted; exact duplicates are
    /// an error. Missing transpose entries are inserted as explicit zeros so
    /// the pattern is structurally symmetric.
    static SparseMatrix from_triplets(index_t n, std::vector<index_t> rows,
                                      std::vector<index_t> cols, std::vector<double> vals,
                                      bool symmetrize_pattern = true);

    /// Throws if the structural-symmetry / sortedness invariants are violated.
    /// When check_values is set, also requires |a_ij - a_ji| <= 1e-14 * max|a|.
    void validate(bool check_values = true) const;

    /// max_i sum_j |a_ij|; cheap infinity-norm bound used as a spectral scale.
    double norm_inf() const;
};

/// Diagonal matrix with strictly positive entries.
struct DiagonalMatrix {
    Vec entries;

    index_t n() const { return static_cast<index_t>(entries.size()); }
    void validate() const;

    Vec apply(const Vec& x) const;
    Vec solve(const Vec& b) const;
};

/// y = A * x, with a fixed per-row left-to-right summation order so results do
/// not depend on the number of threads.
Vec spmv(const SparseMatrix& A, const Vec& x);

/// y = A * x for a rectangular CSR matrix with `cols` columns.
Vec spmv_rect(const SparseMatrix& A, index_t cols, const Vec& x);

/// y = A' * x for a rectangular CSR matrix with `cols` columns.
Vec spmv_transpose(const SparseMatrix& A, index_t cols, const Vec& x);

/// Transpose of a (possibly rectangular) CSR matrix with `cols` columns.
SparseMatrix transpose(const SparseMatrix& A, index_t cols);

/// C = A * B where A is n_a x k and B is k x n_b, CSR both; result pattern
/// sorted and deduplicated.
SparseMatrix multiply(const SparseMatrix& A, const SparseMatrix& B, index_t b_cols);

/// Galerkin triple product P' * A * P for a prolongator P with n rows and
/// n_c columns. The result is symmetrized to remove roundoff asymmetry.
SparseMatrix galerkin_product(const SparseMatrix& P, index_t n_c, const SparseMatrix& A);

/// l1-Jacobi smoother diagonal: m_i = a_ii + sum_{j != i} |a_ij|.
DiagonalMatrix l1_jacobi_diagonal(const SparseMatrix& A);

/// diag(A) as a DiagonalMatrix; throws on nonpositive diagonal entries.
DiagonalMatrix diagonal_of(const SparseMatrix& A);

/// A + beta * B for square matrices of equal dimension; patterns may differ.
SparseMatrix add(const SparseMatrix& A, const SparseMatrix& B, double beta = 1.0);

} // namespace wamg

#endif
