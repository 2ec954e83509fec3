#ifndef WAMG_DENSE_HPP
#define WAMG_DENSE_HPP

#include <cstddef>
#include <vector>

#include "wamg/sparse.hpp"
#include "wamg/vec.hpp"

namespace wamg {

/// Row-major dense matrix. Workspace type for small eigenproblems and coarse
/// solves; sizes are expected to stay at or below the configured dense cap.
struct DenseMatrix {
    index_t rows = 0;
    index_t cols = 0;
    Vec data;

    DenseMatrix() = default;
    DenseMatrix(index_t r, index_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), 0.0) {}

    double& operator()(index_t i, index_t j) { return data[static_cast<std::size_t>(i * cols + j)]; }
    double operator()(index_t i, index_t j) const { return data[static_cast<std::size_t>(i * cols + j)]; }

    static DenseMatrix identity(index_t n);
    static DenseMatrix from_sparse(const SparseMatrix& A);

    Vec apply(const Vec& x) const;
    double sym_error() const; // max |a_ij - a_ji|
};

/// Cholesky factorization A = L L' of an SPD matrix. Throws on a non-positive
/// pivot.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const DenseMatrix& A);
    Vec solve(const Vec& b) const;
    index_t n() const { return n_; }

private:
    index_t n_;
    DenseMatrix L_;
};

Vec dense_cholesky_solve(const DenseMatrix& M, const Vec& b);

/// Eigen-decomposition of a symmetric matrix: eigenvalues ascending, columns
/// of `vectors` are the orthonormal eigenvectors.
struct SymmetricEig {
    Vec eigenvalues;
    DenseMatrix vectors;
};

SymmetricEig symmetric_eig(const DenseMatrix& A);

/// All eigenpairs of A x = sigma B x with A symmetric positive semidefinite
/// and B SPD, via Cholesky reduction. sigma ascending; eigenvectors are
/// B-orthonormal.
SymmetricEig generalized_symmetric_eig(const DenseMatrix& A, const DenseMatrix& B);

} // namespace wamg

#endif
