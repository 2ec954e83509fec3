#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wamg/dense.hpp"
#include "wamg/eigsolve.hpp"
#include "wamg/problems.hpp"
#include "wamg/rng.hpp"

using namespace wamg;

TEST_CASE("cg solves identity in one step") {
    SparseMatrix I = SparseMatrix::identity(5);
    Vec b{1, 2, 3, 4, 5};
    CgResult r = cg_solve(as_op(I), b, 1e-12, 100);
    CHECK(r.converged);
    CHECK(r.iterations <= 2);
    for (int i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(b[i]));
}

TEST_CASE("cg solves FD Laplacian to tight residual") {
    SparseMatrix A = gen_fd_diffusion(12, CoefficientField::constant());
    Vec b = random_vector(144, 3);
    DiagonalMatrix D = diagonal_of(A);
    CgResult r = cg_solve(as_op(A), b, 1e-12, 5000, [&D](const Vec& v) { return D.solve(v); });
    CHECK(r.converged);
    Vec res = spmv(A, r.x);
    double rn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) rn += (res[i] - b[i]) * (res[i] - b[i]);
    CHECK(std::sqrt(rn) <= 1e-10 * norm2(b));
}

TEST_CASE("cg reports nonpositive curvature") {
    LinOp op = [](const Vec& x) {
        Vec y = x;
        y[0] = -x[0];
        return y;
    };
    CHECK_THROWS(cg_solve(op, {1.0, 1.0}, 1e-10, 10));
}

TEST_CASE("largest generalized eig: S = 0 and S = A") {
    SparseMatrix A = gen_fd_diffusion(6, CoefficientField::constant());
    LinOp zero = [](const Vec& x) { return Vec(x.size(), 0.0); };
    EigPair p0 = largest_generalized_eig_sparse(zero, A, 1e-8);
    CHECK(p0.value == doctest::Approx(0.0));

    LinOp same = as_op(A);
    EigPair p1 = largest_generalized_eig_sparse(same, A, 1e-8);
    CHECK(p1.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("largest generalized eig matches dense oracle") {
    SparseMatrix A = gen_fd_diffusion(6, CoefficientField::random(11));
    SparseMatrix B = gen_fd_diffusion(6, CoefficientField::constant());

    LinOp S = as_op(B);
    EigPair p = largest_generalized_eig_sparse(S, A, 1e-9);

    SymmetricEig dense = generalized_symmetric_eig(DenseMatrix::from_sparse(B),
                                                   DenseMatrix::from_sparse(A));
    const double ref = dense.eigenvalues[A.n - 1];
    CHECK(p.value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("symmetric lanczos extremes on a diagonal operator") {
    const index_t n = 50;
    Vec d(n);
    for (index_t i = 0; i < n; ++i) d[i] = 1.0 + static_cast<double>(i);
    LinOp op = [&d](const Vec& x) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = d[i] * x[i];
        return y;
    };
    SpectrumBounds b = symmetric_lanczos_extremes(op, n, 60, 1e-10);
    CHECK(b.lo == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(b.hi == doctest::Approx(50.0).epsilon(1e-6));
}

TEST_CASE("smallest generalized eig finds the Laplacian ground mode") {
    SparseMatrix A = gen_fd_diffusion(10, CoefficientField::constant());
    DiagonalMatrix M;
    M.entries.assign(100, 1.0);
    EigPair p = smallest_generalized_eig(A, M, 1e-10);
    // lambda_min of I (x) T + T (x) I at n = 10 is 2 * (2 - 2 cos(pi/11))
    const double ref = 2.0 * (2.0 - 2.0 * std::cos(M_PI / 11.0));
    CHECK(p.value == doctest::Approx(ref).epsilon(1e-7));
    // the ground mode has uniform sign
    double smin = 1e30, smax = -1e30;
    for (double x : p.vector) {
        smin = std::min(smin, x);
        smax = std::max(smax, x);
    }
    CHECK(smin * smax > 0.0);
}
