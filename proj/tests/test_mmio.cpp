#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wamg/mmio.hpp"
#include "wamg/problems.hpp"
#include "wamg/rng.hpp"

using namespace wamg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/wamg_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("1x1 round trip") {
    TempFile f("m1.mtx");
    std::vector<index_t> r{0}, c{0};
    Vec v{2.0};
    SparseMatrix A = SparseMatrix::from_triplets(1, r, c, v);
    write_matrix_market(A, f.path);
    SparseMatrix B = read_matrix_market(f.path);
    REQUIRE(B.n == 1);
    CHECK(B.at(0, 0) == 2.0);
}

TEST_CASE("symmetric-lower file expands to the full pattern") {
    TempFile f("tri.mtx");
    std::ofstream out(f.path);
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << "% hand-written tridiagonal\n";
    out << "3 3 5\n";
    out << "1 1 2.0\n2 1 -1.0\n2 2 2.0\n3 2 -1.0\n3 3 2.0\n";
    out.close();
    SparseMatrix A = read_matrix_market(f.path);
    CHECK(A.nnz() == 7);
    CHECK(A.at(0, 1) == doctest::Approx(-1.0));
    CHECK(A.at(1, 0) == doctest::Approx(-1.0));
    CHECK(A.at(1, 2) == doctest::Approx(-1.0));
}

TEST_CASE("pattern files are rejected") {
    TempFile f("pat.mtx");
    std::ofstream out(f.path);
    out << "%%MatrixMarket matrix coordinate pattern symmetric\n1 1 1\n1 1\n";
    out.close();
    CHECK_THROWS_WITH_AS(read_matrix_market(f.path),
                         "read_matrix_market: real entries required", std::runtime_error);
}

TEST_CASE("malformed header and bad indices are rejected") {
    TempFile f("bad.mtx");
    {
        std::ofstream out(f.path);
        out << "%%NotMatrixMarket foo\n1 1 1\n1 1 1.0\n";
    }
    CHECK_THROWS(read_matrix_market(f.path));
    {
        std::ofstream out(f.path);
        out << "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n";
    }
    CHECK_THROWS(read_matrix_market(f.path));
    {
        std::ofstream out(f.path);
        out << "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1.0\n";
    }
    CHECK_THROWS(read_matrix_market(f.path));
}

TEST_CASE("round trip preserves values to full precision") {
    TempFile f("rt.mtx");
    SparseMatrix A = gen_fd_diffusion(6, CoefficientField::random(5));
    write_matrix_market(A, f.path);
    SparseMatrix B = read_matrix_market(f.path);
    REQUIRE(B.nnz() == A.nnz());
    for (index_t k = 0; k < A.nnz(); ++k) {
        const double a = A.values[k], b = B.values[k];
        CHECK(std::fabs(a - b) <= 1e-15 * std::max(1.0, std::fabs(a)));
    }
}

TEST_CASE("vector file round trip") {
    TempFile f("vec.txt");
    Vec v = random_vector(20, 9);
    write_vector_file(v, f.path);
    Vec u = read_vector_file(f.path);
    REQUIRE(u.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(u[i] == doctest::Approx(v[i]).epsilon(1e-15));
}
