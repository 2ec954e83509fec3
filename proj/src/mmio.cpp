#include "wamg/mmio.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wamg {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_market: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_matrix_market: empty file");

    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw std::runtime_error("read_matrix_market: malformed header");
    if (lower(format) != "coordinate")
        throw std::runtime_error("read_matrix_market: only coordinate format supported");
    field = lower(field);
    symmetry = lower(symmetry);
    if (field == "pattern") throw std::runtime_error("read_matrix_market: real entries required");
    if (field != "real" && field != "integer")
        throw std::runtime_error("read_matrix_market: unsupported field '" + field + "'");
    if (symmetry != "symmetric" && symmetry != "general")
        throw std::runtime_error("read_matrix_market: unsupported symmetry '" + symmetry + "'");

    // skip comments and blank lines
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sz(line);
    index_t nrows = -1, ncols = -1, nz = -1;
    if (!(sz >> nrows >> ncols >> nz))
        throw std::runtime_error("read_matrix_market: malformed size line");
    if (nrows != ncols) throw std::runtime_error("read_matrix_market: matrix not square");

    std::vector<index_t> ri, ci;
    std::vector<double> vals;
    ri.reserve(nz);
    ci.reserve(nz);
    vals.reserve(nz);
    for (index_t k = 0; k < nz; ++k) {
        index_t i, j;
        double v;
        if (!(in >> i >> j >> v))
            throw std::runtime_error("read_matrix_market: truncated entry list");
        if (i < 1 || i > nrows || j < 1 || j > ncols)
            throw std::runtime_error("read_matrix_market: index out of range");
        ri.push_back(i - 1);
        ci.push_back(j - 1);
        vals.push_back(v);
        if (symmetry == "symmetric" && i != j) {
            ri.push_back(j - 1);
            ci.push_back(i - 1);
            vals.push_back(v);
        }
    }
    SparseMatrix A = SparseMatrix::from_triplets(nrows, std::move(ri), std::move(ci),
                                                 std::move(vals), true);
    A.validate(false);
    return A;
}

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
    double amax = 0.0, asym = 0.0;
    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            amax = std::max(amax, std::fabs(A.values[k]));
            asym = std::max(asym, std::fabs(A.values[k] - A.at(A.col_idx[k], i)));
        }
    const bool symmetric = asym <= 1e-14 * std::max(1.0, amax);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general")
        << "\n";

    index_t count = 0;
    for (index_t i = 0; i < A.n; ++i)
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            if (!symmetric || A.col_idx[k] <= i) ++count;

    out << A.n << " " << A.n << " " << count << "\n";
    char buf[64];
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (symmetric && j > i) continue;
            std::snprintf(buf, sizeof(buf), "%.17g", A.values[k]);
            out << (i + 1) << " " << (j + 1) << " " << buf << "\n";
        }
    }
    if (!out) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

Vec read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_vector_file: cannot open " + path);
    Vec v;
    double x;
    while (in >> x) v.push_back(x);
    if (v.empty()) throw std::runtime_error("read_vector_file: no values in " + path);
    return v;
}

void write_vector_file(const Vec& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vector_file: cannot open " + path);
    char buf[64];
    for (double x : v) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << buf << "\n";
    }
}

} // namespace wamg
