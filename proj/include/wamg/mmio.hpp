#ifndef WAMG_MMIO_HPP
#define WAMG_MMIO_HPP

#include <string>

#include "wamg/sparse.hpp"

namespace wamg {

/// Reads a Matrix Market coordinate file (real, symmetric or general,
/// 1-based). Symmetric storage is expanded so the returned pattern is
/// structurally symmetric. Throws on malformed headers, pattern/complex
/// fields, out-of-range indices and non-square sizes.
SparseMatrix read_matrix_market(const std::string& path);

/// Writes `A` in coordinate format with 17 significant digits. Symmetric
/// matrices (within the library tolerance) are stored as the lower triangle
/// with a `symmetric` header, everything else as `general`.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

/// Plain-text vector: one value per line.
Vec read_vector_file(const std::string& path);
void write_vector_file(const Vec& v, const std::string& path);

} // namespace wamg

#endif
