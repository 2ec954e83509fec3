#ifndef WAMG_SVG_HPP
#define WAMG_SVG_HPP

#include <string>

#include "wamg/coarsening.hpp"
#include "wamg/problems.hpp"

namespace wamg {

/// Colored n x n cell map of the aggregates of an FD grid problem.
void emit_aggregate_svg_grid(const AggregateSet& agg, index_t grid_n, const std::string& path);

/// Colored triangle map of the aggregates of a P1 mesh problem; `dof` maps
/// vertex -> interior index (-1 on the Dirichlet boundary).
void emit_aggregate_svg_mesh(const AggregateSet& agg, const TriMesh& mesh,
                             const std::vector<index_t>& dof, const std::string& path);

} // namespace wamg

#endif
