#ifndef WAMG_MATCHING_HPP
#define WAMG_MATCHING_HPP

#include <cstdint>
#include <vector>

#include "wamg/sparse.hpp"
#include "wamg/vec.hpp"

namespace wamg {

constexpr index_t UNMATCHED = -1;

/// Edge weights a^_ij = 1 - 2 a_ij w_i w_j / (a_ii w_i^2 + a_jj w_j^2) on the
/// off-diagonal pattern of A. Stored symmetrically (both arcs).
struct EdgeWeights {
    index_t n = 0;
    std::vector<index_t> row_ptr;
    std::vector<index_t> col_idx;
    Vec weight;
    index_t zero_w_count = 0; // nodes with w == 0 incident to edges (flagged, allowed)

    double at(index_t i, index_t j) const;
};

/// Result of one pairwise matching sweep.
struct Matching {
    std::vector<index_t> partner; // partner[i] = j or UNMATCHED
    double product_log = 0.0;     // sum of log(a^) over matched edges

    index_t n_matched_pairs() const;
    /// involution + edge-membership structural checks
    void validate(const EdgeWeights& ew) const;
};

/// Candidate edge in the log domain. Matchers only consider edges with
/// positive log-gain (a^ > 1); weights at or below the floor are never
/// candidates (their log is undefined or uninformative).
struct MatchEdge {
    index_t u, v;
    double logw;
};

struct MatchProblem {
    index_t n = 0;
    std::vector<MatchEdge> edges; // u < v, sorted by (u, v)
};

EdgeWeights compute_edge_weights(const SparseMatrix& A, const Vec& w);

MatchProblem build_match_problem(const EdgeWeights& ew, double weight_floor = 1e-12);

Matching match_suitor(const EdgeWeights& ew);
Matching match_preis(const EdgeWeights& ew);
Matching match_auction(const EdgeWeights& ew, double eps_auction = 1e-2);

/// Exact maximum product matching via the weighted blossom algorithm.
/// Throws if the candidate edge count exceeds `edge_budget`.
Matching match_exact(const EdgeWeights& ew, index_t edge_budget = 20000);

/// Exhaustive oracle for tiny graphs (<= 16 nodes).
Matching match_bruteforce(const EdgeWeights& ew);

enum class MatcherKind { Exact, Suitor, Preis, Auction, BruteForce };

Matching run_matcher(MatcherKind kind, const EdgeWeights& ew, double eps_auction = 1e-2,
                     index_t exact_edge_budget = 20000);

/// Maximum weight matching on a general graph (any cardinality), all weights
/// positive. Returns mate array plus the dual-certified objective.
struct BlossomResult {
    std::vector<index_t> mate;
    double objective = 0.0;
};

BlossomResult blossom_max_weight_matching(index_t n, const std::vector<MatchEdge>& edges);

} // namespace wamg

#endif
