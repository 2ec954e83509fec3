#include "wamg/matching.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace wamg {

double EdgeWeights::at(index_t i, index_t j) const {
    const index_t lo = row_ptr[i], hi = row_ptr[i + 1];
    auto first = col_idx.begin() + lo;
    auto last = col_idx.begin() + hi;
    auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return weight[static_cast<std::size_t>(it - col_idx.begin())];
    throw std::out_of_range("EdgeWeights::at: edge not in pattern");
}

index_t Matching::n_matched_pairs() const {
    index_t c = 0;
    for (std::size_t i = 0; i < partner.size(); ++i)
        if (partner[i] != UNMATCHED && partner[i] > static_cast<index_t>(i)) ++c;
    return c;
}

void Matching::validate(const EdgeWeights& ew) const {
    if (partner.size() != static_cast<std::size_t>(ew.n))
        throw std::runtime_error("Matching: partner array size mismatch");
    for (index_t i = 0; i < ew.n; ++i) {
        const index_t j = partner[i];
        if (j == UNMATCHED) continue;
        if (j < 0 || j >= ew.n || j == i)
            throw std::runtime_error("Matching: partner index invalid");
        if (partner[j] != i) throw std::runtime_error("Matching: involution violated");
        ew.at(i, j); // throws if (i,j) is not an edge
    }
}

EdgeWeights compute_edge_weights(const SparseMatrix& A, const Vec& w) {
    require_same_size(w.size(), static_cast<std::size_t>(A.n), "compute_edge_weights");
    Vec diag(static_cast<std::size_t>(A.n));
    for (index_t i = 0; i < A.n; ++i) {
        diag[i] = A.at(i, i);
        if (!(diag[i] > 0.0))
            throw std::runtime_error("compute_edge_weights: nonpositive diagonal");
    }

    EdgeWeights ew;
    ew.n = A.n;
    ew.row_ptr.assign(A.n + 1, 0);
    std::vector<std::uint8_t> zero_flagged(static_cast<std::size_t>(A.n), 0);
    for (index_t i = 0; i < A.n; ++i) {
        for (index_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const index_t j = A.col_idx[k];
            if (j == i) continue;
            const double denom = diag[i] * w[i] * w[i] + diag[j] * w[j] * w[j];
            if (!(denom > 0.0))
                throw std::runtime_error(
                    "compute_edge_weights: zero weight on both ends of an edge");
            if (w[i] == 0.0) zero_flagged[i] = 1;
            if (w[j] == 0.0) zero_flagged[j] = 1;
            ew.col_idx.push_back(j);
            ew.weight.push_back(1.0 - 2.0 * A.values[k] * w[i] * w[j] / denom);
        }
        ew.row_ptr[i + 1] = static_cast<index_t>(ew.col_idx.size());
    }
    for (auto f : zero_flagged) ew.zero_w_count += f;
    return ew;
}

MatchProblem build_match_problem(const EdgeWeights& ew, double weight_floor) {
    MatchProblem mp;
    mp.n = ew.n;
    for (index_t i = 0; i < ew.n; ++i) {
        for (index_t k = ew.row_ptr[i]; k < ew.row_ptr[i + 1]; ++k) {
            const index_t j = ew.col_idx[k];
            if (j <= i) continue;
            const double a = ew.weight[k];
            // candidates need a^ above the floor and positive log gain
            if (a <= weight_floor || a <= 1.0) continue;
            mp.edges.push_back({i, j, std::log(a)});
        }
    }
    return mp;
}

namespace {

Matching finish(std::vector<index_t> partner, const MatchProblem& mp) {
    Matching m;
    m.partner = std::move(partner);
    m.product_log = 0.0;
    // recompute the objective from the edge list for consistency
    for (const auto& e : mp.edges)
        if (m.partner[e.u] == e.v) m.product_log += e.logw;
    return m;
}

// adjacency in candidate-edge space
struct CandAdj {
    std::vector<index_t> ptr;
    std::vector<index_t> nbr;
    Vec w;

    explicit CandAdj(const MatchProblem& mp) {
        ptr.assign(mp.n + 1, 0);
        for (const auto& e : mp.edges) {
            ++ptr[e.u + 1];
            ++ptr[e.v + 1];
        }
        for (index_t i = 0; i < mp.n; ++i) ptr[i + 1] += ptr[i];
        nbr.resize(2 * mp.edges.size());
        w.resize(2 * mp.edges.size());
        std::vector<index_t> next(ptr.begin(), ptr.end() - 1);
        for (const auto& e : mp.edges) {
            nbr[next[e.u]] = e.v;
            w[next[e.u]++] = e.logw;
            nbr[next[e.v]] = e.u;
            w[next[e.v]++] = e.logw;
        }
    }
};

} // namespace

Matching match_suitor(const EdgeWeights& ew) {
    const MatchProblem mp = build_match_problem(ew);
    const CandAdj adj(mp);
    const index_t n = mp.n;
    const index_t NONE = n;

    Vec ws(static_cast<std::size_t>(n), 0.0);
    std::vector<index_t> suitor(static_cast<std::size_t>(n), NONE);

    // an offer (weight, proposer) beats the standing one if heavier, with
    // ties broken toward the lower proposer index
    auto beats = [&](double wgt, index_t u, index_t v) {
        return wgt > ws[v] || (wgt == ws[v] && u < suitor[v]);
    };

    for (index_t start = 0; start < n; ++start) {
        index_t current = start;
        while (current != NONE) {
            index_t best_v = NONE;
            double best_w = 0.0;
            for (index_t k = adj.ptr[current]; k < adj.ptr[current + 1]; ++k) {
                const index_t v = adj.nbr[k];
                const double wgt = adj.w[k];
                if (!beats(wgt, current, v)) continue;
                if (best_v == NONE || wgt > best_w || (wgt == best_w && v < best_v)) {
                    best_v = v;
                    best_w = wgt;
                }
            }
            if (best_v == NONE) break;
            const index_t displaced = suitor[best_v];
            suitor[best_v] = current;
            ws[best_v] = best_w;
            current = displaced;
        }
    }

    std::vector<index_t> partner(static_cast<std::size_t>(n), UNMATCHED);
    for (index_t v = 0; v < n; ++v)
        if (suitor[v] != NONE && suitor[suitor[v]] == v) partner[v] = suitor[v];
    return finish(std::move(partner), mp);
}

Matching match_preis(const EdgeWeights& ew) {
    MatchProblem mp = build_match_problem(ew);
    // locally-dominant selection realized by a global weight-descending scan
    std::vector<std::size_t> order(mp.edges.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = mp.edges[a];
        const auto& eb = mp.edges[b];
        if (ea.logw != eb.logw) return ea.logw > eb.logw;
        if (ea.u != eb.u) return ea.u < eb.u;
        return ea.v < eb.v;
    });
    std::vector<index_t> partner(static_cast<std::size_t>(mp.n), UNMATCHED);
    for (std::size_t k : order) {
        const auto& e = mp.edges[k];
        if (partner[e.u] == UNMATCHED && partner[e.v] == UNMATCHED) {
            partner[e.u] = e.v;
            partner[e.v] = e.u;
        }
    }
    return finish(std::move(partner), mp);
}

Matching match_auction(const EdgeWeights& ew, double eps_auction) {
    if (!(eps_auction > 0.0)) throw std::invalid_argument("match_auction: eps_auction <= 0");
    const MatchProblem mp = build_match_problem(ew);
    const CandAdj adj(mp);
    const index_t n = mp.n;

    double wmax = 0.0;
    for (const auto& e : mp.edges) wmax = std::max(wmax, e.logw);

    // Forward assignment auction on the bipartite double cover: every vertex
    // bids as a person for its neighbours as objects. Prices persist across
    // the epsilon-scaling phases; assignments are rebuilt per phase.
    Vec price(static_cast<std::size_t>(n), 0.0);
    std::vector<index_t> object_of(static_cast<std::size_t>(n), UNMATCHED); // person -> object
    std::vector<index_t> holder(static_cast<std::size_t>(n), UNMATCHED);    // object -> person
    const index_t iter_budget = 50 * std::max<index_t>(n, 1);

    double eps = std::max(eps_auction, wmax / 2.0);
    while (true) {
        std::fill(object_of.begin(), object_of.end(), UNMATCHED);
        std::fill(holder.begin(), holder.end(), UNMATCHED);
        std::deque<index_t> bidders;
        for (index_t v = 0; v < n; ++v) bidders.push_back(v);
        index_t iters = 0;
        while (!bidders.empty()) {
            if (++iters > iter_budget)
                throw std::runtime_error("match_auction: iteration budget exceeded");
            const index_t u = bidders.front();
            bidders.pop_front();
            if (object_of[u] != UNMATCHED) continue;

            index_t best_v = UNMATCHED;
            double best = -std::numeric_limits<double>::infinity();
            double second = best;
            for (index_t k = adj.ptr[u]; k < adj.ptr[u + 1]; ++k) {
                const index_t v = adj.nbr[k];
                const double value = adj.w[k] - price[v];
                if (value > best || (value == best && (best_v == UNMATCHED || v < best_v))) {
                    second = best;
                    best = value;
                    best_v = v;
                } else if (value > second) {
                    second = value;
                }
            }
            if (best_v == UNMATCHED || best <= 0.0) continue; // no profitable bid

            price[best_v] += best - std::max(second, 0.0) + eps;
            const index_t displaced = holder[best_v];
            if (displaced != UNMATCHED) {
                object_of[displaced] = UNMATCHED;
                bidders.push_back(displaced);
            }
            holder[best_v] = u;
            object_of[u] = best_v;
        }
        if (eps <= eps_auction) break;
        eps = std::max(eps_auction, eps / 4.0);
    }

    // mutual agreements of the double-cover assignment form the matching
    std::vector<index_t> partner(static_cast<std::size_t>(n), UNMATCHED);
    for (index_t u = 0; u < n; ++u) {
        const index_t v = object_of[u];
        if (v != UNMATCHED && object_of[v] == u) {
            partner[u] = v;
            partner[v] = u;
        }
    }

    // maximality pass: match any remaining free-free candidate edges,
    // heaviest first
    std::vector<std::size_t> order(mp.edges.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = mp.edges[a];
        const auto& eb = mp.edges[b];
        if (ea.logw != eb.logw) return ea.logw > eb.logw;
        if (ea.u != eb.u) return ea.u < eb.u;
        return ea.v < eb.v;
    });
    for (std::size_t k : order) {
        const auto& e = mp.edges[k];
        if (partner[e.u] == UNMATCHED && partner[e.v] == UNMATCHED) {
            partner[e.u] = e.v;
            partner[e.v] = e.u;
        }
    }
    return finish(std::move(partner), mp);
}

Matching match_exact(const EdgeWeights& ew, index_t edge_budget) {
    const MatchProblem mp = build_match_problem(ew);
    if (static_cast<index_t>(mp.edges.size()) > edge_budget)
        throw std::runtime_error(
            "match_exact: candidate edge count " + std::to_string(mp.edges.size()) +
            " exceeds budget " + std::to_string(edge_budget) +
            "; use an approximate matcher (suitor/preis/auction) or raise the budget");
    BlossomResult r = blossom_max_weight_matching(mp.n, mp.edges);
    Matching m = finish(std::move(r.mate), mp);
    return m;
}

Matching match_bruteforce(const EdgeWeights& ew) {
    if (ew.n > 16) throw std::invalid_argument("match_bruteforce: more than 16 nodes");
    const MatchProblem mp = build_match_problem(ew);
    const std::size_t m = mp.edges.size();

    std::vector<index_t> best_partner(static_cast<std::size_t>(ew.n), UNMATCHED);
    double best_obj = 0.0;
    std::vector<index_t> partner(static_cast<std::size_t>(ew.n), UNMATCHED);

    // depth-first enumeration over edges: each edge is in or out
    auto rec = [&](auto&& self, std::size_t k, double obj) -> void {
        if (obj > best_obj) {
            best_obj = obj;
            best_partner = partner;
        }
        if (k == m) return;
        for (std::size_t k2 = k; k2 < m; ++k2) {
            const auto& e = mp.edges[k2];
            if (partner[e.u] != UNMATCHED || partner[e.v] != UNMATCHED) continue;
            partner[e.u] = e.v;
            partner[e.v] = e.u;
            self(self, k2 + 1, obj + e.logw);
            partner[e.u] = UNMATCHED;
            partner[e.v] = UNMATCHED;
        }
    };
    rec(rec, 0, 0.0);

    Matching out;
    out.partner = std::move(best_partner);
    out.product_log = best_obj;
    return out;
}

Matching run_matcher(MatcherKind kind, const EdgeWeights& ew, double eps_auction,
                     index_t exact_edge_budget) {
    switch (kind) {
        case MatcherKind::Exact:
            return match_exact(ew, exact_edge_budget);
        case MatcherKind::Suitor:
            return match_suitor(ew);
        case MatcherKind::Preis:
            return match_preis(ew);
        case MatcherKind::Auction:
            return match_auction(ew, eps_auction);
        case MatcherKind::BruteForce:
            return match_bruteforce(ew);
    }
    throw std::logic_error("run_matcher: unknown matcher");
}

} // namespace wamg
