#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wamg/matching.hpp"

// Maximum weight matching on a general graph by the primal-dual blossom
// method, following the classic array-based formulation (labels S/T,
// endpoint encoding p = 2k|2k+1, nested blossom bookkeeping, delta1..4 dual
// updates). Weights are doubles; the dual certificate is checked with a
// relative tolerance at the end of the run.

namespace wamg {

namespace {

class BlossomMatcher {
public:
    BlossomMatcher(index_t n, const std::vector<MatchEdge>& edge_list)
        : nvertex_(static_cast<int>(n)) {
        edges_.reserve(edge_list.size());
        maxweight_ = 0.0;
        for (const auto& e : edge_list) {
            if (e.u == e.v) throw std::invalid_argument("blossom: self-loop");
            edges_.push_back({static_cast<int>(e.u), static_cast<int>(e.v), e.logw});
            maxweight_ = std::max(maxweight_, e.logw);
        }
        nedge_ = static_cast<int>(edges_.size());
        tol_ = 1e-10 * std::max(1.0, 2.0 * maxweight_);
    }

    BlossomResult run() {
        BlossomResult out;
        out.mate.assign(nvertex_, UNMATCHED);
        if (nedge_ == 0 || nvertex_ == 0) return out;

        init_arrays();

        for (int stage = 0; stage < nvertex_; ++stage) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(bestedge_.begin(), bestedge_.end(), -1);
            for (int b = nvertex_; b < 2 * nvertex_; ++b) blossombestedges_[b].clear();
            std::fill(allowedge_.begin(), allowedge_.end(), false);
            queue_.clear();

            for (int v = 0; v < nvertex_; ++v)
                if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    const int v = queue_.back();
                    queue_.pop_back();
                    for (int p : neighbend_[v]) {
                        const int k = p / 2;
                        const int w = endpoint_[p];
                        if (inblossom_[v] == inblossom_[w]) continue;

                        double kslack = 0.0;
                        bool have_slack = false;
                        if (!allowedge_[k]) {
                            kslack = slack(k);
                            have_slack = true;
                            if (kslack <= tol_) allowedge_[k] = true;
                        }
                        if (allowedge_[k]) {
                            if (label_[inblossom_[w]] == 0) {
                                assign_label(w, 2, p ^ 1);
                            } else if (label_[inblossom_[w]] == 1) {
                                const int base = scan_blossom(v, w);
                                if (base >= 0) {
                                    add_blossom(base, k);
                                } else {
                                    augment_matching(k);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[w] == 0) {
                                label_[w] = 2;
                                labelend_[w] = p ^ 1;
                            }
                        } else if (label_[inblossom_[w]] == 1) {
                            const int b = inblossom_[v];
                            if (bestedge_[b] == -1 ||
                                (have_slack && kslack < slack(bestedge_[b])))
                                bestedge_[b] = k;
                        } else if (label_[w] == 0) {
                            if (bestedge_[w] == -1 ||
                                (have_slack && kslack < slack(bestedge_[w])))
                                bestedge_[w] = k;
                        }
                    }
                }
                if (augmented) break;

                // no augmenting path under the current tight edges: dual update
                int deltatype = 1;
                int deltaedge = -1, deltablossom = -1;
                double delta = *std::min_element(dualvar_.begin(), dualvar_.begin() + nvertex_);

                for (int v = 0; v < nvertex_; ++v) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                        const double d = slack(bestedge_[v]);
                        if (d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * nvertex_; ++b) {
                    if (blossomparent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
                        const double d = 0.5 * slack(bestedge_[b]);
                        if (d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = nvertex_; b < 2 * nvertex_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1 && label_[b] == 2 &&
                        dualvar_[b] < delta) {
                        delta = dualvar_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }

                for (int v = 0; v < nvertex_; ++v) {
                    if (label_[inblossom_[v]] == 1)
                        dualvar_[v] -= delta;
                    else if (label_[inblossom_[v]] == 2)
                        dualvar_[v] += delta;
                }
                for (int b = nvertex_; b < 2 * nvertex_; ++b) {
                    if (blossombase_[b] >= 0 && blossomparent_[b] == -1) {
                        if (label_[b] == 1)
                            dualvar_[b] += delta;
                        else if (label_[b] == 2)
                            dualvar_[b] -= delta;
                    }
                }

                if (deltatype == 1) break; // optimum reached
                if (deltatype == 2) {
                    allowedge_[deltaedge] = true;
                    int i = edges_[deltaedge].i;
                    if (label_[inblossom_[i]] == 0) i = edges_[deltaedge].j;
                    queue_.push_back(i);
                } else if (deltatype == 3) {
                    allowedge_[deltaedge] = true;
                    queue_.push_back(edges_[deltaedge].i);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }

            if (!augmented) break;

            for (int b = nvertex_; b < 2 * nvertex_; ++b)
                if (blossomparent_[b] == -1 && blossombase_[b] >= 0 && label_[b] == 1 &&
                    std::fabs(dualvar_[b]) <= tol_)
                    expand_blossom(b, true);
        }

        verify_optimum();

        double objective = 0.0;
        for (int v = 0; v < nvertex_; ++v) {
            if (mate_[v] >= 0) {
                const int k = mate_[v] / 2;
                out.mate[v] = endpoint_[mate_[v]];
                if (v < out.mate[v]) objective += edges_[k].w;
            }
        }
        out.objective = objective;
        return out;
    }

private:
    struct Edge {
        int i, j;
        double w;
    };

    void init_arrays() {
        endpoint_.resize(2 * nedge_);
        neighbend_.assign(nvertex_, {});
        for (int k = 0; k < nedge_; ++k) {
            endpoint_[2 * k] = edges_[k].i;
            endpoint_[2 * k + 1] = edges_[k].j;
            neighbend_[edges_[k].i].push_back(2 * k + 1);
            neighbend_[edges_[k].j].push_back(2 * k);
        }
        mate_.assign(nvertex_, -1);
        label_.assign(2 * nvertex_, 0);
        labelend_.assign(2 * nvertex_, -1);
        inblossom_.resize(nvertex_);
        for (int v = 0; v < nvertex_; ++v) inblossom_[v] = v;
        blossomparent_.assign(2 * nvertex_, -1);
        blossomchilds_.assign(2 * nvertex_, {});
        blossombase_.resize(2 * nvertex_);
        for (int v = 0; v < nvertex_; ++v) blossombase_[v] = v;
        for (int b = nvertex_; b < 2 * nvertex_; ++b) blossombase_[b] = -1;
        blossomendps_.assign(2 * nvertex_, {});
        bestedge_.assign(2 * nvertex_, -1);
        blossombestedges_.assign(2 * nvertex_, {});
        unusedblossoms_.clear();
        for (int b = nvertex_; b < 2 * nvertex_; ++b) unusedblossoms_.push_back(b);
        dualvar_.assign(2 * nvertex_, 0.0);
        for (int v = 0; v < nvertex_; ++v) dualvar_[v] = maxweight_;
        allowedge_.assign(nedge_, false);
        queue_.clear();
    }

    double slack(int k) const {
        return dualvar_[edges_[k].i] + dualvar_[edges_[k].j] - 2.0 * edges_[k].w;
    }

    void blossom_leaves(int b, std::vector<int>& out) const {
        if (b < nvertex_) {
            out.push_back(b);
            return;
        }
        for (int t : blossomchilds_[b]) blossom_leaves(t, out);
    }

    void assign_label(int w, int t, int p) {
        const int b = inblossom_[w];
        label_[w] = label_[b] = t;
        labelend_[w] = labelend_[b] = p;
        bestedge_[w] = bestedge_[b] = -1;
        if (t == 1) {
            std::vector<int> leaves;
            blossom_leaves(b, leaves);
            queue_.insert(queue_.end(), leaves.begin(), leaves.end());
        } else {
            const int base = blossombase_[b];
            assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int base = -1;
        while (v != -1 || w != -1) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                base = blossombase_[b];
                break;
            }
            path.push_back(b);
            label_[b] = 5;
            if (labelend_[b] == -1) {
                v = -1;
            } else {
                v = endpoint_[labelend_[b]];
                b = inblossom_[v];
                v = endpoint_[labelend_[b]];
            }
            if (w != -1) std::swap(v, w);
        }
        for (int b : path) label_[b] = 1;
        return base;
    }

    void add_blossom(int base, int k) {
        int v = edges_[k].i;
        int w = edges_[k].j;
        const int bb = inblossom_[base];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        const int b = unusedblossoms_.back();
        unusedblossoms_.pop_back();

        blossombase_[b] = base;
        blossomparent_[b] = -1;
        blossomparent_[bb] = b;
        auto& path = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        path.clear();
        endps.clear();

        while (bv != bb) {
            blossomparent_[bv] = b;
            path.push_back(bv);
            endps.push_back(labelend_[bv]);
            v = endpoint_[labelend_[bv]];
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(endps.begin(), endps.end());
        endps.push_back(2 * k);
        while (bw != bb) {
            blossomparent_[bw] = b;
            path.push_back(bw);
            endps.push_back(labelend_[bw] ^ 1);
            w = endpoint_[labelend_[bw]];
            bw = inblossom_[w];
        }

        label_[b] = 1;
        labelend_[b] = labelend_[bb];
        dualvar_[b] = 0.0;

        std::vector<int> leaves;
        blossom_leaves(b, leaves);
        for (int lv : leaves) {
            if (label_[inblossom_[lv]] == 2) queue_.push_back(lv);
            inblossom_[lv] = b;
        }

        // least-slack edges from the new blossom to every other S-blossom
        std::vector<int> bestedgeto(2 * nvertex_, -1);
        for (int child : path) {
            std::vector<int> klist;
            if (blossombestedges_[child].empty()) {
                std::vector<int> sub;
                blossom_leaves(child, sub);
                for (int lv : sub)
                    for (int p : neighbend_[lv]) klist.push_back(p / 2);
            } else {
                klist = blossombestedges_[child];
            }
            for (int ke : klist) {
                int i = edges_[ke].i, j = edges_[ke].j;
                if (inblossom_[j] == b) std::swap(i, j);
                const int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 &&
                    (bestedgeto[bj] == -1 || slack(ke) < slack(bestedgeto[bj])))
                    bestedgeto[bj] = ke;
            }
            blossombestedges_[child].clear();
            bestedge_[child] = -1;
        }
        auto& bbe = blossombestedges_[b];
        bbe.clear();
        for (int ke : bestedgeto)
            if (ke != -1) bbe.push_back(ke);
        bestedge_[b] = -1;
        for (int ke : bbe)
            if (bestedge_[b] == -1 || slack(ke) < slack(bestedge_[b])) bestedge_[b] = ke;
    }

    void expand_blossom(int b, bool endstage) {
        for (int s : blossomchilds_[b]) {
            blossomparent_[s] = -1;
            if (s < nvertex_) {
                inblossom_[s] = s;
            } else if (endstage && std::fabs(dualvar_[s]) <= tol_) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> leaves;
                blossom_leaves(s, leaves);
                for (int lv : leaves) inblossom_[lv] = s;
            }
        }

        if (!endstage && label_[b] == 2) {
            const int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
            const auto& childs = blossomchilds_[b];
            const auto& endps = blossomendps_[b];
            const int nchild = static_cast<int>(childs.size());
            int j = static_cast<int>(std::find(childs.begin(), childs.end(), entrychild) -
                                     childs.begin());
            int jstep, endptrick;
            if (j & 1) {
                j -= nchild;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }
            auto at = [&](int idx) { return idx >= 0 ? idx : idx + nchild; };
            int p = labelend_[b];
            while (j != 0) {
                label_[endpoint_[p ^ 1]] = 0;
                label_[endpoint_[endps[at(j - endptrick)] ^ endptrick ^ 1]] = 0;
                assign_label(endpoint_[p ^ 1], 2, p);
                allowedge_[endps[at(j - endptrick)] / 2] = true;
                j += jstep;
                p = endps[at(j - endptrick)] ^ endptrick;
                allowedge_[p / 2] = true;
                j += jstep;
            }
            int bv = childs[at(j)];
            label_[endpoint_[p ^ 1]] = label_[bv] = 2;
            labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
            bestedge_[bv] = -1;
            j += jstep;
            while (childs[at(j)] != entrychild) {
                bv = childs[at(j)];
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> leaves;
                blossom_leaves(bv, leaves);
                int v = -1;
                for (int lv : leaves) {
                    v = lv;
                    if (label_[lv] != 0) break;
                }
                if (v != -1 && label_[v] != 0) {
                    label_[v] = 0;
                    label_[endpoint_[mate_[blossombase_[bv]]]] = 0;
                    assign_label(v, 2, labelend_[v]);
                }
                j += jstep;
            }
        }

        label_[b] = labelend_[b] = -1;
        blossomchilds_[b].clear();
        blossomendps_[b].clear();
        blossombase_[b] = -1;
        blossombestedges_[b].clear();
        bestedge_[b] = -1;
        unusedblossoms_.push_back(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (blossomparent_[t] != b) t = blossomparent_[t];
        if (t >= nvertex_) augment_blossom(t, v);

        auto& childs = blossomchilds_[b];
        auto& endps = blossomendps_[b];
        const int nchild = static_cast<int>(childs.size());
        const int i = static_cast<int>(std::find(childs.begin(), childs.end(), t) -
                                       childs.begin());
        int j = i;
        int jstep, endptrick;
        if (i & 1) {
            j -= nchild;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        auto at = [&](int idx) { return idx >= 0 ? idx : idx + nchild; };
        while (j != 0) {
            j += jstep;
            t = childs[at(j)];
            const int p = endps[at(j - endptrick)] ^ endptrick;
            if (t >= nvertex_) augment_blossom(t, endpoint_[p]);
            j += jstep;
            t = childs[at(j)];
            if (t >= nvertex_) augment_blossom(t, endpoint_[p ^ 1]);
            mate_[endpoint_[p]] = p ^ 1;
            mate_[endpoint_[p ^ 1]] = p;
        }
        std::rotate(childs.begin(), childs.begin() + i, childs.end());
        std::rotate(endps.begin(), endps.begin() + i, endps.end());
        blossombase_[b] = blossombase_[childs[0]];
    }

    void augment_matching(int k) {
        const int pairs[2][2] = {{edges_[k].i, 2 * k + 1}, {edges_[k].j, 2 * k}};
        for (const auto& sp : pairs) {
            int s = sp[0];
            int p = sp[1];
            while (true) {
                const int bs = inblossom_[s];
                if (bs >= nvertex_) augment_blossom(bs, s);
                mate_[s] = p;
                if (labelend_[bs] == -1) break;
                const int t = endpoint_[labelend_[bs]];
                const int bt = inblossom_[t];
                s = endpoint_[labelend_[bt]];
                const int j = endpoint_[labelend_[bt] ^ 1];
                if (bt >= nvertex_) augment_blossom(bt, j);
                mate_[j] = labelend_[bt];
                p = labelend_[bt] ^ 1;
            }
        }
    }

    // dual certificate: nonnegative slacks, tight matched edges, zero duals
    // on free vertices, nonnegative blossom duals
    void verify_optimum() const {
        for (int k = 0; k < nedge_; ++k) {
            double s = slack(k);
            std::vector<int> iblossoms{edges_[k].i}, jblossoms{edges_[k].j};
            while (blossomparent_[iblossoms.back()] != -1)
                iblossoms.push_back(blossomparent_[iblossoms.back()]);
            while (blossomparent_[jblossoms.back()] != -1)
                jblossoms.push_back(blossomparent_[jblossoms.back()]);
            std::reverse(iblossoms.begin(), iblossoms.end());
            std::reverse(jblossoms.begin(), jblossoms.end());
            const std::size_t m = std::min(iblossoms.size(), jblossoms.size());
            for (std::size_t q = 0; q < m; ++q) {
                if (iblossoms[q] != jblossoms[q]) break;
                s += 2.0 * dualvar_[iblossoms[q]];
            }
            if (s < -100 * tol_)
                throw std::runtime_error("blossom: dual certificate failed (negative slack)");
            const int mi = mate_[edges_[k].i] == -1 ? -1 : mate_[edges_[k].i] / 2;
            const int mj = mate_[edges_[k].j] == -1 ? -1 : mate_[edges_[k].j] / 2;
            if ((mi == k || mj == k) && std::fabs(s) > 100 * tol_)
                throw std::runtime_error("blossom: dual certificate failed (loose matched edge)");
        }
        for (int v = 0; v < nvertex_; ++v) {
            if (dualvar_[v] < -100 * tol_)
                throw std::runtime_error("blossom: dual certificate failed (negative dual)");
            if (mate_[v] == -1 && std::fabs(dualvar_[v]) > 100 * tol_)
                throw std::runtime_error("blossom: dual certificate failed (free vertex dual)");
        }
        for (int b = nvertex_; b < 2 * nvertex_; ++b)
            if (blossombase_[b] >= 0 && dualvar_[b] < -100 * tol_)
                throw std::runtime_error("blossom: dual certificate failed (blossom dual)");
    }

    int nvertex_ = 0;
    int nedge_ = 0;
    double maxweight_ = 0.0;
    double tol_ = 0.0;
    std::vector<Edge> edges_;
    std::vector<int> endpoint_;
    std::vector<std::vector<int>> neighbend_;
    std::vector<int> mate_;
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> blossomparent_;
    std::vector<std::vector<int>> blossomchilds_;
    std::vector<int> blossombase_;
    std::vector<std::vector<int>> blossomendps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> blossombestedges_;
    std::vector<int> unusedblossoms_;
    std::vector<double> dualvar_;
    std::vector<bool> allowedge_;
    std::vector<int> queue_;
};

} // namespace

BlossomResult blossom_max_weight_matching(index_t n, const std::vector<MatchEdge>& edges) {
    BlossomMatcher matcher(n, edges);
    BlossomResult r = matcher.run();
    return r;
}

} // namespace wamg
