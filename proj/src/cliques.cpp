#include "fieldmap/cliques.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fieldmap/error.hpp"

namespace fieldmap {

EdgeRule parse_edge_rule(std::string_view text) {
    if (text == "or") return EdgeRule::any;
    if (text == "and") return EdgeRule::both;
    throw ParameterError("edge rule must be 'or' or 'and', got '" + std::string(text) + "'");
}

std::string_view to_string(EdgeRule rule) {
    return rule == EdgeRule::any ? "or" : "and";
}

void CpmParams::validate() const {
    if (k < 3) throw ParameterError("k must be at least 3, got " + std::to_string(k));
    if (budget == 0) throw ParameterError("clique budget must be positive");
}

// --- LexicalGraph -----------------------------------------------------------------

LexicalGraph::LexicalGraph(std::vector<TermId> nodes,
                           const std::vector<std::pair<TermId, TermId>>& edges)
    : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    adjacency_.assign(nodes_.size(), {});
    for (const auto& [a, b] : edges) {
        if (a == b) throw std::invalid_argument("self loop on node " + std::to_string(a.value));
        std::size_t pa = position(a);
        std::size_t pb = position(b);
        adjacency_[pa].push_back(pb);
        adjacency_[pb].push_back(pa);
    }
    for (auto& adj : adjacency_) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
        edge_count_ += adj.size();
    }
    edge_count_ /= 2;
}

std::size_t LexicalGraph::position(TermId t) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.end() || *it != t)
        throw std::invalid_argument("term " + std::to_string(t.value) + " is not a graph node");
    return static_cast<std::size_t>(it - nodes_.begin());
}

bool LexicalGraph::has_edge(TermId a, TermId b) const {
    auto ia = std::lower_bound(nodes_.begin(), nodes_.end(), a);
    auto ib = std::lower_bound(nodes_.begin(), nodes_.end(), b);
    if (ia == nodes_.end() || *ia != a || ib == nodes_.end() || *ib != b) return false;
    const auto& adj = adjacency_[static_cast<std::size_t>(ia - nodes_.begin())];
    return std::binary_search(adj.begin(), adj.end(), static_cast<std::size_t>(ib - nodes_.begin()));
}

std::vector<std::pair<TermId, TermId>> LexicalGraph::edges() const {
    std::vector<std::pair<TermId, TermId>> out;
    out.reserve(edge_count_);
    for (std::size_t p = 0; p < nodes_.size(); ++p)
        for (std::size_t q : adjacency_[p])
            if (p < q) out.emplace_back(nodes_[p], nodes_[q]);
    return out;
}

LexicalGraph build_lexical_graph(const WindowCounts& counts, const ProximityParams& params,
                                 EdgeRule rule) {
    params.validate();
    std::vector<TermId> nodes;
    for (std::size_t i = 0; i < counts.term_count(); ++i)
        if (counts.occurrence_vector()[i] > 0) nodes.emplace_back(static_cast<std::uint32_t>(i));

    std::vector<std::pair<TermId, TermId>> edges;
    std::size_t clamped = 0;
    for (const auto& pc : counts.pairs()) {
        const Count n_a = counts.occurrences(pc.pair.a);
        const Count n_b = counts.occurrences(pc.pair.b);
        if (n_a == 0 || n_b == 0) continue;
        bool clamp_ab = false;
        bool clamp_ba = false;
        const double p_ab = paradigmatic_proximity(pc.count, n_a, n_b, params.alpha, &clamp_ab);
        const double p_ba = paradigmatic_proximity(pc.count, n_b, n_a, params.alpha, &clamp_ba);
        clamped += static_cast<std::size_t>(clamp_ab) + static_cast<std::size_t>(clamp_ba);
        const bool ab = p_ab > params.threshold;
        const bool ba = p_ba > params.threshold;
        if (rule == EdgeRule::any ? (ab || ba) : (ab && ba)) edges.emplace_back(pc.pair.a, pc.pair.b);
    }

    LexicalGraph g(std::move(nodes), edges);
    g.params_ = params;
    g.rule_ = rule;
    g.clamped_ = clamped;
    return g;
}

LexicalGraph build_lexical_graph(const CorpusStore& store, const ProximityParams& params, EdgeRule rule) {
    params.validate();
    return build_lexical_graph(store.window_counts(params.window), params, rule);
}

// --- maximal cliques ----------------------------------------------------------------

namespace {

using Positions = std::vector<std::size_t>;

Positions intersect(const Positions& a, const Positions& b) {
    Positions out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::size_t intersection_size(const Positions& a, const Positions& b) {
    std::size_t n = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) ++i;
        else if (*j < *i) ++j;
        else { ++n; ++i; ++j; }
    }
    return n;
}

class CliqueEnumerator {
public:
    CliqueEnumerator(const LexicalGraph& g, std::size_t budget) : g_(g), budget_(budget) {}

    std::vector<Positions> run() {
        const std::size_t n = g_.node_count();
        std::vector<std::size_t> rank(n);
        auto order = degeneracy_order();
        for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

        for (std::size_t v : order) {
            Positions p, x;
            for (std::size_t w : g_.adjacent(v)) (rank[w] > rank[v] ? p : x).push_back(w);
            Positions r{v};
            expand(r, std::move(p), std::move(x));
        }
        return std::move(found_);
    }

private:
    std::vector<std::size_t> degeneracy_order() const {
        const std::size_t n = g_.node_count();
        std::vector<std::size_t> degree(n);
        std::size_t max_degree = 0;
        for (std::size_t v = 0; v < n; ++v) {
            degree[v] = g_.adjacent(v).size();
            max_degree = std::max(max_degree, degree[v]);
        }
        std::vector<std::vector<std::size_t>> buckets(max_degree + 1);
        for (std::size_t v = 0; v < n; ++v) buckets[degree[v]].push_back(v);
        std::vector<bool> removed(n, false);
        std::vector<std::size_t> order;
        order.reserve(n);
        while (order.size() < n) {
            // lowest non-empty bucket; stale entries are skipped lazily
            std::size_t d = 0;
            std::size_t v = n;
            for (; d < buckets.size(); ++d) {
                while (!buckets[d].empty()) {
                    std::size_t cand = buckets[d].back();
                    buckets[d].pop_back();
                    if (!removed[cand] && degree[cand] == d) {
                        v = cand;
                        break;
                    }
                }
                if (v != n) break;
            }
            removed[v] = true;
            order.push_back(v);
            for (std::size_t w : g_.adjacent(v)) {
                if (removed[w]) continue;
                --degree[w];
                buckets[degree[w]].push_back(w);
            }
        }
        return order;
    }

    void expand(Positions& r, Positions p, Positions x) {
        if (p.empty()) {
            if (x.empty()) report(r);
            return;
        }
        // Tomita pivot: the vertex of P or X with most neighbors in P
        std::size_t pivot = p.front();
        std::size_t best = intersection_size(p, g_.adjacent(pivot));
        for (const Positions* set : {&p, &x}) {
            for (std::size_t u : *set) {
                std::size_t s = intersection_size(p, g_.adjacent(u));
                if (s > best) {
                    best = s;
                    pivot = u;
                }
            }
        }
        Positions candidates;
        std::set_difference(p.begin(), p.end(), g_.adjacent(pivot).begin(), g_.adjacent(pivot).end(),
                            std::back_inserter(candidates));
        for (std::size_t v : candidates) {
            const auto& nv = g_.adjacent(v);
            r.push_back(v);
            expand(r, intersect(p, nv), intersect(x, nv));
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    void report(const Positions& r) {
        if (found_.size() >= budget_) {
            throw ResourceError("maximal clique budget of " + std::to_string(budget_) +
                                " exceeded (alpha=" + std::to_string(g_.params().alpha) +
                                ", s=" + std::to_string(g_.params().threshold) + ")");
        }
        Positions sorted = r;
        std::sort(sorted.begin(), sorted.end());
        found_.push_back(std::move(sorted));
    }

    const LexicalGraph& g_;
    std::size_t budget_;
    std::vector<Positions> found_;
};

std::vector<Positions> maximal_clique_positions(const LexicalGraph& g, std::size_t budget) {
    auto cliques = CliqueEnumerator(g, budget).run();
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

// Disjoint-set forest with path halving and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

// Appends every k-subset of `clique` to `out`.
void k_subsets(const Positions& clique, std::size_t k, std::vector<Positions>& out, std::size_t budget) {
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t n = clique.size();
    while (true) {
        if (out.size() >= budget)
            throw ResourceError("k-clique budget of " + std::to_string(budget) + " exceeded (k=" +
                                std::to_string(k) + ")");
        Positions subset(k);
        for (std::size_t i = 0; i < k; ++i) subset[i] = clique[idx[i]];
        out.push_back(std::move(subset));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

std::vector<Clique> maximal_cliques(const LexicalGraph& g, std::size_t budget) {
    std::vector<Clique> out;
    for (const auto& positions : maximal_clique_positions(g, budget)) {
        Clique c;
        c.reserve(positions.size());
        for (std::size_t p : positions) c.push_back(g.nodes()[p]);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Community> k_clique_communities(const LexicalGraph& g, const CpmParams& params) {
    params.validate();
    const std::size_t k = params.k;

    std::vector<Positions> k_cliques;
    for (const auto& clique : maximal_clique_positions(g, params.budget))
        if (clique.size() >= k) k_subsets(clique, k, k_cliques, params.budget);
    std::sort(k_cliques.begin(), k_cliques.end());
    k_cliques.erase(std::unique(k_cliques.begin(), k_cliques.end()), k_cliques.end());

    // two k-cliques are adjacent iff they share a (k-1)-subset
    UnionFind uf(k_cliques.size());
    std::map<Positions, std::size_t> first_owner;
    Positions face(k - 1);
    for (std::size_t c = 0; c < k_cliques.size(); ++c) {
        const auto& clique = k_cliques[c];
        for (std::size_t skip = 0; skip < k; ++skip) {
            std::size_t f = 0;
            for (std::size_t i = 0; i < k; ++i)
                if (i != skip) face[f++] = clique[i];
            auto [it, inserted] = first_owner.emplace(face, c);
            if (!inserted) uf.unite(it->second, c);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < k_cliques.size(); ++c) {
        auto& members = groups[uf.find(c)];
        members.insert(members.end(), k_cliques[c].begin(), k_cliques[c].end());
    }

    std::vector<Community> communities;
    for (auto& [root, positions] : groups) {
        std::sort(positions.begin(), positions.end());
        positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
        Community c;
        for (std::size_t p : positions) c.members.push_back(g.nodes()[p]);
        communities.push_back(std::move(c));
    }
    std::sort(communities.begin(), communities.end(), [](const Community& l, const Community& r) {
        if (l.members.front() != r.members.front()) return l.members.front() < r.members.front();
        if (l.members.size() != r.members.size()) return l.members.size() < r.members.size();
        return l.members < r.members;
    });
    for (std::size_t i = 0; i < communities.size(); ++i) communities[i].id = i;
    return communities;
}

}  // namespace fieldmap
