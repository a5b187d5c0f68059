#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "fieldmap/corpus.hpp"
#include "fieldmap/proximity.hpp"

namespace fieldmap {

/// How the two directed proximities of a pair become one undirected edge.
enum class EdgeRule {
    any,  // P(i,j) > s or P(j,i) > s
    both  // P(i,j) > s and P(j,i) > s
};

EdgeRule parse_edge_rule(std::string_view text);  // "or" | "and"
std::string_view to_string(EdgeRule rule);

/// Undirected simple graph over terms. Nodes are kept in ascending id order;
/// adjacency is stored per node position.
class LexicalGraph {
public:
    LexicalGraph() = default;
    /// Builds from explicit nodes and edges (pairs of term ids). Self loops
    /// and edges touching unknown nodes are rejected.
    LexicalGraph(std::vector<TermId> nodes, const std::vector<std::pair<TermId, TermId>>& edges);

    const std::vector<TermId>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    /// Neighbor positions of the node at position `pos`, ascending.
    const std::vector<std::size_t>& adjacent(std::size_t pos) const { return adjacency_.at(pos); }
    bool has_edge(TermId a, TermId b) const;
    /// All edges as (smaller id, larger id), sorted.
    std::vector<std::pair<TermId, TermId>> edges() const;

    const ProximityParams& params() const { return params_; }
    EdgeRule edge_rule() const { return rule_; }
    /// Number of directed proximities whose ratio had to be clamped to 1.
    std::size_t clamped_pairs() const { return clamped_; }

private:
    friend LexicalGraph build_lexical_graph(const WindowCounts&, const ProximityParams&, EdgeRule);

    std::size_t position(TermId t) const;

    std::vector<TermId> nodes_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::size_t edge_count_ = 0;
    ProximityParams params_;
    EdgeRule rule_ = EdgeRule::any;
    std::size_t clamped_ = 0;
};

/// Nodes are the terms with N_i > 0 in the window; isolated nodes are kept.
LexicalGraph build_lexical_graph(const WindowCounts& counts, const ProximityParams& params,
                                 EdgeRule rule);
LexicalGraph build_lexical_graph(const CorpusStore& store, const ProximityParams& params, EdgeRule rule);

using Clique = std::vector<TermId>;

inline constexpr std::size_t default_clique_budget = 10'000'000;

/// All maximal cliques (Bron-Kerbosch with Tomita pivoting over a degeneracy
/// ordering). Members ascending, list sorted lexicographically. Throws
/// ResourceError once more than `budget` cliques have been found.
std::vector<Clique> maximal_cliques(const LexicalGraph& g, std::size_t budget = default_clique_budget);

struct CpmParams {
    std::size_t k = 3;
    EdgeRule edge_rule = EdgeRule::any;
    std::size_t budget = default_clique_budget;

    void validate() const;
};

struct Community {
    std::size_t id = 0;
    std::vector<TermId> members;  // ascending
    friend bool operator==(const Community&, const Community&) = default;
};

/// k-clique percolation: unions of k-cliques chained through shared
/// (k-1)-subsets. Communities may overlap. Ordered by smallest member, then
/// size, then members; ids follow that order.
std::vector<Community> k_clique_communities(const LexicalGraph& g, const CpmParams& params);

}  // namespace fieldmap
