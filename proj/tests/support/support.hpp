#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "fieldmap/cliques.hpp"
#include "fieldmap/corpus.hpp"
#include "fieldmap/exports.hpp"

namespace fmtest {

using namespace fieldmap;

// Shorthand record builders for hand-made stores.
struct Occ {
    std::string label;
    int year;
    Count count;
};
struct Cooc {
    std::string a, b;
    int year;
    Count count;
};

CorpusStore make_store(const std::vector<Occ>& occ, const std::vector<Cooc>& cooc,
                       Validation validation = Validation::strict);

std::string fixture_dir();
CorpusStore fixture_store();
const ojson& expected();

TermId id(const CorpusStore& store, const std::string& label);

// Erdos-Renyi graph over term ids 0..n-1.
LexicalGraph random_graph(std::size_t n, double p, std::uint64_t seed);

using VertexSet = std::vector<TermId>;

// Exhaustive 2^n subset enumeration.
std::set<VertexSet> brute_maximal_cliques(const LexicalGraph& g);
// All k-subsets that are cliques, merged by union-find over shared (k-1)-subsets.
std::set<VertexSet> brute_percolation(const LexicalGraph& g, std::size_t k);

std::set<VertexSet> as_set(const std::vector<Community>& communities);
std::set<VertexSet> as_set(const std::vector<Clique>& cliques);

// Runs the fieldmap executable with a shell-quoted argument string.
struct CliRun {
    int code = -1;
    std::string out, err;
};
CliRun run_cli(const std::string& args);
std::string shell_quote(const std::string& text);
std::string slurp(const std::string& path);

// Relative comparison with an absolute floor for values near zero.
bool close(double a, double b, double rel = 1e-12);

}  // namespace fmtest
