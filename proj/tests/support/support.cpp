#include "support.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <numeric>
#include <random>

#include <sys/wait.h>
#include <unistd.h>

#include "fieldmap/error.hpp"

namespace fmtest {

CorpusStore make_store(const std::vector<Occ>& occ, const std::vector<Cooc>& cooc, Validation validation) {
    std::vector<OccurrenceRecord> o;
    for (const auto& r : occ) o.push_back({r.label, r.year, r.count, 0});
    std::vector<CooccurrenceRecord> c;
    for (const auto& r : cooc) c.push_back({r.a, r.b, r.year, r.count, 0});
    return ingest(o, c, validation).store;
}

std::string fixture_dir() { return FIELDMAP_FIXTURE_DIR; }

CorpusStore fixture_store() {
    static const CorpusStore store = [] {
        const auto occ = read_occurrence_csv_file(fixture_dir() + "/occurrences.csv");
        const auto cooc = read_cooccurrence_csv_file(fixture_dir() + "/cooccurrences.csv");
        return ingest(occ, cooc, Validation::strict, "fixture").store;
    }();
    return store;
}

const ojson& expected() {
    static const ojson doc = ojson::parse(read_file(FIELDMAP_EXPECTED_JSON));
    return doc;
}

TermId id(const CorpusStore& store, const std::string& label) { return store.require(label); }

LexicalGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    std::vector<TermId> nodes;
    for (std::size_t i = 0; i < n; ++i) nodes.emplace_back(static_cast<std::uint32_t>(i));
    std::vector<std::pair<TermId, TermId>> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (coin(rng)) edges.emplace_back(nodes[i], nodes[j]);
    return LexicalGraph(nodes, edges);
}

namespace {

bool is_clique(const LexicalGraph& g, const VertexSet& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            if (!g.has_edge(s[i], s[j])) return false;
    return true;
}

VertexSet subset(const std::vector<TermId>& nodes, std::uint32_t mask) {
    VertexSet s;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (mask & (1u << i)) s.push_back(nodes[i]);
    return s;
}

}  // namespace

std::set<VertexSet> brute_maximal_cliques(const LexicalGraph& g) {
    const auto& nodes = g.nodes();
    if (nodes.size() > 20) throw std::invalid_argument("brute force limited to 20 nodes");
    const std::uint32_t full = 1u << nodes.size();
    std::vector<bool> clique(full, false);
    for (std::uint32_t m = 1; m < full; ++m) clique[m] = is_clique(g, subset(nodes, m));
    std::set<VertexSet> out;
    for (std::uint32_t m = 1; m < full; ++m) {
        if (!clique[m]) continue;
        bool maximal = true;
        for (std::size_t i = 0; i < nodes.size() && maximal; ++i)
            if (!(m & (1u << i)) && clique[m | (1u << i)]) maximal = false;
        if (maximal) out.insert(subset(nodes, m));
    }
    return out;
}

std::set<VertexSet> brute_percolation(const LexicalGraph& g, std::size_t k) {
    const auto& nodes = g.nodes();
    if (nodes.size() > 20) throw std::invalid_argument("brute force limited to 20 nodes");
    std::vector<std::uint32_t> kcliques;
    for (std::uint32_t m = 1; m < (1u << nodes.size()); ++m)
        if (static_cast<std::size_t>(std::popcount(m)) == k && is_clique(g, subset(nodes, m))) kcliques.push_back(m);

    std::vector<std::size_t> parent(kcliques.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t a = 0; a < kcliques.size(); ++a)
        for (std::size_t b = a + 1; b < kcliques.size(); ++b)
            if (static_cast<std::size_t>(std::popcount(kcliques[a] & kcliques[b])) == k - 1)
                parent[find(a)] = find(b);

    std::vector<std::uint32_t> unions(kcliques.size(), 0);
    for (std::size_t a = 0; a < kcliques.size(); ++a) unions[find(a)] |= kcliques[a];
    std::set<VertexSet> out;
    for (std::uint32_t m : unions)
        if (m) out.insert(subset(nodes, m));
    return out;
}

std::set<VertexSet> as_set(const std::vector<Community>& communities) {
    std::set<VertexSet> out;
    for (const auto& c : communities) out.insert(c.members);
    return out;
}

std::set<VertexSet> as_set(const std::vector<Clique>& cliques) { return {cliques.begin(), cliques.end()}; }

std::string shell_quote(const std::string& text) {
    std::string out = "'";
    for (char c : text) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CliRun run_cli(const std::string& args) {
    static int serial = 0;
    const auto err_path = std::filesystem::temp_directory_path() /
                          ("fieldmap_cli_stderr_" + std::to_string(::getpid()) + "_" + std::to_string(serial++));
    const std::string command =
        shell_quote(FIELDMAP_CLI) + " " + args + " 2>" + shell_quote(err_path.string());
    CliRun run;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return run;
    char buffer[4096];
    for (std::size_t n; (n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0;) run.out.append(buffer, n);
    const int status = ::pclose(pipe);
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.err = slurp(err_path.string());
    std::filesystem::remove(err_path);
    return run;
}

bool close(double a, double b, double rel) {
    if (a == b) return true;
    return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace fmtest
