// fieldmap: batch front end for the micro / meso / macro pipeline.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fieldmap/corpus.hpp"
#include "fieldmap/error.hpp"
#include "fieldmap/exports.hpp"
#include "fieldmap/pipeline.hpp"
#include "fieldmap/server.hpp"

namespace fs = std::filesystem;
using namespace fieldmap;

namespace {

// Raw flag values; only the ones actually given override the config file.
struct Flags {
    std::string config;
    std::string store, occurrences, cooccurrences, fields, out;
    std::string window, edge_rule, filter, growth_basis, validation;
    double alpha = 1.0, threshold = 0.0, log_base = 10.0;
    std::size_t k = 3, budget = default_clique_budget;
    bool overlap_boundary = false;
};

struct Options {
    CLI::Option* store = nullptr;
    CLI::Option* occurrences = nullptr;
    CLI::Option* cooccurrences = nullptr;
    CLI::Option* fields = nullptr;
    CLI::Option* out = nullptr;
    CLI::Option* window = nullptr;
    CLI::Option* alpha = nullptr;
    CLI::Option* threshold = nullptr;
    CLI::Option* k = nullptr;
    CLI::Option* edge_rule = nullptr;
    CLI::Option* filter = nullptr;
    CLI::Option* growth_basis = nullptr;
    CLI::Option* overlap = nullptr;
    CLI::Option* log_base = nullptr;
    CLI::Option* validation = nullptr;
    CLI::Option* budget = nullptr;
};

bool given(const CLI::Option* o) { return o && o->count() > 0; }

RunConfig resolve(const Flags& f, const Options& o) {
    RunConfig c;
    if (!f.config.empty()) apply_config_file(c, f.config);
    if (given(o.store)) c.store_path = f.store;
    if (given(o.occurrences)) c.occurrences_path = f.occurrences;
    if (given(o.cooccurrences)) c.cooccurrences_path = f.cooccurrences;
    if (given(o.fields)) c.fields_path = f.fields;
    if (given(o.out)) c.output_dir = f.out;
    if (given(o.window)) c.window = parse_window(f.window);
    if (given(o.alpha)) c.alpha = f.alpha;
    if (given(o.threshold)) c.threshold = f.threshold;
    if (given(o.k)) c.k = f.k;
    if (given(o.edge_rule)) c.edge_rule = parse_edge_rule(f.edge_rule);
    if (given(o.filter)) c.filter = parse_filter(f.filter);
    if (given(o.growth_basis)) c.growth_basis = parse_growth_basis(f.growth_basis);
    if (given(o.overlap)) c.convention = f.overlap_boundary ? PeriodConvention::shared_boundary : PeriodConvention::adjacent;
    if (given(o.log_base)) c.log_base = f.log_base;
    if (given(o.validation)) c.validation = parse_validation(f.validation);
    if (given(o.budget)) c.budget = f.budget;
    return c;
}

void print_warnings(const std::vector<IngestWarning>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w.message << "\n";
}

IngestResult ingest_csv(const RunConfig& c) {
    if (c.occurrences_path.empty() || c.cooccurrences_path.empty())
        throw ParameterError("both --occurrences and --cooccurrences are required");
    const auto occ = read_occurrence_csv_file(c.occurrences_path);
    const auto cooc = read_cooccurrence_csv_file(c.cooccurrences_path);
    const std::string provenance =
        fs::path(c.occurrences_path).filename().string() + "+" + fs::path(c.cooccurrences_path).filename().string();
    return ingest(occ, cooc, c.validation, provenance);
}

// The store comes from --store, or is ingested on the fly from the CSVs.
CorpusStore open_store(const RunConfig& c) {
    IngestResult r = !c.store_path.empty() ? load_store(c.store_path) : ingest_csv(c);
    print_warnings(r.warnings);
    return std::move(r.store);
}

void print_summary(const IngestResult& r, std::ostream& out) {
    const CorpusStore& s = r.store;
    out << "terms: " << s.term_count() << "\n"
        << "years: " << s.years().size();
    if (!s.empty()) out << " (" << to_string(s.full_range()) << ")";
    out << "\npairs: " << s.pair_count() << "\n"
        << "warnings: " << r.warnings.size() + (s.pair_count() == 0 ? 1 : 0) << "\n"
        << "fingerprint: " << store_fingerprint(s) << "\n";
    if (s.pair_count() == 0) std::cerr << "warning: 0 pairs\n";
}

int cmd_ingest(const RunConfig& c) {
    if (c.output_dir.empty()) throw ParameterError("--out is required (path of the store file)");
    IngestResult r = ingest_csv(c);
    print_warnings(r.warnings);
    fs::path target(c.output_dir);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    write_file_atomic(target.string(), store_to_json(r.store, 1) + "\n");
    print_summary(r, std::cout);
    return 0;
}

int cmd_validate(RunConfig c, bool validation_given) {
    if (!validation_given) c.validation = Validation::strict;
    IngestResult r;
    if (!c.store_path.empty()) {
        r = load_store(c.store_path);
        if (c.validation == Validation::strict) check_cooccurrence_bounds(r.store, Validation::strict);
    } else {
        r = ingest_csv(c);
    }
    print_warnings(r.warnings);
    print_summary(r, std::cout);
    return 0;
}

int cmd_neighbors(const RunConfig& c, const std::string& term) {
    const CorpusStore store = open_store(c);
    const auto id = store.find(term);
    if (!id) {
        std::cerr << "error: unknown term '" << term << "'\n";
        const auto near = closest_labels(store, term);
        if (!near.empty()) {
            std::cerr << "nearest labels:";
            for (const auto& l : near) std::cerr << " '" << l << "'";
            std::cerr << "\n";
        }
        return exit_code(ErrorKind::query);
    }
    ProximityParams p{c.alpha, c.threshold.value_or(0.0), c.resolve_window(store)};
    p.validate();
    const WindowCounts counts = store.window_counts(p.window);
    std::cout << neighbors_json(store, *id, p, ranked_neighborhood(counts, store, *id, p)).dump(2) << "\n";
    return 0;
}

int cmd_fields(const RunConfig& c) {
    if (c.output_dir.empty()) throw ParameterError("--out is required (output directory)");
    const CorpusStore store = open_store(c);
    MesoResult meso;
    try {
        meso = run_meso(store, c);
    } catch (const ResourceError& e) {
        throw ResourceError(std::string(e.what()) + " (alpha=" + format_number(c.alpha) +
                            ", s=" + format_number(c.threshold.value_or(0.0)) + ", k=" + std::to_string(c.k) +
                            "; raise --threshold or --k, or the budget)");
    }
    const std::string index = write_meso_outputs(c.output_dir, store, meso, c);
    std::cout << "graph: " << meso.graph.node_count() << " nodes, " << meso.graph.edge_count() << " edges\n"
              << "fields: " << meso.fields.size() << "\n";
    for (const auto& f : meso.fields) {
        std::cout << "  field " << f.id << ": " << f.members.size() << " terms, generic '"
                  << store.label(f.label_generic) << "', specific '" << store.label(f.label_specific) << "'\n";
    }
    std::cout << "index: " << index << "\n";
    return 0;
}

int cmd_map(RunConfig c) {
    if (c.output_dir.empty()) throw ParameterError("--out is required (output directory)");
    const CorpusStore store = open_store(c);
    std::string fields = c.fields_path;
    if (fields.empty()) fields = (fs::path(c.output_dir) / "index.json").string();
    const LoadedFields loaded = load_fields(store, fields);
    if (!c.window) c.window = loaded.window;
    const MacroMap map = run_macro(store, loaded.fields, c);
    write_macro_outputs(c.output_dir, map);
    std::cout << "nodes: " << map.nodes.size() << "\nedges: " << map.edges.size() << "\n";
    return 0;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::istringstream cell(item);
        T v{};
        if (!(cell >> v) || !(cell >> std::ws).eof())
            throw ParameterError(std::string("bad ") + what + " list entry '" + item + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_sweep(const RunConfig& c, const std::string& alphas, const std::string& thresholds, const std::string& ks) {
    const CorpusStore store = open_store(c);
    const auto rows = run_sweep(store, c, parse_list<double>(alphas, "alpha"),
                                parse_list<double>(thresholds, "threshold"), parse_list<std::size_t>(ks, "k"));
    const std::string csv = sweep_csv(rows);
    if (c.output_dir.empty()) {
        std::cout << csv;
    } else {
        write_file_atomic(c.output_dir, csv);
    }
    return 0;
}

HttpServer* active_server = nullptr;

extern "C" void on_signal(int) {
    if (active_server) active_server->stop();
}

struct ServeFlags {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
    std::vector<std::string> cors;
    std::size_t cache_entries = 64;
    long deadline_ms = 10'000;
};

int cmd_serve(const RunConfig& c, const ServeFlags& s) {
    ServiceConfig config;
    config.cache_entries = s.cache_entries;
    config.soft_deadline = std::chrono::milliseconds(s.deadline_ms);
    config.cors_allowlist = s.cors;
    config.defaults = c;
    QueryService service(open_store(c), config);
    HttpServer server(service, s.static_dir);
    const int port = server.bind(s.host, s.port);
    if (port < 0) throw Error(ErrorKind::input, "cannot bind " + s.host + ":" + std::to_string(s.port));
    active_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on http://" << s.host << ":" << port << " (store " << service.fingerprint() << ")"
              << std::endl;
    server.serve();
    active_server = nullptr;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-scale maps of a domain from term co-occurrence counts"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Flags f;
    Options o;
    app.add_option("--config", f.config, "key = value settings file (flags take precedence)");
    o.store = app.add_option("--store", f.store, "canonical store JSON");
    o.occurrences = app.add_option("--occurrences", f.occurrences, "occurrences CSV (term,year,count)");
    o.cooccurrences = app.add_option("--cooccurrences", f.cooccurrences, "co-occurrences CSV (term_a,term_b,year,count)");
    o.fields = app.add_option("--fields", f.fields, "field index (map input)");
    o.out = app.add_option("--out", f.out, "output file or directory");
    o.window = app.add_option("--window", f.window, "Y1:Y2, defaults to the full corpus");
    o.alpha = app.add_option("--alpha", f.alpha, "focus parameter (> 0)");
    o.threshold = app.add_option("--threshold,-s", f.threshold, "proximity threshold s in [0,1]");
    o.k = app.add_option("--k", f.k, "clique size for percolation (>= 3)");
    o.edge_rule = app.add_option("--edge-rule", f.edge_rule, "or | and");
    o.filter = app.add_option("--filter", f.filter, "MIN:MAX field size for the macro map");
    o.growth_basis = app.add_option("--growth-basis", f.growth_basis, "occurrences | intra_cooccurrences");
    o.overlap = app.add_flag("--overlap-boundary", f.overlap_boundary, "previous period shares the first year");
    o.log_base = app.add_option("--log-base", f.log_base, "log base of the display size");
    o.validation = app.add_option("--validation", f.validation, "strict | lenient");
    o.budget = app.add_option("--budget", f.budget, "maximal clique budget");

    auto* ingest = app.add_subcommand("ingest", "build a canonical store from CSV counts");
    auto* validate = app.add_subcommand("validate", "check CSV counts or a store (strict by default)");
    auto* neighbors = app.add_subcommand("neighbors", "print the ranked neighborhood of a term");
    std::string term;
    neighbors->add_option("term", term, "term label")->required();
    auto* fields = app.add_subcommand("fields", "detect paradigmatic fields and write their profiles");
    auto* map = app.add_subcommand("map", "assemble the macro map from a field index");
    auto* sweep = app.add_subcommand("sweep", "field counts over a parameter grid");
    std::string alphas = "1", thresholds, ks = "3";
    sweep->add_option("--alphas", alphas, "comma separated alpha values");
    sweep->add_option("--thresholds", thresholds, "comma separated s values");
    sweep->add_option("--ks", ks, "comma separated k values");
    auto* serve = app.add_subcommand("serve", "run the HTTP query service");
    ServeFlags sf;
    serve->add_option("--host", sf.host);
    serve->add_option("--port", sf.port, "0 picks a free port");
    serve->add_option("--static", sf.static_dir, "directory served at /");
    serve->add_option("--cors", sf.cors, "allowed origin (repeatable, * for any)");
    serve->add_option("--cache-entries", sf.cache_entries);
    serve->add_option("--deadline-ms", sf.deadline_ms, "soft deadline before answering 202");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::input);
    }

    try {
        const RunConfig config = resolve(f, o);
        if (*ingest) return cmd_ingest(config);
        if (*validate) return cmd_validate(config, given(o.validation));
        if (*neighbors) return cmd_neighbors(config, term);
        if (*fields) return cmd_fields(config);
        if (*map) return cmd_map(config);
        if (*sweep) return cmd_sweep(config, alphas, thresholds, ks);
        if (*serve) return cmd_serve(config, sf);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
