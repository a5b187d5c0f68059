#include "fieldmap/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "fieldmap/error.hpp"

namespace fieldmap {

namespace fs = std::filesystem;

TimeWindow RunConfig::resolve_window(const CorpusStore& store) const {
    TimeWindow w = window ? *window : store.full_range();
    store.check_window(w);
    return w;
}

ProximityParams RunConfig::proximity_params(const CorpusStore& store) const {
    if (!threshold) throw ParameterError("a threshold s is required (--threshold)");
    ProximityParams p{alpha, *threshold, resolve_window(store)};
    p.validate();
    return p;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
        throw ParameterError("setting '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
    return v;
}

std::size_t to_size(std::string_view key, std::string_view value) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
        throw ParameterError("setting '" + std::string(key) + "' expects a non-negative integer, got '" +
                             std::string(value) + "'");
    return v;
}

bool to_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ParameterError("setting '" + std::string(key) + "' expects true or false");
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
    if (key == "occurrences") c.occurrences_path = value;
    else if (key == "cooccurrences") c.cooccurrences_path = value;
    else if (key == "store") c.store_path = value;
    else if (key == "fields") c.fields_path = value;
    else if (key == "out") c.output_dir = value;
    else if (key == "window") c.window = parse_window(value);
    else if (key == "alpha") c.alpha = to_double(key, value);
    else if (key == "threshold") c.threshold = to_double(key, value);
    else if (key == "k") c.k = to_size(key, value);
    else if (key == "edge_rule") c.edge_rule = parse_edge_rule(value);
    else if (key == "filter") c.filter = parse_filter(value);
    else if (key == "growth_basis") c.growth_basis = parse_growth_basis(value);
    else if (key == "overlap_boundary")
        c.convention = to_bool(key, value) ? PeriodConvention::shared_boundary : PeriodConvention::adjacent;
    else if (key == "log_base") c.log_base = to_double(key, value);
    else if (key == "validation") c.validation = parse_validation(value);
    else if (key == "budget") c.budget = to_size(key, value);
    else throw ParameterError("unknown setting '" + std::string(key) + "'");
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::istringstream in(read_file(path));
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(path, line_no, "expected key = value");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        try {
            apply_setting(config, key, value);
        } catch (const ParameterError& e) {
            throw ParseError(path, line_no, e.what());
        }
    }
}

MesoResult run_meso(const CorpusStore& store, const RunConfig& config) {
    MesoResult result;
    result.params = config.proximity_params(store);
    const CpmParams cpm = config.cpm_params();
    cpm.validate();

    const WindowCounts current = store.window_counts(result.params.window);
    const TimeWindow prev = previous_window(result.params.window, config.convention);
    std::optional<WindowCounts> previous;
    if (prev.y1 >= store.first_year()) previous = store.window_counts(prev);

    result.graph = build_lexical_graph(current, result.params, config.edge_rule);
    result.communities = k_clique_communities(result.graph, cpm);
    for (const auto& c : result.communities) {
        result.fields.push_back(build_field(store, current, previous ? &*previous : nullptr, c,
                                            result.params.alpha, config.growth_basis));
    }
    return result;
}

MacroMap run_macro(const CorpusStore& store, const std::vector<ParadigmaticField>& fields,
                   const RunConfig& config) {
    return build_macro_map(fields, store, config.resolve_window(store), config.macro_options());
}

std::string write_meso_outputs(const std::string& dir, const CorpusStore& store, const MesoResult& meso,
                               const RunConfig& config) {
    fs::create_directories(dir);
    const fs::path base(dir);

    ojson entries = ojson::array();
    for (const auto& f : meso.fields) {
        const std::string name = "field_" + std::to_string(f.id) + ".json";
        write_file_atomic((base / name).string(), field_json(store, f).dump(2) + "\n");
        entries.push_back({{"id", f.id},
                           {"file", name},
                           {"size", f.members.size()},
                           {"label_generic", store.label(f.label_generic)},
                           {"label_specific", store.label(f.label_specific)}});
    }
    ojson index = {{"window", ojson::array({meso.params.window.y1, meso.params.window.y2})},
                   {"alpha", meso.params.alpha},
                   {"threshold", meso.params.threshold},
                   {"k", config.k},
                   {"edge_rule", std::string(to_string(config.edge_rule))},
                   {"growth_basis", std::string(to_string(config.growth_basis))},
                   {"overlap_boundary", config.convention == PeriodConvention::shared_boundary},
                   {"graph", {{"nodes", meso.graph.node_count()},
                              {"edges", meso.graph.edge_count()},
                              {"clamped", meso.graph.clamped_pairs()}}},
                   {"fields", std::move(entries)},
                   {"provenance", {{"tool", "fieldmap"},
                                   {"store", config.store_path},
                                   {"store_fingerprint", store_fingerprint(store)}}}};

    write_file_atomic((base / "communities.json").string(),
                      communities_json(store, meso.communities).dump(2) + "\n");
    write_file_atomic((base / "graph_edges.csv").string(), edge_list_csv(store, meso.graph));
    write_file_atomic((base / "graph.graphml").string(), lexical_graph_graphml(store, meso.graph));
    const std::string index_path = (base / "index.json").string();
    write_file_atomic(index_path, index.dump(2) + "\n");
    return index_path;
}

LoadedFields load_fields(const CorpusStore& store, const std::string& index_path) {
    fs::path path(index_path);
    if (fs::is_directory(path)) path /= "index.json";
    ojson index;
    try {
        index = ojson::parse(read_file(path.string()));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::input, path.string() + ": invalid JSON: " + e.what());
    }
    LoadedFields out;
    try {
        out.window = {index.at("window").at(0).get<int>(), index.at("window").at(1).get<int>()};
        for (const auto& entry : index.at("fields")) {
            const fs::path file = path.parent_path() / entry.at("file").get<std::string>();
            ojson doc;
            try {
                doc = ojson::parse(read_file(file.string()));
            } catch (const nlohmann::json::parse_error& e) {
                throw Error(ErrorKind::input, file.string() + ": invalid JSON: " + e.what());
            }
            out.fields.push_back(field_from_json(store, doc));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::input, path.string() + ": malformed index: " + e.what());
    }
    return out;
}

std::string macro_map_document(const MacroMap& map) { return macro_map_json(map).dump(2) + "\n"; }

void write_macro_outputs(const std::string& dir, const MacroMap& map) {
    fs::create_directories(dir);
    const fs::path base(dir);
    write_file_atomic((base / "macromap.json").string(), macro_map_document(map));
    write_file_atomic((base / "macromap.graphml").string(), macro_map_graphml(map));
    write_file_atomic((base / "macromap.dot").string(), macro_map_dot(map));
}

std::vector<SweepRow> run_sweep(const CorpusStore& store, const RunConfig& base,
                                const std::vector<double>& alphas, const std::vector<double>& thresholds,
                                const std::vector<std::size_t>& ks) {
    std::vector<SweepRow> rows;
    if (alphas.empty() || thresholds.empty() || ks.empty()) return rows;
    const TimeWindow window = base.resolve_window(store);
    const WindowCounts counts = store.window_counts(window);

    for (double alpha : alphas) {
        for (double s : thresholds) {
            const ProximityParams params{alpha, s, window};
            params.validate();
            const LexicalGraph graph = build_lexical_graph(counts, params, base.edge_rule);
            for (std::size_t k : ks) {
                SweepRow row{alpha, s, k, 0, 0, 0, {}};
                try {
                    const auto communities = k_clique_communities(graph, {k, base.edge_rule, base.budget});
                    std::map<TermId, std::size_t> membership;
                    for (const auto& c : communities)
                        for (TermId t : c.members) ++membership[t];
                    row.fields = communities.size();
                    row.covered_terms = membership.size();
                    row.overlap_terms = static_cast<std::size_t>(std::count_if(
                        membership.begin(), membership.end(), [](const auto& kv) { return kv.second >= 2; }));
                } catch (const ResourceError& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "alpha,threshold,k,fields,covered_terms,overlap_terms,error\n";
    for (const auto& r : rows) {
        out += format_number(r.alpha) + "," + format_number(r.threshold) + "," + std::to_string(r.k) + "," +
               std::to_string(r.fields) + "," + std::to_string(r.covered_terms) + "," +
               std::to_string(r.overlap_terms) + "," + csv_escape(r.error) + "\n";
    }
    return out;
}

}  // namespace fieldmap
