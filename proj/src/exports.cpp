#include "fieldmap/exports.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fieldmap/error.hpp"

namespace fieldmap {

std::string format_number(double value) {
    if (!std::isfinite(value)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

std::string dot_quote(std::string_view text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

ojson window_json(const TimeWindow& w) { return ojson::array({w.y1, w.y2}); }

ojson optional_number(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? ojson(*v) : ojson(nullptr);
}

}  // namespace

ojson neighbors_json(const CorpusStore& store, TermId term, const ProximityParams& params,
                     const std::vector<ProximityValue>& ranked) {
    ojson neighbors = ojson::array();
    for (const auto& v : ranked) neighbors.push_back({{"label", store.label(v.target)}, {"value", v.value}});
    return {{"term", store.label(term)},
            {"alpha", params.alpha},
            {"s", params.threshold},
            {"window", window_json(params.window)},
            {"neighbors", std::move(neighbors)}};
}

ojson communities_json(const CorpusStore& store, const std::vector<Community>& communities) {
    ojson list = ojson::array();
    for (const auto& c : communities) {
        ojson members = ojson::array();
        for (TermId t : c.members) members.push_back(store.label(t));
        list.push_back({{"id", c.id}, {"members", std::move(members)}});
    }
    return {{"communities", std::move(list)}};
}

std::string edge_list_csv(const CorpusStore& store, const LexicalGraph& graph) {
    std::string out = "term_a,term_b\n";
    for (const auto& [a, b] : graph.edges())
        out += csv_escape(store.label(a)) + "," + csv_escape(store.label(b)) + "\n";
    return out;
}

std::string lexical_graph_graphml(const CorpusStore& store, const LexicalGraph& graph) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <graph id=\"lexical\" edgedefault=\"undirected\">\n";
    for (TermId t : graph.nodes()) {
        out << "    <node id=\"t" << t.value << "\"><data key=\"label\">" << xml_escape(store.label(t))
            << "</data></node>\n";
    }
    std::size_t e = 0;
    for (const auto& [a, b] : graph.edges())
        out << "    <edge id=\"e" << e++ << "\" source=\"t" << a.value << "\" target=\"t" << b.value << "\"/>\n";
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

ojson field_json(const CorpusStore& store, const ParadigmaticField& field) {
    ojson members = ojson::array();
    for (const auto& m : field.members) {
        members.push_back({{"label", store.label(m.term)},
                           {"i_s", m.specificity},
                           {"i_g", m.genericity},
                           {"intra_weight", m.intra_weight},
                           {"growth", optional_number(m.growth)}});
    }
    return {{"id", field.id},
            {"window", window_json(field.window)},
            {"alpha", field.alpha},
            {"members", std::move(members)},
            {"label_generic", store.label(field.label_generic)},
            {"label_specific", store.label(field.label_specific)},
            {"orientation", {{"i_s", "decreases left to right"}, {"i_g", "decreases top to bottom"}}}};
}

ParadigmaticField field_from_json(const CorpusStore& store, const ojson& doc) {
    try {
        ParadigmaticField f;
        f.id = doc.at("id").get<std::size_t>();
        f.window = {doc.at("window").at(0).get<int>(), doc.at("window").at(1).get<int>()};
        f.alpha = doc.at("alpha").get<double>();
        for (const auto& m : doc.at("members")) {
            TermFieldProfile p;
            p.term = store.require(m.at("label").get<std::string>());
            p.specificity = m.at("i_s").get<double>();
            p.genericity = m.at("i_g").get<double>();
            p.intra_weight = m.at("intra_weight").get<Count>();
            if (!m.at("growth").is_null()) p.growth = m.at("growth").get<double>();
            f.members.push_back(p);
        }
        std::sort(f.members.begin(), f.members.end(),
                  [](const TermFieldProfile& l, const TermFieldProfile& r) { return l.term < r.term; });
        f.label_generic = store.require(doc.at("label_generic").get<std::string>());
        f.label_specific = store.require(doc.at("label_specific").get<std::string>());
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::input, std::string("malformed field document: ") + e.what());
    }
}

ojson macro_map_json(const MacroMap& map) {
    ojson nodes = ojson::array();
    for (const auto& n : map.nodes) {
        nodes.push_back({{"field_id", n.field_id},
                         {"size", n.size},
                         {"size_raw", n.size_raw},
                         {"size_display", n.size_display},
                         {"activity", optional_number(n.activity)},
                         {"activity_excluded", n.activity_excluded},
                         {"label", n.label}});
    }
    ojson edges = ojson::array();
    for (const auto& e : map.edges)
        edges.push_back({{"field_a", e.field_a}, {"field_b", e.field_b}, {"weight", e.weight}});
    return {{"window", window_json(map.window)},
            {"filter", ojson::array({map.filter.min_terms, map.filter.max_terms})},
            {"log_base", map.log_base},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

std::string macro_map_graphml(const MacroMap& map) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
        << "  <key id=\"size_display\" for=\"node\" attr.name=\"size_display\" attr.type=\"double\"/>\n"
        << "  <key id=\"activity\" for=\"node\" attr.name=\"activity\" attr.type=\"double\"/>\n"
        << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"int\"/>\n"
        << "  <graph id=\"macro\" edgedefault=\"undirected\">\n";
    for (const auto& n : map.nodes) {
        out << "    <node id=\"f" << n.field_id << "\">\n"
            << "      <data key=\"label\">" << xml_escape(n.label) << "</data>\n"
            << "      <data key=\"size_display\">" << format_number(n.size_display) << "</data>\n";
        if (n.activity) out << "      <data key=\"activity\">" << format_number(*n.activity) << "</data>\n";
        out << "    </node>\n";
    }
    std::size_t id = 0;
    for (const auto& e : map.edges) {
        out << "    <edge id=\"e" << id++ << "\" source=\"f" << e.field_a << "\" target=\"f" << e.field_b
            << "\">\n      <data key=\"weight\">" << e.weight << "</data>\n    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

std::string macro_map_dot(const MacroMap& map) {
    std::ostringstream out;
    out << "graph macromap {\n  node [shape=circle, style=filled, fixedsize=false];\n";
    for (const auto& n : map.nodes) {
        out << "  f" << n.field_id << " [label=" << dot_quote(n.label)
            << ", width=" << format_number(n.size_display)
            << ", fillcolor=" << dot_quote(growth_color(n.activity)) << "];\n";
    }
    for (const auto& e : map.edges) {
        out << "  f" << e.field_a << " -- f" << e.field_b << " [weight=" << e.weight
            << ", penwidth=" << e.weight << "];\n";
    }
    out << "}\n";
    return out.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::input, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorKind::input, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::input, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace fieldmap
