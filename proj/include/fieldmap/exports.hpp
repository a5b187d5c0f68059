#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fieldmap/cliques.hpp"
#include "fieldmap/corpus.hpp"
#include "fieldmap/fields.hpp"
#include "fieldmap/macromap.hpp"
#include "fieldmap/proximity.hpp"

namespace fieldmap {

using ojson = nlohmann::ordered_json;

/// Shortest decimal representation that round-trips.
std::string format_number(double value);
std::string xml_escape(std::string_view text);

/// {term, alpha, s, window:[y1,y2], neighbors:[{label, value}]}
ojson neighbors_json(const CorpusStore& store, TermId term, const ProximityParams& params,
                     const std::vector<ProximityValue>& ranked);

/// {communities:[{id, members:[labels...]}]}
ojson communities_json(const CorpusStore& store, const std::vector<Community>& communities);

std::string edge_list_csv(const CorpusStore& store, const LexicalGraph& graph);
std::string lexical_graph_graphml(const CorpusStore& store, const LexicalGraph& graph);

/// {id, window:[y1,y2], alpha, members:[{label, i_s, i_g, intra_weight,
/// growth}], label_generic, label_specific, orientation}
ojson field_json(const CorpusStore& store, const ParadigmaticField& field);
/// Inverse of field_json; labels are resolved against the store.
ParadigmaticField field_from_json(const CorpusStore& store, const ojson& doc);

ojson macro_map_json(const MacroMap& map);
std::string macro_map_graphml(const MacroMap& map);
std::string macro_map_dot(const MacroMap& map);

/// Writes through a temporary file in the same directory and renames it
/// into place.
void write_file_atomic(const std::string& path, std::string_view content);
std::string read_file(const std::string& path);

}  // namespace fieldmap
