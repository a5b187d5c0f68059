#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fieldmap/cliques.hpp"
#include "fieldmap/corpus.hpp"
#include "fieldmap/exports.hpp"
#include "fieldmap/fields.hpp"
#include "fieldmap/macromap.hpp"
#include "fieldmap/proximity.hpp"

namespace fieldmap {

/// Everything a batch run needs. Unset window means the full corpus range.
struct RunConfig {
    std::string occurrences_path;
    std::string cooccurrences_path;
    std::string store_path;
    std::string fields_path;
    std::string output_dir;
    std::optional<TimeWindow> window;
    double alpha = 1.0;
    std::optional<double> threshold;
    std::size_t k = 3;
    EdgeRule edge_rule = EdgeRule::any;
    SizeFilter filter;
    GrowthBasis growth_basis = GrowthBasis::occurrences;
    PeriodConvention convention = PeriodConvention::adjacent;
    double log_base = 10.0;
    Validation validation = Validation::lenient;
    std::size_t budget = default_clique_budget;

    TimeWindow resolve_window(const CorpusStore& store) const;
    /// Throws ParameterError when no threshold was given.
    ProximityParams proximity_params(const CorpusStore& store) const;
    CpmParams cpm_params() const { return {k, edge_rule, budget}; }
    MacroOptions macro_options() const { return {filter, log_base, convention}; }
};

/// Applies one `key = value` setting. Unknown keys throw ParameterError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a key=value file (`#` comments, optional quotes around values).
void apply_config_file(RunConfig& config, const std::string& path);

struct MesoResult {
    ProximityParams params;
    LexicalGraph graph;
    std::vector<Community> communities;
    std::vector<ParadigmaticField> fields;
};

/// Lexical graph, k-clique percolation, and field profiles.
MesoResult run_meso(const CorpusStore& store, const RunConfig& config);
MacroMap run_macro(const CorpusStore& store, const std::vector<ParadigmaticField>& fields,
                   const RunConfig& config);

/// Writes one JSON per field, an index, the community list and the lexical
/// graph (edge list CSV and GraphML) into `dir`. Returns the index path.
std::string write_meso_outputs(const std::string& dir, const CorpusStore& store,
                               const MesoResult& meso, const RunConfig& config);

struct LoadedFields {
    TimeWindow window;
    std::vector<ParadigmaticField> fields;
};

/// Reads an index written by write_meso_outputs (or the directory holding it).
LoadedFields load_fields(const CorpusStore& store, const std::string& index_path);

/// Serialized map, identical to what the query service returns.
std::string macro_map_document(const MacroMap& map);
void write_macro_outputs(const std::string& dir, const MacroMap& map);

struct SweepRow {
    double alpha = 0.0;
    double threshold = 0.0;
    std::size_t k = 0;
    std::size_t fields = 0;
    std::size_t covered_terms = 0;   // terms in at least one field
    std::size_t overlap_terms = 0;   // terms in two or more fields
    std::string error;               // non-empty when the cell failed
};

/// One row per (alpha, s, k) combination in list order. Budget failures are
/// recorded in the row instead of aborting the sweep.
std::vector<SweepRow> run_sweep(const CorpusStore& store, const RunConfig& base,
                                const std::vector<double>& alphas, const std::vector<double>& thresholds,
                                const std::vector<std::size_t>& ks);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace fieldmap
