#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fieldmap/corpus.hpp"
#include "fieldmap/fields.hpp"

namespace fieldmap {

/// Share of all occurrences in the window taken by term i. Throws
/// DegenerateWindowError when the window holds no occurrences at all.
double normalized_share(const WindowCounts& counts, TermId i);
double normalized_share(const CorpusStore& store, TermId i, const TimeWindow& window);

struct ActivityResult {
    double value = 0.0;         // mean of p_i(T) / p_i(T-) over members with a defined ratio
    std::size_t excluded = 0;   // members with zero share in the previous period
};

/// Average increase of normalized occurrence shares between the previous
/// period and T. Members with zero previous share are left out of the mean
/// and tallied in `excluded`; if no member remains, DegenerateWindowError.
ActivityResult field_activity(const WindowCounts& current, const WindowCounts& previous,
                              std::span<const TermId> field);
ActivityResult field_activity(const CorpusStore& store, std::span<const TermId> field,
                              const TimeWindow& window,
                              PeriodConvention convention = PeriodConvention::adjacent);

struct SizeFilter {
    std::size_t min_terms = 6;
    std::size_t max_terms = 20;

    bool admits(std::size_t n) const { return n >= min_terms && n <= max_terms; }
    void validate() const;
};

SizeFilter parse_filter(std::string_view text);  // "MIN:MAX"

struct MacroNode {
    std::size_t field_id = 0;
    std::size_t size = 0;        // member count
    double size_raw = 0.0;       // mean normalized share of the members
    double size_display = 1.0;   // 1 + log_base(size_raw / smallest size_raw)
    std::optional<double> activity;
    std::size_t activity_excluded = 0;
    std::string label;
};

struct MacroEdge {
    std::size_t field_a = 0;
    std::size_t field_b = 0;
    std::size_t weight = 0;      // number of shared terms
};

struct MacroMap {
    std::vector<MacroNode> nodes;  // ascending field id
    std::vector<MacroEdge> edges;  // ascending (field_a, field_b), field_a < field_b
    TimeWindow window;
    SizeFilter filter;
    double log_base = 10.0;
};

struct MacroOptions {
    SizeFilter filter;
    double log_base = 10.0;
    PeriodConvention convention = PeriodConvention::adjacent;
};

/// Keeps fields with min_terms <= size <= max_terms, links every surviving
/// pair that shares at least one term. Activity is left undefined when the
/// previous period is outside the corpus or no member has a previous share.
MacroMap build_macro_map(std::span<const ParadigmaticField> fields, const CorpusStore& store,
                         const TimeWindow& window, const MacroOptions& options = {});

}  // namespace fieldmap
