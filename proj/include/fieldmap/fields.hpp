#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldmap/cliques.hpp"
#include "fieldmap/corpus.hpp"
#include "fieldmap/proximity.hpp"

namespace fieldmap {

/// How the period preceding a window T is chosen.
enum class PeriodConvention {
    adjacent,         // [y1 - L, y1 - 1], the equal-length window just before T
    shared_boundary   // [y1 - L + 1, y1], overlapping T in its first year
};

/// Equal-length window preceding `w`. Not range-checked.
TimeWindow previous_window(const TimeWindow& w, PeriodConvention convention);

enum class GrowthBasis {
    occurrences,          // corpus-wide N_w
    intra_cooccurrences   // co-occurrences of w with the other field members
};

GrowthBasis parse_growth_basis(std::string_view text);
std::string_view to_string(GrowthBasis basis);

struct TermFieldProfile {
    TermId term;
    double specificity = 0.0;  // i_s
    double genericity = 0.0;   // i_g
    Count intra_weight = 0;
    std::optional<double> growth;
};

struct ParadigmaticField {
    std::size_t id = 0;
    std::vector<TermFieldProfile> members;  // ascending by term id
    TimeWindow window;
    double alpha = 1.0;
    TermId label_generic;
    TermId label_specific;

    std::vector<TermId> member_ids() const;
};

/// Mean over w' in C (w itself included) of P(w', w).
double specificity_index(const WindowCounts& counts, const CorpusStore& store,
                         std::span<const TermId> field, TermId w, double alpha);
/// Mean over w' in C (w itself included) of P(w, w').
double genericity_index(const WindowCounts& counts, const CorpusStore& store,
                        std::span<const TermId> field, TermId w, double alpha);

double specificity_index(const CorpusStore& store, const Community& c, TermId w,
                         const ProximityParams& params);
double genericity_index(const CorpusStore& store, const Community& c, TermId w,
                        const ProximityParams& params);

/// Sum of window co-occurrence counts of w with every other member.
Count intra_weight(const WindowCounts& counts, std::span<const TermId> field, TermId w);

struct GrowthOptions {
    PeriodConvention convention = PeriodConvention::adjacent;
    GrowthBasis basis = GrowthBasis::occurrences;
};

/// Ratio of the current to the previous period's count, nullopt when the
/// previous count is zero. Throws RangeError when the previous period does
/// not fit in the corpus.
std::optional<double> term_growth(const CorpusStore& store, std::span<const TermId> field, TermId w,
                                  const TimeWindow& window, const GrowthOptions& options = {});

/// Profiles every member and picks the labels: label_generic has the
/// largest i_g, label_specific the largest i_s; ties go to the larger
/// intra_weight, then to the smaller label. When the previous period does
/// not fit in the corpus every growth value is left undefined.
ParadigmaticField build_field(const CorpusStore& store, const Community& community,
                              const ProximityParams& params, const GrowthOptions& options = {});
/// Variant reusing aggregated counts; `previous` may be null.
ParadigmaticField build_field(const CorpusStore& store, const WindowCounts& current,
                              const WindowCounts* previous, const Community& community, double alpha,
                              GrowthBasis basis = GrowthBasis::occurrences);

/// Display color of a growth ratio: >= 2.5 full red, 1 white, < 1 toward
/// blue (0 is full blue), undefined neutral grey. Returns "#rrggbb".
std::string growth_color(std::optional<double> ratio);
inline constexpr double full_red_growth = 2.5;
inline constexpr std::string_view neutral_color = "#cccccc";

}  // namespace fieldmap
