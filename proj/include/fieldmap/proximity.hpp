#pragma once

#include <vector>

#include "fieldmap/corpus.hpp"

namespace fieldmap {

struct ProximityParams {
    double alpha = 1.0;      // focus parameter, > 0
    double threshold = 0.0;  // s in [0, 1]
    TimeWindow window;

    /// Throws ParameterError on alpha <= 0 (or non-finite) or s outside [0, 1].
    void validate() const;
};

struct ProximityValue {
    TermId source;
    TermId target;
    double value = 0.0;
    bool clamped = false;  // a count ratio exceeded 1 and was clamped
};

/// (n_ij / n_i)^alpha * (n_ij / n_j)^(1/alpha) on raw counts.
/// Exactly 0 when n_ij == 0 and exactly 1 when both ratios are 1. Ratios above
/// one (possible with leniently validated data) are clamped to one and
/// reported through `clamped`. Requires n_i > 0 and n_j > 0.
double paradigmatic_proximity(Count n_ij, Count n_i, Count n_j, double alpha,
                              bool* clamped = nullptr);

ProximityValue proximity(const WindowCounts& counts, const CorpusStore& store, TermId i, TermId j,
                         double alpha);
ProximityValue proximity(const CorpusStore& store, TermId i, TermId j, const ProximityParams& params);

/// One entry per partner j with N_ij > 0 and N_j > 0, ascending by target id.
std::vector<ProximityValue> proximity_row(const WindowCounts& counts, const CorpusStore& store,
                                          TermId i, double alpha);
std::vector<ProximityValue> proximity_row(const CorpusStore& store, TermId i,
                                          const ProximityParams& params);

/// { j != i : P(i, j) > s }, ascending by id.
std::vector<TermId> neighborhood(const WindowCounts& counts, const CorpusStore& store, TermId i,
                                 const ProximityParams& params);
std::vector<TermId> neighborhood(const CorpusStore& store, TermId i, const ProximityParams& params);

/// Neighborhood with values, sorted by descending value then ascending id.
std::vector<ProximityValue> ranked_neighborhood(const WindowCounts& counts, const CorpusStore& store,
                                                TermId i, const ProximityParams& params);

/// Same parameters with alpha replaced by 1/alpha.
ProximityParams dual_params(const ProximityParams& params);

}  // namespace fieldmap
