#include "fieldmap/proximity.hpp"

#include <algorithm>
#include <cmath>

#include "fieldmap/error.hpp"

namespace fieldmap {

void ProximityParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw ParameterError("alpha must be a finite positive real, got " + std::to_string(alpha));
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ParameterError("threshold must lie in [0, 1], got " + std::to_string(threshold));
    if (window.y1 > window.y2) throw RangeError("window " + to_string(window) + " has y1 > y2");
}

ProximityParams dual_params(const ProximityParams& params) {
    ProximityParams dual = params;
    dual.alpha = 1.0 / params.alpha;
    return dual;
}

double paradigmatic_proximity(Count n_ij, Count n_i, Count n_j, double alpha, bool* clamped) {
    if (clamped) *clamped = false;
    if (n_ij == 0) return 0.0;

    // log of each ratio; ratios >= 1 contribute exactly zero
    auto log_ratio = [&](Count denominator) {
        if (n_ij >= denominator) {
            if (n_ij > denominator && clamped) *clamped = true;
            return 0.0;
        }
        return std::log(static_cast<double>(n_ij) / static_cast<double>(denominator));
    };
    const double log_i = log_ratio(n_i);
    const double log_j = log_ratio(n_j);
    if (log_i == 0.0 && log_j == 0.0) return 1.0;
    return std::exp(alpha * log_i + log_j / alpha);
}

namespace {

Count require_occurrences(const WindowCounts& counts, const CorpusStore& store, TermId t) {
    Count n = counts.occurrences(t);
    if (n == 0) throw UndefinedTermError(t.index(), store.label(t), "window " + to_string(counts.window()));
    return n;
}

WindowCounts counts_for(const CorpusStore& store, const ProximityParams& params) {
    params.validate();
    return store.window_counts(params.window);
}

}  // namespace

ProximityValue proximity(const WindowCounts& counts, const CorpusStore& store, TermId i, TermId j,
                         double alpha) {
    const Count n_i = require_occurrences(counts, store, i);
    const Count n_j = require_occurrences(counts, store, j);
    if (i == j) return {i, j, 1.0, false};
    ProximityValue v{i, j, 0.0, false};
    v.value = paradigmatic_proximity(counts.cooccurrences(i, j), n_i, n_j, alpha, &v.clamped);
    return v;
}

ProximityValue proximity(const CorpusStore& store, TermId i, TermId j, const ProximityParams& params) {
    return proximity(counts_for(store, params), store, i, j, params.alpha);
}

std::vector<ProximityValue> proximity_row(const WindowCounts& counts, const CorpusStore& store,
                                          TermId i, double alpha) {
    const Count n_i = require_occurrences(counts, store, i);
    std::vector<ProximityValue> row;
    for (const Neighbor& partner : counts.partners(i)) {
        const Count n_j = counts.occurrences(partner.term);
        if (n_j == 0) continue;  // partner only reachable through lenient data
        ProximityValue v{i, partner.term, 0.0, false};
        v.value = paradigmatic_proximity(partner.count, n_i, n_j, alpha, &v.clamped);
        row.push_back(v);
    }
    return row;
}

std::vector<ProximityValue> proximity_row(const CorpusStore& store, TermId i,
                                          const ProximityParams& params) {
    return proximity_row(counts_for(store, params), store, i, params.alpha);
}

std::vector<ProximityValue> ranked_neighborhood(const WindowCounts& counts, const CorpusStore& store,
                                                TermId i, const ProximityParams& params) {
    params.validate();
    std::vector<ProximityValue> out;
    for (const auto& v : proximity_row(counts, store, i, params.alpha))
        if (v.target != i && v.value > params.threshold) out.push_back(v);
    std::stable_sort(out.begin(), out.end(), [](const ProximityValue& l, const ProximityValue& r) {
        return l.value > r.value;
    });
    return out;
}

std::vector<TermId> neighborhood(const WindowCounts& counts, const CorpusStore& store, TermId i,
                                 const ProximityParams& params) {
    params.validate();
    std::vector<TermId> out;
    for (const auto& v : proximity_row(counts, store, i, params.alpha))
        if (v.target != i && v.value > params.threshold) out.push_back(v.target);
    return out;
}

std::vector<TermId> neighborhood(const CorpusStore& store, TermId i, const ProximityParams& params) {
    return neighborhood(counts_for(store, params), store, i, params);
}

}  // namespace fieldmap
