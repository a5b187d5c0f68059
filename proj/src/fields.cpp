#include "fieldmap/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fieldmap/error.hpp"

namespace fieldmap {

TimeWindow previous_window(const TimeWindow& w, PeriodConvention convention) {
    const int len = w.length();
    if (convention == PeriodConvention::shared_boundary) return {w.y1 - len + 1, w.y1};
    return {w.y1 - len, w.y1 - 1};
}

GrowthBasis parse_growth_basis(std::string_view text) {
    if (text == "occurrences") return GrowthBasis::occurrences;
    if (text == "intra_cooccurrences") return GrowthBasis::intra_cooccurrences;
    throw ParameterError("growth basis must be occurrences or intra_cooccurrences, got '" +
                         std::string(text) + "'");
}

std::string_view to_string(GrowthBasis basis) {
    return basis == GrowthBasis::occurrences ? "occurrences" : "intra_cooccurrences";
}

std::vector<TermId> ParadigmaticField::member_ids() const {
    std::vector<TermId> ids;
    ids.reserve(members.size());
    for (const auto& m : members) ids.push_back(m.term);
    return ids;
}

namespace {

void require_member(std::span<const TermId> field, TermId w) {
    if (std::find(field.begin(), field.end(), w) == field.end())
        throw ParameterError("term " + std::to_string(w.value) + " is not a member of the field");
}

void require_defined(const WindowCounts& counts, const CorpusStore& store, std::span<const TermId> field) {
    for (TermId m : field) {
        if (counts.occurrences(m) == 0)
            throw UndefinedTermError(m.index(), store.label(m),
                                     "window " + to_string(counts.window()) + " (field member)");
    }
}

// The self term contributes exactly 1 and is added last so that members with
// identical counts get bit-identical indexes.
template <typename Direction>
double mean_proximity(const WindowCounts& counts, const CorpusStore& store,
                      std::span<const TermId> field, TermId w, Direction direction) {
    require_member(field, w);
    require_defined(counts, store, field);
    double sum = 0.0;
    for (TermId other : field) {
        if (other == w) continue;
        sum += direction(other);
    }
    return (sum + 1.0) / static_cast<double>(field.size());
}

}  // namespace

double specificity_index(const WindowCounts& counts, const CorpusStore& store,
                         std::span<const TermId> field, TermId w, double alpha) {
    return mean_proximity(counts, store, field, w, [&](TermId other) {
        return paradigmatic_proximity(counts.cooccurrences(other, w), counts.occurrences(other),
                                      counts.occurrences(w), alpha);
    });
}

double genericity_index(const WindowCounts& counts, const CorpusStore& store,
                        std::span<const TermId> field, TermId w, double alpha) {
    return mean_proximity(counts, store, field, w, [&](TermId other) {
        return paradigmatic_proximity(counts.cooccurrences(w, other), counts.occurrences(w),
                                      counts.occurrences(other), alpha);
    });
}

double specificity_index(const CorpusStore& store, const Community& c, TermId w,
                         const ProximityParams& params) {
    params.validate();
    return specificity_index(store.window_counts(params.window), store, c.members, w, params.alpha);
}

double genericity_index(const CorpusStore& store, const Community& c, TermId w,
                        const ProximityParams& params) {
    params.validate();
    return genericity_index(store.window_counts(params.window), store, c.members, w, params.alpha);
}

Count intra_weight(const WindowCounts& counts, std::span<const TermId> field, TermId w) {
    Count total = 0;
    for (TermId other : field)
        if (other != w) total += counts.cooccurrences(w, other);
    return total;
}

namespace {

std::optional<double> growth_ratio(const WindowCounts& current, const WindowCounts& previous,
                                   std::span<const TermId> field, TermId w, GrowthBasis basis) {
    const Count now = basis == GrowthBasis::occurrences ? current.occurrences(w)
                                                        : intra_weight(current, field, w);
    const Count before = basis == GrowthBasis::occurrences ? previous.occurrences(w)
                                                           : intra_weight(previous, field, w);
    if (before == 0) return std::nullopt;
    return static_cast<double>(now) / static_cast<double>(before);
}

}  // namespace

std::optional<double> term_growth(const CorpusStore& store, std::span<const TermId> field, TermId w,
                                  const TimeWindow& window, const GrowthOptions& options) {
    const TimeWindow prev = previous_window(window, options.convention);
    store.check_window(window);
    store.check_window(prev);
    return growth_ratio(store.window_counts(window), store.window_counts(prev), field, w, options.basis);
}

ParadigmaticField build_field(const CorpusStore& store, const WindowCounts& current,
                              const WindowCounts* previous, const Community& community, double alpha,
                              GrowthBasis basis) {
    if (community.members.empty()) throw ParameterError("cannot build a field from an empty community");
    std::span<const TermId> field(community.members);

    ParadigmaticField out;
    out.id = community.id;
    out.window = current.window();
    out.alpha = alpha;
    for (TermId w : field) {
        TermFieldProfile p;
        p.term = w;
        p.specificity = specificity_index(current, store, field, w, alpha);
        p.genericity = genericity_index(current, store, field, w, alpha);
        p.intra_weight = intra_weight(current, field, w);
        if (previous) p.growth = growth_ratio(current, *previous, field, w, basis);
        out.members.push_back(p);
    }
    std::sort(out.members.begin(), out.members.end(),
              [](const TermFieldProfile& l, const TermFieldProfile& r) { return l.term < r.term; });

    auto pick = [&](auto index) {
        const TermFieldProfile* best = &out.members.front();
        for (const auto& m : out.members) {
            const double a = index(m);
            const double b = index(*best);
            if (a > b) best = &m;
            else if (a == b) {
                if (m.intra_weight > best->intra_weight ||
                    (m.intra_weight == best->intra_weight && store.label(m.term) < store.label(best->term)))
                    best = &m;
            }
        }
        return best->term;
    };
    out.label_generic = pick([](const TermFieldProfile& m) { return m.genericity; });
    out.label_specific = pick([](const TermFieldProfile& m) { return m.specificity; });
    return out;
}

ParadigmaticField build_field(const CorpusStore& store, const Community& community,
                              const ProximityParams& params, const GrowthOptions& options) {
    params.validate();
    const WindowCounts current = store.window_counts(params.window);
    const TimeWindow prev = previous_window(params.window, options.convention);
    if (prev.y1 < store.first_year()) return build_field(store, current, nullptr, community, params.alpha, options.basis);
    const WindowCounts previous = store.window_counts(prev);
    return build_field(store, current, &previous, community, params.alpha, options.basis);
}

std::string growth_color(std::optional<double> ratio) {
    if (!ratio || !std::isfinite(*ratio)) return std::string(neutral_color);
    struct Rgb { double r, g, b; };
    constexpr Rgb white{255, 255, 255};
    constexpr Rgb red{178, 24, 43};
    constexpr Rgb blue{33, 102, 172};
    Rgb target = white;
    double t = 0.0;
    if (*ratio >= 1.0) {
        target = red;
        t = std::min((*ratio - 1.0) / (full_red_growth - 1.0), 1.0);
    } else {
        target = blue;
        t = std::min(1.0 - std::max(*ratio, 0.0), 1.0);
    }
    auto mix = [&](double from, double to) {
        return static_cast<int>(std::lround(from + (to - from) * t));
    };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(white.r, target.r), mix(white.g, target.g),
                  mix(white.b, target.b));
    return buf;
}

}  // namespace fieldmap
