#include "fieldmap/macromap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "fieldmap/error.hpp"

namespace fieldmap {

double normalized_share(const WindowCounts& counts, TermId i) {
    if (counts.total() == 0)
        throw DegenerateWindowError("window " + to_string(counts.window()) + " holds no occurrences");
    return static_cast<double>(counts.occurrences(i)) / static_cast<double>(counts.total());
}

double normalized_share(const CorpusStore& store, TermId i, const TimeWindow& window) {
    return normalized_share(store.window_counts(window), i);
}

ActivityResult field_activity(const WindowCounts& current, const WindowCounts& previous,
                              std::span<const TermId> field) {
    if (current.total() == 0 || previous.total() == 0) {
        throw DegenerateWindowError("activity needs occurrences in both " + to_string(current.window()) +
                                    " and " + to_string(previous.window()));
    }
    ActivityResult result;
    double sum = 0.0;
    std::size_t used = 0;
    for (TermId t : field) {
        const double before = normalized_share(previous, t);
        if (before == 0.0) {
            ++result.excluded;
            continue;
        }
        sum += normalized_share(current, t) / before;
        ++used;
    }
    if (used == 0) {
        throw DegenerateWindowError("activity undefined: no field member occurs in " +
                                    to_string(previous.window()));
    }
    result.value = sum / static_cast<double>(used);
    return result;
}

ActivityResult field_activity(const CorpusStore& store, std::span<const TermId> field,
                              const TimeWindow& window, PeriodConvention convention) {
    const TimeWindow prev = previous_window(window, convention);
    store.check_window(window);
    store.check_window(prev);
    return field_activity(store.window_counts(window), store.window_counts(prev), field);
}

void SizeFilter::validate() const {
    if (min_terms > max_terms) {
        throw ParameterError("size filter min " + std::to_string(min_terms) + " exceeds max " +
                             std::to_string(max_terms));
    }
}

SizeFilter parse_filter(std::string_view text) {
    auto colon = text.find(':');
    SizeFilter f;
    auto parse = [](std::string_view s, std::size_t& v) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
    };
    if (colon == std::string_view::npos || !parse(text.substr(0, colon), f.min_terms) ||
        !parse(text.substr(colon + 1), f.max_terms)) {
        throw ParameterError("invalid filter '" + std::string(text) + "' (expected MIN:MAX)");
    }
    f.validate();
    return f;
}

MacroMap build_macro_map(std::span<const ParadigmaticField> fields, const CorpusStore& store,
                         const TimeWindow& window, const MacroOptions& options) {
    options.filter.validate();
    if (!(options.log_base > 1.0) || !std::isfinite(options.log_base))
        throw ParameterError("log base must be a finite real > 1");

    MacroMap map;
    map.window = window;
    map.filter = options.filter;
    map.log_base = options.log_base;
    if (fields.empty()) return map;

    const WindowCounts current = store.window_counts(window);
    const TimeWindow prev_window = previous_window(window, options.convention);
    std::optional<WindowCounts> previous;
    if (prev_window.y1 >= store.first_year()) previous = store.window_counts(prev_window);

    std::vector<const ParadigmaticField*> kept;
    for (const auto& f : fields)
        if (options.filter.admits(f.members.size())) kept.push_back(&f);
    std::sort(kept.begin(), kept.end(),
              [](const ParadigmaticField* l, const ParadigmaticField* r) { return l->id < r->id; });
    for (std::size_t i = 1; i < kept.size(); ++i)
        if (kept[i]->id == kept[i - 1]->id)
            throw ParameterError("duplicate field id " + std::to_string(kept[i]->id));

    for (const ParadigmaticField* f : kept) {
        MacroNode node;
        node.field_id = f->id;
        node.size = f->members.size();
        node.label = store.label(f->label_generic);
        const auto ids = f->member_ids();
        double share_sum = 0.0;
        for (TermId t : ids) share_sum += normalized_share(current, t);
        node.size_raw = share_sum / static_cast<double>(ids.size());
        if (previous) {
            try {
                auto activity = field_activity(current, *previous, ids);
                node.activity = activity.value;
                node.activity_excluded = activity.excluded;
            } catch (const DegenerateWindowError&) {
                node.activity_excluded = ids.size();
            }
        }
        map.nodes.push_back(std::move(node));
    }

    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& n : map.nodes)
        if (n.size_raw > 0.0) smallest = std::min(smallest, n.size_raw);
    for (auto& n : map.nodes) {
        n.size_display = n.size_raw > 0.0 && std::isfinite(smallest)
                             ? 1.0 + std::log(n.size_raw / smallest) / std::log(options.log_base)
                             : 1.0;
        n.size_display = std::max(n.size_display, 1.0);
    }

    for (std::size_t a = 0; a < kept.size(); ++a) {
        const auto ma = kept[a]->member_ids();
        for (std::size_t b = a + 1; b < kept.size(); ++b) {
            const auto mb = kept[b]->member_ids();
            std::vector<TermId> shared;
            std::set_intersection(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(shared));
            if (!shared.empty()) map.edges.push_back({kept[a]->id, kept[b]->id, shared.size()});
        }
    }
    return map;
}

}  // namespace fieldmap
