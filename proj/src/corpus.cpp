#include "fieldmap/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fieldmap/error.hpp"

namespace fieldmap {

using ojson = nlohmann::ordered_json;

struct StoreAccess {
    static CorpusStore make(std::vector<std::string> vocabulary, std::vector<YearCounts> years,
                            std::string provenance) {
        CorpusStore store;
        store.vocabulary_ = std::move(vocabulary);
        store.years_ = std::move(years);
        store.provenance_ = std::move(provenance);
        return store;
    }
};

namespace {

template <typename T>
bool parse_number(std::string_view text, T& value) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

std::string_view strip_bom(std::string_view line) {
    if (line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    return line;
}

// Reads a CSV stream with a fixed header, calling on_row for every data row.
template <typename OnRow>
void read_csv(std::istream& in, const std::string& source, std::string_view expected_header,
              std::size_t columns, OnRow&& on_row) {
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = strip_cr(raw);
        if (!header_seen) {
            line = strip_bom(line);
            if (line.empty()) continue;
            if (line != expected_header) {
                throw ParseError(source, line_no,
                                 "expected header '" + std::string(expected_header) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, line_no, e.what());
        }
        if (fields.size() != columns) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(columns) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        on_row(fields, line_no);
    }
}

int parse_year(const std::string& text, const std::string& source, std::size_t line) {
    int year = 0;
    if (!parse_number(text, year)) throw ParseError(source, line, "invalid year '" + text + "'");
    return year;
}

Count parse_count(const std::string& text, const std::string& source, std::size_t line) {
    Count count = 0;
    if (!parse_number(text, count)) {
        throw ParseError(source, line, "invalid count '" + text + "' (non-negative integer expected)");
    }
    return count;
}

std::string record_origin(std::size_t line) {
    return line ? " (line " + std::to_string(line) + ")" : std::string();
}

std::string require_label(std::string_view raw, std::size_t line) {
    std::string label = normalize_label(raw);
    if (label.empty()) throw ValidationError("empty term label" + record_origin(line));
    return label;
}

}  // namespace

// --- small value types -------------------------------------------------------

std::string to_string(const TimeWindow& w) {
    return std::to_string(w.y1) + ":" + std::to_string(w.y2);
}

TimeWindow parse_window(std::string_view text) {
    auto colon = text.find(':');
    TimeWindow w;
    bool ok = colon == std::string_view::npos
                  ? parse_number(text, w.y1) && (w.y2 = w.y1, true)
                  : parse_number(text.substr(0, colon), w.y1) &&
                        parse_number(text.substr(colon + 1), w.y2);
    if (!ok) throw ParameterError("invalid window '" + std::string(text) + "' (expected Y1:Y2)");
    if (w.y1 > w.y2) throw RangeError("window " + to_string(w) + " has y1 > y2");
    return w;
}

Validation parse_validation(std::string_view text) {
    if (text == "strict") return Validation::strict;
    if (text == "lenient") return Validation::lenient;
    throw ParameterError("validation mode must be strict or lenient, got '" + std::string(text) + "'");
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool field_started_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty() && !field_started_quoted) {
            quoted = true;
            field_started_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            field_started_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted) throw std::invalid_argument("unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// --- YearCounts / WindowCounts ------------------------------------------------

Count YearCounts::occurrence(TermId t) const {
    return t.index() < occurrences.size() ? occurrences[t.index()] : 0;
}

Count YearCounts::cooccurrence(TermId x, TermId y) const {
    TermPair key(x, y);
    auto it = std::lower_bound(cooccurrences.begin(), cooccurrences.end(), key,
                               [](const PairCount& pc, const TermPair& k) { return pc.pair < k; });
    return it != cooccurrences.end() && it->pair == key ? it->count : 0;
}

WindowCounts::WindowCounts(TimeWindow window, std::vector<Count> occurrences,
                           std::vector<PairCount> pairs)
    : window_(window), occurrences_(std::move(occurrences)), pairs_(std::move(pairs)) {
    std::sort(pairs_.begin(), pairs_.end(),
              [](const PairCount& l, const PairCount& r) { return l.pair < r.pair; });
    for (Count c : occurrences_) total_ += c;

    const std::size_t n = occurrences_.size();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& pc : pairs_) {
        ++degree.at(pc.pair.a.index());
        ++degree.at(pc.pair.b.index());
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& pc : pairs_) {
        adjacency_[fill[pc.pair.a.index()]++] = {pc.pair.b, pc.count};
        adjacency_[fill[pc.pair.b.index()]++] = {pc.pair.a, pc.count};
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                  adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]),
                  [](const Neighbor& l, const Neighbor& r) { return l.term < r.term; });
    }
}

std::span<const Neighbor> WindowCounts::partners(TermId t) const {
    const std::size_t i = t.index();
    if (i >= occurrences_.size()) throw std::out_of_range("term id out of range");
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

Count WindowCounts::cooccurrences(TermId x, TermId y) const {
    auto row = partners(x);
    auto it = std::lower_bound(row.begin(), row.end(), y,
                               [](const Neighbor& n, TermId k) { return n.term < k; });
    return it != row.end() && it->term == y ? it->count : 0;
}

// --- CorpusStore --------------------------------------------------------------

std::optional<TermId> CorpusStore::find(std::string_view label) const {
    std::string key = normalize_label(label);
    auto it = std::lower_bound(vocabulary_.begin(), vocabulary_.end(), key);
    if (it == vocabulary_.end() || *it != key) return std::nullopt;
    return TermId(static_cast<std::uint32_t>(it - vocabulary_.begin()));
}

TermId CorpusStore::require(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw UnknownTermError(std::string(label));
}

int CorpusStore::first_year() const {
    if (years_.empty()) throw DegenerateWindowError("corpus has no years");
    return years_.front().year;
}

int CorpusStore::last_year() const {
    if (years_.empty()) throw DegenerateWindowError("corpus has no years");
    return years_.back().year;
}

Count CorpusStore::occurrences(TermId t, int year) const {
    if (years_.empty() || year < first_year() || year > last_year()) return 0;
    return years_[static_cast<std::size_t>(year - first_year())].occurrence(t);
}

Count CorpusStore::cooccurrences(TermId x, TermId y, int year) const {
    if (years_.empty() || year < first_year() || year > last_year()) return 0;
    return years_[static_cast<std::size_t>(year - first_year())].cooccurrence(x, y);
}

std::size_t CorpusStore::pair_count() const {
    std::set<TermPair> pairs;
    for (const auto& y : years_)
        for (const auto& pc : y.cooccurrences) pairs.insert(pc.pair);
    return pairs.size();
}

void CorpusStore::check_window(const TimeWindow& w) const {
    if (w.y1 > w.y2) throw RangeError("window " + to_string(w) + " has y1 > y2");
    if (years_.empty()) throw RangeError("window " + to_string(w) + " requested on an empty corpus");
    if (w.y1 < first_year() || w.y2 > last_year()) {
        throw RangeError("window " + to_string(w) + " outside corpus range " +
                         to_string(full_range()));
    }
}

WindowCounts CorpusStore::window_counts(const TimeWindow& w) const {
    check_window(w);
    std::vector<Count> occ(vocabulary_.size(), 0);
    std::map<TermPair, Count> pairs;
    for (int year = w.y1; year <= w.y2; ++year) {
        const auto& yc = years_[static_cast<std::size_t>(year - first_year())];
        for (std::size_t i = 0; i < occ.size(); ++i) occ[i] += yc.occurrences[i];
        for (const auto& pc : yc.cooccurrences) pairs[pc.pair] += pc.count;
    }
    std::vector<PairCount> flat;
    flat.reserve(pairs.size());
    for (const auto& [pair, count] : pairs) flat.push_back({pair, count});
    return WindowCounts(w, std::move(occ), std::move(flat));
}

Count CorpusStore::total_occurrences(const TimeWindow& w) const {
    check_window(w);
    Count total = 0;
    for (int year = w.y1; year <= w.y2; ++year)
        for (Count c : years_[static_cast<std::size_t>(year - first_year())].occurrences) total += c;
    return total;
}

// --- ingestion ----------------------------------------------------------------

std::vector<IngestWarning> check_cooccurrence_bounds(const CorpusStore& store,
                                                     Validation validation) {
    std::vector<IngestWarning> warnings;
    for (const auto& yc : store.years()) {
        for (const auto& pc : yc.cooccurrences) {
            Count bound = std::min(yc.occurrence(pc.pair.a), yc.occurrence(pc.pair.b));
            if (pc.count <= bound) continue;
            std::string message = "co-occurrence count " + std::to_string(pc.count) + " of ('" +
                                  store.label(pc.pair.a) + "', '" + store.label(pc.pair.b) +
                                  "') in " + std::to_string(yc.year) +
                                  " exceeds min occurrence count " + std::to_string(bound);
            if (validation == Validation::strict) throw ValidationError(message);
            warnings.push_back({std::move(message)});
        }
    }
    return warnings;
}

IngestResult ingest(std::span<const OccurrenceRecord> occurrences,
                    std::span<const CooccurrenceRecord> cooccurrences, Validation validation,
                    std::string provenance) {
    struct Occ {
        std::string label;
        int year;
        Count count;
    };
    struct Co {
        std::string a, b;
        int year;
        Count count;
    };
    std::vector<Occ> occ;
    std::vector<Co> co;
    std::set<std::string> labels;
    int min_year = 0;
    int max_year = 0;
    bool any = false;
    auto see_year = [&](int y) {
        min_year = any ? std::min(min_year, y) : y;
        max_year = any ? std::max(max_year, y) : y;
        any = true;
    };

    for (const auto& r : occurrences) {
        std::string label = require_label(r.label, r.line);
        labels.insert(label);
        see_year(r.year);
        occ.push_back({std::move(label), r.year, r.count});
    }
    for (const auto& r : cooccurrences) {
        std::string a = require_label(r.label_a, r.line);
        std::string b = require_label(r.label_b, r.line);
        if (a == b) {
            throw ValidationError("self pair ('" + a + "', '" + b + "') in " +
                                  std::to_string(r.year) + record_origin(r.line));
        }
        labels.insert(a);
        labels.insert(b);
        see_year(r.year);
        co.push_back({std::move(a), std::move(b), r.year, r.count});
    }

    std::vector<std::string> vocabulary(labels.begin(), labels.end());
    auto id_of = [&](const std::string& label) {
        auto it = std::lower_bound(vocabulary.begin(), vocabulary.end(), label);
        return TermId(static_cast<std::uint32_t>(it - vocabulary.begin()));
    };

    std::vector<YearCounts> years;
    if (any) {
        years.resize(static_cast<std::size_t>(max_year - min_year + 1));
        for (std::size_t i = 0; i < years.size(); ++i) {
            years[i].year = min_year + static_cast<int>(i);
            years[i].occurrences.assign(vocabulary.size(), 0);
        }
    }
    for (const auto& r : occ)
        years[static_cast<std::size_t>(r.year - min_year)].occurrences[id_of(r.label).index()] += r.count;

    std::vector<std::map<TermPair, Count>> pair_maps(years.size());
    for (const auto& r : co) {
        if (r.count == 0) continue;
        pair_maps[static_cast<std::size_t>(r.year - min_year)][TermPair(id_of(r.a), id_of(r.b))] +=
            r.count;
    }
    for (std::size_t i = 0; i < years.size(); ++i)
        for (const auto& [pair, count] : pair_maps[i]) years[i].cooccurrences.push_back({pair, count});

    IngestResult result;
    result.store = StoreAccess::make(std::move(vocabulary), std::move(years), std::move(provenance));
    result.warnings = check_cooccurrence_bounds(result.store, validation);
    return result;
}

std::vector<OccurrenceRecord> read_occurrence_csv(std::istream& in, const std::string& source) {
    std::vector<OccurrenceRecord> records;
    read_csv(in, source, "term,year,count", 3, [&](const std::vector<std::string>& f, std::size_t line) {
        OccurrenceRecord r;
        r.label = f[0];
        r.year = parse_year(f[1], source, line);
        r.count = parse_count(f[2], source, line);
        r.line = line;
        if (normalize_label(r.label).empty()) throw ParseError(source, line, "empty term label");
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<CooccurrenceRecord> read_cooccurrence_csv(std::istream& in, const std::string& source) {
    std::vector<CooccurrenceRecord> records;
    read_csv(in, source, "term_a,term_b,year,count", 4,
             [&](const std::vector<std::string>& f, std::size_t line) {
                 CooccurrenceRecord r;
                 r.label_a = f[0];
                 r.label_b = f[1];
                 r.year = parse_year(f[2], source, line);
                 r.count = parse_count(f[3], source, line);
                 r.line = line;
                 if (normalize_label(r.label_a).empty() || normalize_label(r.label_b).empty())
                     throw ParseError(source, line, "empty term label");
                 records.push_back(std::move(r));
             });
    return records;
}

namespace {
std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::input, "cannot open '" + path + "'");
    return in;
}
}  // namespace

std::vector<OccurrenceRecord> read_occurrence_csv_file(const std::string& path) {
    auto in = open_input(path);
    return read_occurrence_csv(in, path);
}

std::vector<CooccurrenceRecord> read_cooccurrence_csv_file(const std::string& path) {
    auto in = open_input(path);
    return read_cooccurrence_csv(in, path);
}

void write_occurrence_csv(std::ostream& out, const CorpusStore& store) {
    out << "term,year,count\n";
    std::vector<bool> seen(store.term_count(), false);
    for (const auto& yc : store.years()) {
        bool year_written = false;
        for (std::size_t i = 0; i < yc.occurrences.size(); ++i) {
            if (yc.occurrences[i] == 0) continue;
            out << csv_escape(store.vocabulary()[i]) << ',' << yc.year << ',' << yc.occurrences[i] << '\n';
            seen[i] = true;
            year_written = true;
        }
        // keep the year range intact when a year carries no occurrences
        if (!year_written && store.term_count() > 0)
            out << csv_escape(store.vocabulary()[0]) << ',' << yc.year << ",0\n";
    }
    if (store.empty()) return;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) out << csv_escape(store.vocabulary()[i]) << ',' << store.first_year() << ",0\n";
}

void write_cooccurrence_csv(std::ostream& out, const CorpusStore& store) {
    out << "term_a,term_b,year,count\n";
    for (const auto& yc : store.years()) {
        for (const auto& pc : yc.cooccurrences) {
            out << csv_escape(store.label(pc.pair.a)) << ',' << csv_escape(store.label(pc.pair.b)) << ','
                << yc.year << ',' << pc.count << '\n';
        }
    }
}

// --- canonical JSON -------------------------------------------------------------

namespace {
ojson store_content_json(const CorpusStore& store) {
    ojson doc;
    doc["vocabulary"] = store.vocabulary();
    ojson years = ojson::array();
    for (const auto& yc : store.years()) {
        ojson occ = ojson::object();
        for (std::size_t i = 0; i < yc.occurrences.size(); ++i)
            if (yc.occurrences[i] != 0) occ[std::to_string(i)] = yc.occurrences[i];
        ojson cooc = ojson::array();
        for (const auto& pc : yc.cooccurrences)
            cooc.push_back(ojson::array({pc.pair.a.value, pc.pair.b.value, pc.count}));
        years.push_back({{"year", yc.year}, {"occ", std::move(occ)}, {"cooc", std::move(cooc)}});
    }
    doc["years"] = std::move(years);
    return doc;
}
}  // namespace

std::string store_to_json(const CorpusStore& store, int indent) {
    ojson doc = store_content_json(store);
    doc["provenance"] = store.provenance();
    return doc.dump(indent);
}

IngestResult store_from_json(std::string_view text, const std::string& source) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::input, source + ": invalid JSON: " + e.what());
    }
    auto fail = [&](const std::string& what) -> Error {
        return Error(ErrorKind::input, source + ": " + what);
    };
    try {
        std::vector<std::string> vocabulary = doc.at("vocabulary").get<std::vector<std::string>>();
        for (std::size_t i = 0; i < vocabulary.size(); ++i) {
            if (normalize_label(vocabulary[i]) != vocabulary[i] || vocabulary[i].empty())
                throw fail("vocabulary entry " + std::to_string(i) + " is not a normalized label");
            if (i > 0 && !(vocabulary[i - 1] < vocabulary[i]))
                throw fail("vocabulary is not strictly sorted at entry " + std::to_string(i));
        }
        const std::size_t n = vocabulary.size();
        std::vector<YearCounts> years;
        for (const auto& y : doc.at("years")) {
            YearCounts yc;
            yc.year = y.at("year").get<int>();
            if (!years.empty() && yc.year != years.back().year + 1)
                throw fail("years must be contiguous and increasing at " + std::to_string(yc.year));
            yc.occurrences.assign(n, 0);
            for (const auto& [key, value] : y.at("occ").items()) {
                std::size_t id = 0;
                if (!parse_number(key, id) || id >= n) throw fail("bad term id '" + key + "'");
                yc.occurrences[id] = value.get<Count>();
            }
            for (const auto& triple : y.at("cooc")) {
                auto a = triple.at(0).get<std::uint32_t>();
                auto b = triple.at(1).get<std::uint32_t>();
                auto c = triple.at(2).get<Count>();
                if (a >= n || b >= n || a >= b) throw fail("bad pair in year " + std::to_string(yc.year));
                if (c == 0) continue;
                PairCount pc{TermPair(TermId(a), TermId(b)), c};
                if (!yc.cooccurrences.empty() && !(yc.cooccurrences.back().pair < pc.pair))
                    throw fail("pairs not sorted in year " + std::to_string(yc.year));
                yc.cooccurrences.push_back(pc);
            }
            years.push_back(std::move(yc));
        }
        std::string provenance = doc.contains("provenance") ? doc["provenance"].get<std::string>() : "";
        IngestResult result;
        result.store = StoreAccess::make(std::move(vocabulary), std::move(years), std::move(provenance));
        result.warnings = check_cooccurrence_bounds(result.store, Validation::lenient);
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw fail(std::string("malformed store document: ") + e.what());
    }
}

IngestResult load_store(const std::string& path) {
    auto in = open_input(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return store_from_json(buffer.str(), path);
}

std::vector<std::string> closest_labels(const CorpusStore& store, std::string_view query, std::size_t n) {
    const std::string key = normalize_label(query);
    auto distance = [&](const std::string& label) {
        std::vector<std::size_t> row(label.size() + 1);
        for (std::size_t j = 0; j <= label.size(); ++j) row[j] = j;
        for (std::size_t i = 1; i <= key.size(); ++i) {
            std::size_t diagonal = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= label.size(); ++j) {
                const std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (key[i - 1] == label[j - 1] ? 0 : 1)});
                diagonal = up;
            }
        }
        return row[label.size()];
    };
    std::vector<std::pair<std::size_t, std::string>> scored;
    for (const auto& label : store.vocabulary()) scored.emplace_back(distance(label), label);
    std::sort(scored.begin(), scored.end());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scored.size() && i < n; ++i) out.push_back(scored[i].second);
    return out;
}

std::string store_fingerprint(const CorpusStore& store) {
    // FNV-1a, 64 bit
    std::string content = store_content_json(store).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : content) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace fieldmap
