#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fieldmap {

using Count = std::uint64_t;

/// Dense index into the store vocabulary. Ids follow the byte order of the
/// normalized labels, so they are independent of record order.
struct TermId {
    std::uint32_t value = 0;

    constexpr TermId() = default;
    constexpr explicit TermId(std::uint32_t v) : value(v) {}
    constexpr std::size_t index() const { return value; }
    friend constexpr auto operator<=>(TermId, TermId) = default;
};

/// Unordered term pair, stored canonically as (smaller id, larger id).
struct TermPair {
    TermId a;
    TermId b;

    TermPair() = default;
    TermPair(TermId x, TermId y) : a(x < y ? x : y), b(x < y ? y : x) {}
    friend auto operator<=>(const TermPair&, const TermPair&) = default;
};

/// Inclusive range of calendar years.
struct TimeWindow {
    int y1 = 0;
    int y2 = 0;

    int length() const { return y2 - y1 + 1; }
    bool contains(int year) const { return year >= y1 && year <= y2; }
    friend auto operator<=>(const TimeWindow&, const TimeWindow&) = default;
};

std::string to_string(const TimeWindow& w);

/// Parses "Y1:Y2" (or a single year "Y").
TimeWindow parse_window(std::string_view text);

enum class Validation { strict, lenient };

Validation parse_validation(std::string_view text);

/// Lowercased, NFC-normalized label with whitespace runs collapsed to a
/// single space and trimmed.
std::string normalize_label(std::string_view raw);

struct OccurrenceRecord {
    std::string label;
    int year = 0;
    Count count = 0;
    std::size_t line = 0;  // source line, 0 when synthesized
};

struct CooccurrenceRecord {
    std::string label_a;
    std::string label_b;
    int year = 0;
    Count count = 0;
    std::size_t line = 0;
};

struct PairCount {
    TermPair pair;
    Count count = 0;
    friend bool operator==(const PairCount&, const PairCount&) = default;
};

struct YearCounts {
    int year = 0;
    std::vector<Count> occurrences;    // indexed by TermId, zero when absent
    std::vector<PairCount> cooccurrences;  // sorted by pair, counts > 0

    Count occurrence(TermId t) const;
    Count cooccurrence(TermId x, TermId y) const;
    friend bool operator==(const YearCounts&, const YearCounts&) = default;
};

struct Neighbor {
    TermId term;
    Count count = 0;
};

/// Counts aggregated over a time window: N_i for every term and N_ij for
/// every pair that co-occurs at least once inside the window.
class WindowCounts {
public:
    WindowCounts(TimeWindow window, std::vector<Count> occurrences, std::vector<PairCount> pairs);

    const TimeWindow& window() const { return window_; }
    std::size_t term_count() const { return occurrences_.size(); }

    Count occurrences(TermId t) const { return occurrences_.at(t.index()); }
    Count cooccurrences(TermId x, TermId y) const;
    Count total() const { return total_; }

    const std::vector<Count>& occurrence_vector() const { return occurrences_; }
    const std::vector<PairCount>& pairs() const { return pairs_; }
    /// Partners of t with N_tj > 0, ascending by id.
    std::span<const Neighbor> partners(TermId t) const;

private:
    TimeWindow window_;
    std::vector<Count> occurrences_;
    std::vector<PairCount> pairs_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    Count total_ = 0;
};

/// Immutable store of yearly occurrence and co-occurrence counts.
class CorpusStore {
public:
    CorpusStore() = default;

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    std::size_t term_count() const { return vocabulary_.size(); }
    const std::string& label(TermId t) const { return vocabulary_.at(t.index()); }
    std::optional<TermId> find(std::string_view label) const;
    /// Like find() but throws UnknownTermError.
    TermId require(std::string_view label) const;

    const std::vector<YearCounts>& years() const { return years_; }
    bool empty() const { return years_.empty(); }
    int first_year() const;
    int last_year() const;
    TimeWindow full_range() const { return {first_year(), last_year()}; }
    const std::string& provenance() const { return provenance_; }

    Count occurrences(TermId t, int year) const;
    Count cooccurrences(TermId x, TermId y, int year) const;
    std::size_t pair_count() const;

    /// Throws RangeError unless y1 <= y2 and both lie in the corpus range.
    void check_window(const TimeWindow& w) const;

    WindowCounts window_counts(const TimeWindow& w) const;
    Count total_occurrences(const TimeWindow& w) const;

    friend bool operator==(const CorpusStore&, const CorpusStore&) = default;

private:
    friend struct StoreAccess;

    std::vector<std::string> vocabulary_;
    std::vector<YearCounts> years_;
    std::string provenance_;
};

struct IngestWarning {
    std::string message;
};

struct IngestResult {
    CorpusStore store;
    std::vector<IngestWarning> warnings;
};

/// Builds a store from count records. Duplicate (term, year) and
/// (pair, year) records are summed; self pairs are rejected. In strict mode
/// a pair count above min(occ_a, occ_b) in some year is an error, in
/// lenient mode it is reported as a warning and kept.
IngestResult ingest(std::span<const OccurrenceRecord> occurrences,
                    std::span<const CooccurrenceRecord> cooccurrences, Validation validation,
                    std::string provenance = {});

std::vector<OccurrenceRecord> read_occurrence_csv(std::istream& in, const std::string& source);
std::vector<CooccurrenceRecord> read_cooccurrence_csv(std::istream& in, const std::string& source);
std::vector<OccurrenceRecord> read_occurrence_csv_file(const std::string& path);
std::vector<CooccurrenceRecord> read_cooccurrence_csv_file(const std::string& path);

void write_occurrence_csv(std::ostream& out, const CorpusStore& store);
void write_cooccurrence_csv(std::ostream& out, const CorpusStore& store);

/// Checks N_ij <= min(N_i, N_j) per year. Strict mode throws
/// ValidationError on the first violation; lenient mode returns one warning
/// per violation.
std::vector<IngestWarning> check_cooccurrence_bounds(const CorpusStore& store,
                                                     Validation validation);

/// Canonical JSON document: ids ascending, pairs sorted.
std::string store_to_json(const CorpusStore& store, int indent = -1);
/// Loads a canonical store document. Validation is re-run in lenient mode.
IngestResult store_from_json(std::string_view text, const std::string& source = "store");
IngestResult load_store(const std::string& path);

/// Content hash of the store (vocabulary and counts, provenance excluded).
std::string store_fingerprint(const CorpusStore& store);

/// Up to `n` vocabulary labels closest to `query` by edit distance (ties by
/// label order); used for "did you mean" hints.
std::vector<std::string> closest_labels(const CorpusStore& store, std::string_view query, std::size_t n = 3);

/// Splits one CSV line into fields. Double-quoted fields may contain commas
/// and doubled quotes. Throws std::invalid_argument on an unterminated quote.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace fieldmap
