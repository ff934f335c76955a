#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcore/config.hpp"
#include "vcore/pos_tag.hpp"
#include "vcore/store.hpp"

namespace vcore {

/// One line of a 1-gram shard: `token<TAB>year<TAB>match_count<TAB>volume_count`.
struct RawRecord {
    std::string token;
    int year = 0;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;

    friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

/// Throws MalformedLine on wrong arity, a non-integer numeric field, an empty
/// token, or a nonzero match_count with zero volumes.
RawRecord parse_ngram_line(std::string_view line);

struct SplitToken {
    std::string word;
    PosTag pos = PosTag::Untagged;

    friend bool operator==(const SplitToken&, const SplitToken&) = default;
};

/// Strips a trailing `_TAG`. Throws WildcardToken for POS-only rows such as
/// `_NOUN_` or `_START_`.
SplitToken split_pos(std::string_view token);

/// Every character is an alphabet letter or an apostrophe (U+0027/U+2019),
/// at most max_apostrophes apostrophes, at least one letter.
bool is_lexical(std::string_view word, const AlphabetSpec& alphabet);

/// `variants` maps each POS tag of one word to its whole-corpus match count.
/// A tag is dropped when its count is <= 1% of the word total; the largest
/// tag always survives.
std::set<PosTag> pos_variant_filter(const std::map<PosTag, std::uint64_t>& variants);

struct CleanRecord {
    std::string word;
    PosTag pos = PosTag::Untagged;
    int year = 0;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;
};

struct YearlyTotals {
    std::map<int, std::uint64_t> totals;
    /// Years of the configured range with zero lexical tokens.
    std::vector<int> empty_years;
};

YearlyTotals yearly_totals(std::span<const CleanRecord> records, YearRange configured);

/// The cleaned record stream held by a store, ordered by (word, year, pos).
std::vector<CleanRecord> clean_records(const CorpusStore& store);

struct IngestStats {
    std::uint64_t lines = 0;
    std::uint64_t accepted = 0;
    std::uint64_t malformed = 0;
    std::uint64_t wildcard = 0;
    std::uint64_t non_lexical = 0;
    std::uint64_t out_of_range = 0;
    std::uint64_t zero_count = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t untagged_aggregate_rows = 0;
    std::uint64_t pos_variant_rows_dropped = 0;
    std::vector<int> empty_years;
    /// First few `file:line: reason` messages for malformed lines.
    std::vector<std::string> errors;

    std::string to_json_text() const;
};

struct IngestOptions {
    unsigned threads = 1;
    std::map<int, std::uint64_t> volume_totals;
    std::size_t max_reported_errors = 20;
};

/// Parses the shards (plain or gzip) in parallel, one shard per task, merges
/// the partial tables by addition and applies the POS-variant filter.
/// Bad lines are counted and skipped; unreadable files throw IoError.
CorpusStore ingest_shards(const CorpusConfig& config, std::span<const std::filesystem::path> shards,
                          const IngestOptions& options = {}, IngestStats* stats = nullptr);

}  // namespace vcore
