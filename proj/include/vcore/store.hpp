#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcore/pos_tag.hpp"
#include "vcore/year_range.hpp"

namespace vcore {

using WordId = std::uint32_t;

/// Per-year view of the corpus, materialised on demand from the store.
struct YearSlice {
    int year = 0;
    std::map<std::pair<std::string, PosTag>, std::pair<std::uint64_t, std::uint64_t>> entries;
    std::uint64_t lexical_total = 0;
    std::uint64_t volume_total = 0;
    bool empty_year = false;
};

/// One (word, pos, year) row as accepted by the store builders.
struct StoreEntry {
    std::string word;
    PosTag pos = PosTag::Untagged;
    int year = 0;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;
};

/// Id-based row used by the column builder; word ids index a sorted dictionary.
struct IdEntry {
    WordId word = 0;
    std::int32_t year = 0;
    PosTag pos = PosTag::Untagged;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;
};

/// Postings of a single word: parallel columns sorted by (year, pos).
struct PostingView {
    std::span<const std::int32_t> years;
    std::span<const PosTag> pos;
    std::span<const std::uint64_t> match_counts;
    std::span<const std::uint64_t> volume_counts;

    std::size_t size() const { return years.size(); }
};

/// Immutable year x word count table.
///
/// Storage is word-major: a dense sorted dictionary, CSR offsets per word id,
/// and one column per field. Reading a word across all years touches only
/// that word's postings. Per-year lexical and volume totals live alongside.
class CorpusStore {
public:
    CorpusStore() = default;

    /// Rows may come in any order; identical (word, pos, year) keys are summed.
    /// `volume_totals` maps year -> total books (missing years read as 0).
    static CorpusStore from_entries(std::string language, YearRange years, std::vector<StoreEntry> entries,
                                    const std::map<int, std::uint64_t>& volume_totals = {});

    /// `dictionary` must be sorted and unique; `entries` sorted by
    /// (word, year, pos) with no repeated key and years inside the range.
    static CorpusStore from_columns(std::string language, YearRange years, std::vector<std::string> dictionary,
                                    std::span<const IdEntry> entries,
                                    const std::map<int, std::uint64_t>& volume_totals = {});

    const std::string& language() const { return language_; }
    YearRange years() const { return years_; }
    std::size_t word_count() const { return dictionary_.size(); }
    std::size_t entry_count() const { return years_col_.size(); }

    std::optional<WordId> find(std::string_view word) const;
    const std::string& word(WordId id) const { return dictionary_[id]; }
    const std::vector<std::string>& dictionary() const { return dictionary_; }

    PostingView postings(WordId id) const;

    std::uint64_t lexical_total(int year) const;
    std::uint64_t volume_total(int year) const;
    bool is_empty_year(int year) const { return lexical_total(year) == 0; }
    std::vector<int> empty_years() const;

    /// Occurrences of a word in a year, summed over its stored POS tags.
    std::uint64_t match_count(WordId id, int year) const;
    std::uint64_t volume_count(WordId id, int year) const;

    YearSlice year_slice(int year) const;

    /// Serialised image, identical to what save_store writes.
    std::vector<std::uint8_t> serialize() const;
    static CorpusStore deserialize(std::span<const std::uint8_t> bytes);

private:
    void check_year(int year) const;

    std::string language_;
    YearRange years_;
    std::vector<std::string> dictionary_;
    std::vector<std::uint64_t> offsets_{0};
    std::vector<std::int32_t> years_col_;
    std::vector<PosTag> pos_col_;
    std::vector<std::uint64_t> match_col_;
    std::vector<std::uint64_t> volume_col_;
    std::vector<std::uint64_t> lexical_totals_;
    std::vector<std::uint64_t> volume_totals_;
};

/// match_count(word, year) / lexical_total(year); 0 for an absent word.
/// Throws EmptyYearError when the year has no lexical tokens.
double relative_frequency(const CorpusStore& store, std::string_view word, int year);

inline constexpr std::uint32_t kStoreFormatVersion = 1;

void save_store(const CorpusStore& store, const std::filesystem::path& path);
/// Throws ChecksumMismatch (corrupt or truncated file) or FormatVersionMismatch.
CorpusStore load_store(const std::filesystem::path& path);
/// CRC32 of the file contents as recorded in its footer.
std::uint32_t store_file_checksum(const std::filesystem::path& path);

/// Parses a book-count sidecar. Accepts `year<TAB>total_volumes` rows and the
/// Ngram `total_counts` layout (`year,match_count,page_count,volume_count`
/// groups separated by tabs or newlines).
std::map<int, std::uint64_t> parse_volume_sidecar(std::string_view text);
std::map<int, std::uint64_t> read_volume_sidecar(const std::filesystem::path& path);

}  // namespace vcore
