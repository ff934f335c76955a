#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vcore/config.hpp"
#include "vcore/pos_tag.hpp"
#include "vcore/store.hpp"

namespace vcore {

/// Inclusive year interval used for aggregation.
struct WindowSpec {
    int start_year = 0;
    int end_year = 0;

    int length() const { return end_year - start_year + 1; }
    std::string label() const;  // "start:end"

    /// Parses "a:b" (also "a-b"). Throws std::invalid_argument.
    static WindowSpec parse(std::string_view text);

    friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

namespace windows {
/// Anchor windows for the "1800 core" and the "2000 core".
inline constexpr WindowSpec kCore1800{1795, 1805};
inline constexpr WindowSpec kCore2000{2000, 2008};
}  // namespace windows

/// Consecutive non-overlapping windows of `width` years starting at
/// `span.first`; the last one is truncated at `span.last`. Throws
/// SpanTooShort when fewer than two windows fit.
std::vector<WindowSpec> standard_windows(YearRange span, int width = 50);
std::vector<WindowSpec> standard_windows(const CorpusConfig& config);

struct WindowEntry {
    WordId id = 0;
    std::string word;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;
    double relative_frequency = 0.0;
    double volume_share = 0.0;
    std::array<std::uint64_t, kPosTagCount> tag_counts{};

    /// Tag with the largest window count; ties go to the earlier enumerator.
    PosTag dominant_pos() const;
};

/// Counts of a year window, one entry per word with a nonzero count, in
/// dictionary (byte) order.
struct WindowTable {
    WindowSpec spec;
    std::vector<WindowEntry> entries;
    std::uint64_t lexical_total = 0;
    std::uint64_t volume_total = 0;
};

/// Sums every word's postings over the window. volume_share is
/// sum(volume_count) / sum(volume_total) over the window's years.
/// Throws EmptyWindow when the window holds no lexical tokens.
WindowTable aggregate_window(const CorpusStore& store, const WindowSpec& spec, unsigned threads = 1);

/// Additive merge of two adjacent windows ([a,m] and [m+1,b]).
WindowTable merge_windows(const WindowTable& earlier, const WindowTable& later);

struct RankK {
    std::size_t k = 0;
    friend bool operator==(const RankK&, const RankK&) = default;
};
struct BookShare {
    double threshold = 0.0;
    friend bool operator==(const BookShare&, const BookShare&) = default;
};
using CoreMethod = std::variant<RankK, BookShare>;

std::string describe(const CoreMethod& method);

struct CoreEntry {
    std::string word;
    double relative_frequency = 0.0;
    double volume_share = 0.0;
    PosTag pos = PosTag::Untagged;
    std::uint64_t match_count = 0;
};

/// Ordered, duplicate-free word list extracted from one window.
struct Core {
    WindowSpec source;
    CoreMethod method;
    std::vector<CoreEntry> entries;

    std::size_t size() const { return entries.size(); }
    std::vector<std::string> words() const;
    /// Words in byte order, handy for set algebra.
    std::vector<std::string> sorted_words() const;
};

/// The K most frequent words, ties broken by byte order of the word.
Core frequency_core(const WindowTable& table, std::size_t k);

/// Words with volume_share >= threshold, by descending share (ties by word).
Core bookshare_core(const WindowTable& table, double threshold);

/// `rank<TAB>word<TAB>rel_freq<TAB>volume_share` rows, rank from 1.
void write_core_tsv(std::ostream& out, const Core& core);

}  // namespace vcore
