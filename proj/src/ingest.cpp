#include "vcore/ingest.hpp"

#include "vcore/errors.hpp"
#include "vcore/io.hpp"
#include "vcore/parallel.hpp"
#include "vcore/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <optional>
#include <tuple>
#include <unordered_map>

namespace vcore {
namespace {

struct LineFields {
    std::string_view token;
    int year = 0;
    std::uint64_t match_count = 0;
    std::uint64_t volume_count = 0;
};

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

/// Returns an error reason, or nullptr on success.
const char* split_line(std::string_view line, LineFields& out) {
    std::array<std::string_view, 4> fields;
    std::size_t n = 0;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        if (n == fields.size()) return "too many fields";
        fields[n++] = line.substr(pos, tab == std::string_view::npos ? line.size() - pos : tab - pos);
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    if (n != 4) return "expected 4 tab-separated fields";
    if (fields[0].empty()) return "empty token";
    if (!parse_number(fields[1], out.year)) return "year is not an integer";
    if (!parse_number(fields[2], out.match_count)) return "match_count is not a non-negative integer";
    if (!parse_number(fields[3], out.volume_count)) return "volume_count is not a non-negative integer";
    if (out.match_count > 0 && out.volume_count == 0) return "volume_count is 0 for a nonzero match_count";
    out.token = fields[0];
    return nullptr;
}

bool is_wildcard(std::string_view token) {
    if (token.size() < 2 || token.front() != '_') return false;
    auto inner = token.substr(1);
    if (inner.back() == '_') inner.remove_suffix(1);
    if (parse_pos_suffix(inner)) return true;
    return inner == "START" || inner == "END" || inner == "ROOT";
}

struct SplitView {
    std::string_view word;
    PosTag pos = PosTag::Untagged;
};

std::optional<SplitView> split_view(std::string_view token) {
    if (is_wildcard(token)) return std::nullopt;
    const auto us = token.rfind('_');
    if (us != std::string_view::npos && us > 0) {
        if (auto tag = parse_pos_suffix(token.substr(us + 1))) return SplitView{token.substr(0, us), *tag};
    }
    return SplitView{token, PosTag::Untagged};
}

/// ASCII membership table plus the full alphabet for the slow path.
class LexicalChecker {
public:
    explicit LexicalChecker(const AlphabetSpec& alphabet) : alphabet_(alphabet) {
        for (char32_t c : alphabet.letters) {
            if (c < 0x80) ascii_[c] = true;
        }
    }

    bool operator()(std::string_view word) const {
        int apostrophes = 0;
        bool letter = false;
        bool ascii = true;
        for (char ch : word) {
            const auto b = static_cast<unsigned char>(ch);
            if (b >= 0x80) {
                ascii = false;
                break;
            }
            if (ascii_[b]) {
                letter = true;
            } else if (b == '\'') {
                ++apostrophes;
            } else {
                return false;
            }
        }
        if (ascii) return letter && apostrophe_ok(apostrophes);
        return is_lexical(word, alphabet_);
    }

private:
    bool apostrophe_ok(int n) const {
        return n == 0 || (alphabet_.apostrophe_allowed && n <= alphabet_.max_apostrophes);
    }

    const AlphabetSpec& alphabet_;
    std::array<bool, 128> ascii_{};
};

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
};

struct ShardResult {
    std::vector<std::string> words;  // local id -> word
    std::vector<IdEntry> rows;       // word field holds the local id
    IngestStats stats;
};

ShardResult parse_shard(const std::filesystem::path& path, const CorpusConfig& config, std::size_t max_errors) {
    ShardResult out;
    std::unordered_map<std::string, WordId, StringHash, std::equal_to<>> ids;
    const LexicalChecker lexical(config.alphabet);
    io::LineReader reader(path);
    std::string_view line;
    std::string normalized;
    while (reader.next(line)) {
        ++out.stats.lines;
        if (line.empty()) continue;
        LineFields f;
        if (const char* reason = split_line(line, f)) {
            ++out.stats.malformed;
            if (out.stats.errors.size() < max_errors) {
                out.stats.errors.push_back(path.string() + ":" + std::to_string(reader.line_number()) + ": " + reason);
            }
            continue;
        }
        if (!config.years.contains(f.year)) {
            ++out.stats.out_of_range;
            continue;
        }
        const auto split = split_view(f.token);
        if (!split) {
            ++out.stats.wildcard;
            continue;
        }
        std::string_view word = split->word;
        bool needs_normalize = config.case_fold;
        for (char ch : word) {
            if (static_cast<unsigned char>(ch) >= 0x80) {
                needs_normalize = true;
                break;
            }
        }
        if (needs_normalize) {
            auto n = text::normalize_word(word, config.case_fold);
            if (!n) {
                ++out.stats.non_lexical;
                continue;
            }
            normalized = std::move(*n);
            word = normalized;
        }
        if (!lexical(word)) {
            ++out.stats.non_lexical;
            continue;
        }
        if (f.match_count == 0) {
            ++out.stats.zero_count;
            continue;
        }
        auto it = ids.find(word);
        if (it == ids.end()) {
            it = ids.emplace(std::string(word), static_cast<WordId>(out.words.size())).first;
            out.words.emplace_back(word);
        }
        out.rows.push_back({it->second, f.year, split->pos, f.match_count, f.volume_count});
        ++out.stats.accepted;
    }
    return out;
}

bool entry_less(const IdEntry& a, const IdEntry& b) {
    return std::tie(a.word, a.year, a.pos) < std::tie(b.word, b.year, b.pos);
}

}  // namespace

RawRecord parse_ngram_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineFields f;
    if (const char* reason = split_line(line, f)) throw MalformedLine(std::string(reason) + ": '" + std::string(line) + "'");
    return {std::string(f.token), f.year, f.match_count, f.volume_count};
}

SplitToken split_pos(std::string_view token) {
    if (token.empty()) throw WildcardToken("empty token");
    const auto v = split_view(token);
    if (!v) throw WildcardToken("POS-only token '" + std::string(token) + "'");
    return {std::string(v->word), v->pos};
}

bool is_lexical(std::string_view word, const AlphabetSpec& alphabet) {
    const auto decoded = text::decode_utf8(word);
    if (!decoded || decoded->empty()) return false;
    int apostrophes = 0;
    bool letter = false;
    for (char32_t c : *decoded) {
        if (alphabet.contains(c)) {
            letter = true;
        } else if (text::is_apostrophe(c)) {
            ++apostrophes;
        } else {
            return false;
        }
    }
    if (apostrophes > 0 && (!alphabet.apostrophe_allowed || apostrophes > alphabet.max_apostrophes)) return false;
    return letter;
}

std::set<PosTag> pos_variant_filter(const std::map<PosTag, std::uint64_t>& variants) {
    if (variants.empty()) throw std::invalid_argument("pos_variant_filter: no variants");
    std::uint64_t total = 0;
    auto best = variants.begin();
    for (auto it = variants.begin(); it != variants.end(); ++it) {
        total += it->second;
        if (it->second > best->second) best = it;
    }
    if (total == 0) throw std::invalid_argument("pos_variant_filter: all variant counts are zero");
    std::set<PosTag> kept;
    for (const auto& [tag, count] : variants) {
        // count * 100 > total  <=>  count > floor(total / 100)
        if (count > total / 100) kept.insert(tag);
    }
    kept.insert(best->first);
    return kept;
}

YearlyTotals yearly_totals(std::span<const CleanRecord> records, YearRange configured) {
    YearlyTotals out;
    for (const auto& r : records) out.totals[r.year] += r.match_count;
    for (int y = configured.first; y <= configured.last; ++y) {
        const auto it = out.totals.find(y);
        if (it == out.totals.end() || it->second == 0) out.empty_years.push_back(y);
    }
    return out;
}

std::vector<CleanRecord> clean_records(const CorpusStore& store) {
    std::vector<CleanRecord> out;
    out.reserve(store.entry_count());
    for (WordId id = 0; id < store.word_count(); ++id) {
        const auto p = store.postings(id);
        for (std::size_t i = 0; i < p.size(); ++i) {
            out.push_back({store.word(id), p.pos[i], p.years[i], p.match_counts[i], p.volume_counts[i]});
        }
    }
    return out;
}

std::string IngestStats::to_json_text() const {
    nlohmann::json doc = {
        {"lines", lines},
        {"accepted", accepted},
        {"malformed", malformed},
        {"wildcard", wildcard},
        {"non_lexical", non_lexical},
        {"out_of_range", out_of_range},
        {"zero_count", zero_count},
        {"duplicates", duplicates},
        {"untagged_aggregate_rows", untagged_aggregate_rows},
        {"pos_variant_rows_dropped", pos_variant_rows_dropped},
        {"empty_years", empty_years},
        {"errors", errors},
    };
    return doc.dump(2);
}

CorpusStore ingest_shards(const CorpusConfig& config, std::span<const std::filesystem::path> shards,
                          const IngestOptions& options, IngestStats* stats_out) {
    std::vector<ShardResult> parts(shards.size());
    parallel_for_each_index(shards.size(), options.threads, [&](std::size_t i) {
        parts[i] = parse_shard(shards[i], config, options.max_reported_errors);
    });

    IngestStats stats;
    for (auto& part : parts) {
        stats.lines += part.stats.lines;
        stats.accepted += part.stats.accepted;
        stats.malformed += part.stats.malformed;
        stats.wildcard += part.stats.wildcard;
        stats.non_lexical += part.stats.non_lexical;
        stats.out_of_range += part.stats.out_of_range;
        stats.zero_count += part.stats.zero_count;
        for (auto& e : part.stats.errors) {
            if (stats.errors.size() < options.max_reported_errors) stats.errors.push_back(std::move(e));
        }
    }

    // Global dictionary in byte order, so ids do not depend on shard order.
    std::vector<std::string> dictionary;
    for (const auto& part : parts) dictionary.insert(dictionary.end(), part.words.begin(), part.words.end());
    std::sort(dictionary.begin(), dictionary.end());
    dictionary.erase(std::unique(dictionary.begin(), dictionary.end()), dictionary.end());

    parallel_for_each_index(parts.size(), options.threads, [&](std::size_t i) {
        auto& part = parts[i];
        std::vector<WordId> remap(part.words.size());
        for (std::size_t k = 0; k < part.words.size(); ++k) {
            remap[k] = static_cast<WordId>(std::lower_bound(dictionary.begin(), dictionary.end(), part.words[k]) -
                                           dictionary.begin());
        }
        part.words = {};
        for (auto& r : part.rows) r.word = remap[r.word];
        std::sort(part.rows.begin(), part.rows.end(), entry_less);
    });

    // Concatenate the sorted runs, then merge adjacent runs pairwise.
    std::vector<IdEntry> rows;
    {
        std::vector<std::size_t> bounds{0};
        std::size_t total = 0;
        for (const auto& part : parts) total += part.rows.size();
        rows.reserve(total);
        for (auto& part : parts) {
            rows.insert(rows.end(), part.rows.begin(), part.rows.end());
            part.rows = {};
            bounds.push_back(rows.size());
        }
        while (bounds.size() > 2) {
            std::vector<std::size_t> next{0};
            for (std::size_t i = 0; i + 2 < bounds.size(); i += 2) {
                const auto first = rows.begin() + static_cast<std::ptrdiff_t>(bounds[i]);
                const auto mid = rows.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]);
                const auto last = rows.begin() + static_cast<std::ptrdiff_t>(bounds[i + 2]);
                std::inplace_merge(first, mid, last, entry_less);
                next.push_back(bounds[i + 2]);
            }
            if (bounds.size() % 2 == 0) next.push_back(bounds.back());
            bounds = std::move(next);
        }
    }

    // Sum duplicate keys.
    std::size_t out = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (out > 0 && rows[out - 1].word == rows[i].word && rows[out - 1].year == rows[i].year &&
            rows[out - 1].pos == rows[i].pos) {
            rows[out - 1].match_count += rows[i].match_count;
            rows[out - 1].volume_count += rows[i].volume_count;
        } else {
            rows[out++] = rows[i];
        }
    }
    stats.duplicates = rows.size() - out;
    rows.resize(out);

    // POS-variant cleaning, word by word over the whole corpus.
    std::vector<IdEntry> kept;
    kept.reserve(rows.size());
    for (std::size_t begin = 0; begin < rows.size();) {
        std::size_t end = begin;
        std::array<std::uint64_t, kPosTagCount> by_tag{};
        while (end < rows.size() && rows[end].word == rows[begin].word) {
            by_tag[index_of(rows[end].pos)] += rows[end].match_count;
            ++end;
        }
        bool has_tagged = false;
        for (PosTag t : kAllPosTags) {
            if (t != PosTag::Untagged && by_tag[index_of(t)] > 0) has_tagged = true;
        }
        std::map<PosTag, std::uint64_t> variants;
        for (PosTag t : kAllPosTags) {
            if (by_tag[index_of(t)] == 0) continue;
            if (has_tagged && t == PosTag::Untagged) continue;
            variants[t] = by_tag[index_of(t)];
        }
        const auto retained = pos_variant_filter(variants);
        for (std::size_t i = begin; i < end; ++i) {
            if (retained.count(rows[i].pos)) {
                kept.push_back(rows[i]);
            } else if (rows[i].pos == PosTag::Untagged) {
                ++stats.untagged_aggregate_rows;
            } else {
                ++stats.pos_variant_rows_dropped;
            }
        }
        begin = end;
    }
    rows = {};

    auto store = CorpusStore::from_columns(config.language, config.years, std::move(dictionary), kept,
                                           options.volume_totals);
    stats.empty_years = store.empty_years();
    if (stats_out) *stats_out = std::move(stats);
    return store;
}

}  // namespace vcore
