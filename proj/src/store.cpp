#include "vcore/store.hpp"

#include "vcore/errors.hpp"
#include "vcore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <tuple>

namespace vcore {
namespace {

constexpr char kMagic[8] = {'V', 'C', 'S', 'T', 'O', 'R', 'E', '\0'};

class Writer {
public:
    template <class T>
    void put(const T& value) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
        bytes_.insert(bytes_.end(), p, p + sizeof(T));
    }
    template <class T>
    void put_column(const std::vector<T>& values) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(values.data());
        bytes_.insert(bytes_.end(), p, p + values.size() * sizeof(T));
    }
    void put_string(std::string_view s) {
        put(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <class T>
    T get() {
        T value;
        need(sizeof(T));
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    template <class T>
    std::vector<T> get_column(std::size_t count) {
        if (count > bytes_.size() / sizeof(T)) throw ChecksumMismatch("store column length exceeds file size");
        need(count * sizeof(T));
        std::vector<T> values(count);
        if (count > 0) std::memcpy(values.data(), bytes_.data() + pos_, count * sizeof(T));
        pos_ += count * sizeof(T);
        return values;
    }
    std::string get_string() {
        const auto len = get<std::uint32_t>();
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw ChecksumMismatch("store file truncated");
    }
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

CorpusStore CorpusStore::from_entries(std::string language, YearRange years, std::vector<StoreEntry> entries,
                                      const std::map<int, std::uint64_t>& volume_totals) {
    std::vector<std::string> dictionary;
    dictionary.reserve(entries.size());
    for (const auto& e : entries) dictionary.push_back(e.word);
    std::sort(dictionary.begin(), dictionary.end());
    dictionary.erase(std::unique(dictionary.begin(), dictionary.end()), dictionary.end());

    std::vector<IdEntry> rows;
    rows.reserve(entries.size());
    for (const auto& e : entries) {
        if (!years.contains(e.year)) {
            throw Error("store entry for '" + e.word + "' has year " + std::to_string(e.year) + " outside range");
        }
        const auto it = std::lower_bound(dictionary.begin(), dictionary.end(), e.word);
        rows.push_back({static_cast<WordId>(it - dictionary.begin()), e.year, e.pos, e.match_count, e.volume_count});
    }
    std::sort(rows.begin(), rows.end(), [](const IdEntry& a, const IdEntry& b) {
        return std::tie(a.word, a.year, a.pos) < std::tie(b.word, b.year, b.pos);
    });
    std::vector<IdEntry> merged;
    merged.reserve(rows.size());
    for (const auto& r : rows) {
        if (!merged.empty() && merged.back().word == r.word && merged.back().year == r.year &&
            merged.back().pos == r.pos) {
            merged.back().match_count += r.match_count;
            merged.back().volume_count += r.volume_count;
        } else {
            merged.push_back(r);
        }
    }
    return from_columns(std::move(language), years, std::move(dictionary), merged, volume_totals);
}

CorpusStore CorpusStore::from_columns(std::string language, YearRange years, std::vector<std::string> dictionary,
                                      std::span<const IdEntry> entries,
                                      const std::map<int, std::uint64_t>& volume_totals) {
    if (years.empty()) throw Error("store year range is empty");
    if (!std::is_sorted(dictionary.begin(), dictionary.end()) ||
        std::adjacent_find(dictionary.begin(), dictionary.end()) != dictionary.end()) {
        throw Error("store dictionary must be sorted and unique");
    }
    if (dictionary.size() > 0xFFFFFFFFu) throw Error("store dictionary too large");

    CorpusStore s;
    s.language_ = std::move(language);
    s.years_ = years;
    s.dictionary_ = std::move(dictionary);
    s.offsets_.assign(s.dictionary_.size() + 1, 0);
    s.years_col_.reserve(entries.size());
    s.pos_col_.reserve(entries.size());
    s.match_col_.reserve(entries.size());
    s.volume_col_.reserve(entries.size());
    s.lexical_totals_.assign(years.size(), 0);
    s.volume_totals_.assign(years.size(), 0);

    const IdEntry* prev = nullptr;
    for (const auto& e : entries) {
        if (e.word >= s.dictionary_.size()) throw Error("store entry references unknown word id");
        if (!years.contains(e.year)) throw Error("store entry year outside range");
        if (prev && std::tie(prev->word, prev->year, prev->pos) >= std::tie(e.word, e.year, e.pos)) {
            throw Error("store entries must be sorted by (word, year, pos) without duplicates");
        }
        prev = &e;
        ++s.offsets_[e.word + 1];
        s.years_col_.push_back(e.year);
        s.pos_col_.push_back(e.pos);
        s.match_col_.push_back(e.match_count);
        s.volume_col_.push_back(e.volume_count);
        s.lexical_totals_[years.index(e.year)] += e.match_count;
    }
    for (std::size_t i = 1; i < s.offsets_.size(); ++i) s.offsets_[i] += s.offsets_[i - 1];
    for (const auto& [year, total] : volume_totals) {
        if (years.contains(year)) s.volume_totals_[years.index(year)] = total;
    }
    return s;
}

std::optional<WordId> CorpusStore::find(std::string_view word) const {
    const auto it = std::lower_bound(dictionary_.begin(), dictionary_.end(), word,
                                     [](const std::string& a, std::string_view b) { return a < b; });
    if (it == dictionary_.end() || *it != word) return std::nullopt;
    return static_cast<WordId>(it - dictionary_.begin());
}

PostingView CorpusStore::postings(WordId id) const {
    const auto begin = offsets_[id];
    const auto count = offsets_[id + 1] - begin;
    return {std::span(years_col_).subspan(begin, count), std::span(pos_col_).subspan(begin, count),
            std::span(match_col_).subspan(begin, count), std::span(volume_col_).subspan(begin, count)};
}

void CorpusStore::check_year(int year) const {
    if (!years_.contains(year)) {
        throw Error("year " + std::to_string(year) + " outside store range " + std::to_string(years_.first) + "-" +
                    std::to_string(years_.last));
    }
}

std::uint64_t CorpusStore::lexical_total(int year) const {
    check_year(year);
    return lexical_totals_[years_.index(year)];
}

std::uint64_t CorpusStore::volume_total(int year) const {
    check_year(year);
    return volume_totals_[years_.index(year)];
}

std::vector<int> CorpusStore::empty_years() const {
    std::vector<int> out;
    for (int y = years_.first; y <= years_.last; ++y) {
        if (lexical_totals_[years_.index(y)] == 0) out.push_back(y);
    }
    return out;
}

std::uint64_t CorpusStore::match_count(WordId id, int year) const {
    const auto p = postings(id);
    const auto lo = std::lower_bound(p.years.begin(), p.years.end(), year);
    std::uint64_t sum = 0;
    for (auto it = lo; it != p.years.end() && *it == year; ++it) {
        sum += p.match_counts[static_cast<std::size_t>(it - p.years.begin())];
    }
    return sum;
}

std::uint64_t CorpusStore::volume_count(WordId id, int year) const {
    const auto p = postings(id);
    const auto lo = std::lower_bound(p.years.begin(), p.years.end(), year);
    std::uint64_t sum = 0;
    for (auto it = lo; it != p.years.end() && *it == year; ++it) {
        sum += p.volume_counts[static_cast<std::size_t>(it - p.years.begin())];
    }
    return sum;
}

YearSlice CorpusStore::year_slice(int year) const {
    check_year(year);
    YearSlice slice;
    slice.year = year;
    slice.lexical_total = lexical_total(year);
    slice.volume_total = volume_total(year);
    slice.empty_year = slice.lexical_total == 0;
    for (WordId id = 0; id < dictionary_.size(); ++id) {
        const auto p = postings(id);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.years[i] == year) slice.entries[{dictionary_[id], p.pos[i]}] = {p.match_counts[i], p.volume_counts[i]};
        }
    }
    return slice;
}

std::vector<std::uint8_t> CorpusStore::serialize() const {
    Writer w;
    for (char c : kMagic) w.put(c);
    w.put(kStoreFormatVersion);
    w.put_string(language_);
    w.put(static_cast<std::int32_t>(years_.first));
    w.put(static_cast<std::int32_t>(years_.last));
    w.put(static_cast<std::uint64_t>(dictionary_.size()));
    w.put(static_cast<std::uint64_t>(years_col_.size()));
    for (const auto& word : dictionary_) w.put_string(word);
    w.put_column(offsets_);
    w.put_column(years_col_);
    w.put_column(pos_col_);
    w.put_column(match_col_);
    w.put_column(volume_col_);
    w.put_column(lexical_totals_);
    w.put_column(volume_totals_);
    auto bytes = w.take();
    const std::uint32_t crc = io::crc32(bytes);
    const auto* p = reinterpret_cast<const std::uint8_t*>(&crc);
    bytes.insert(bytes.end(), p, p + sizeof(crc));
    return bytes;
}

CorpusStore CorpusStore::deserialize(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < sizeof(kMagic) + 2 * sizeof(std::uint32_t)) throw ChecksumMismatch("store file truncated");
    const auto body = bytes.first(bytes.size() - sizeof(std::uint32_t));
    std::uint32_t stored_crc = 0;
    std::memcpy(&stored_crc, bytes.data() + body.size(), sizeof(stored_crc));
    if (io::crc32(body) != stored_crc) throw ChecksumMismatch("store checksum mismatch (corrupt or truncated file)");

    Reader r(body);
    for (char c : kMagic) {
        if (r.get<char>() != c) throw FormatVersionMismatch("not a vcore store file");
    }
    const auto version = r.get<std::uint32_t>();
    if (version != kStoreFormatVersion) {
        throw FormatVersionMismatch("store format version " + std::to_string(version) + ", expected " +
                                    std::to_string(kStoreFormatVersion));
    }
    CorpusStore s;
    s.language_ = r.get_string();
    s.years_.first = r.get<std::int32_t>();
    s.years_.last = r.get<std::int32_t>();
    const auto words = r.get<std::uint64_t>();
    const auto entries = r.get<std::uint64_t>();
    if (words > body.size() || entries > body.size()) throw ChecksumMismatch("store header inconsistent");
    s.dictionary_.reserve(words);
    for (std::uint64_t i = 0; i < words; ++i) s.dictionary_.push_back(r.get_string());
    s.offsets_ = r.get_column<std::uint64_t>(words + 1);
    s.years_col_ = r.get_column<std::int32_t>(entries);
    s.pos_col_ = r.get_column<PosTag>(entries);
    s.match_col_ = r.get_column<std::uint64_t>(entries);
    s.volume_col_ = r.get_column<std::uint64_t>(entries);
    s.lexical_totals_ = r.get_column<std::uint64_t>(s.years_.size());
    s.volume_totals_ = r.get_column<std::uint64_t>(s.years_.size());
    if (!r.at_end() || s.offsets_.back() != entries) throw ChecksumMismatch("store layout inconsistent");
    return s;
}

double relative_frequency(const CorpusStore& store, std::string_view word, int year) {
    const auto total = store.lexical_total(year);
    if (total == 0) throw EmptyYearError("year " + std::to_string(year) + " has no lexical tokens");
    const auto id = store.find(word);
    if (!id) return 0.0;
    return static_cast<double>(store.match_count(*id, year)) / static_cast<double>(total);
}

void save_store(const CorpusStore& store, const std::filesystem::path& path) {
    const auto bytes = store.serialize();
    io::write_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

CorpusStore load_store(const std::filesystem::path& path) {
    const auto bytes = io::read_binary(path);
    try {
        return CorpusStore::deserialize(bytes);
    } catch (const ChecksumMismatch& e) {
        throw ChecksumMismatch(path.string() + ": " + e.what());
    } catch (const FormatVersionMismatch& e) {
        throw FormatVersionMismatch(path.string() + ": " + e.what());
    }
}

std::uint32_t store_file_checksum(const std::filesystem::path& path) {
    const auto bytes = io::read_binary(path);
    if (bytes.size() < sizeof(std::uint32_t)) throw ChecksumMismatch(path.string() + ": store file truncated");
    std::uint32_t crc = 0;
    std::memcpy(&crc, bytes.data() + bytes.size() - sizeof(crc), sizeof(crc));
    return crc;
}

std::map<int, std::uint64_t> parse_volume_sidecar(std::string_view text) {
    std::map<int, std::uint64_t> out;
    auto parse_int = [](std::string_view s, auto& value) {
        while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
    };
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos || line.front() == '#') continue;
        const auto fail = [&] {
            return Error("volume sidecar line " + std::to_string(line_no) + ": cannot parse '" + std::string(line) + "'");
        };
        if (line.find(',') != std::string_view::npos) {
            // total_counts layout: whitespace separated year,match,pages,volumes groups
            std::size_t p = 0;
            while (p < line.size()) {
                const auto start = line.find_first_not_of(" \t\r", p);
                if (start == std::string_view::npos) break;
                auto stop = line.find_first_of(" \t\r", start);
                if (stop == std::string_view::npos) stop = line.size();
                const auto group = line.substr(start, stop - start);
                p = stop;
                std::vector<std::string_view> parts;
                std::size_t q = 0;
                while (true) {
                    const auto c = group.find(',', q);
                    parts.push_back(group.substr(q, c == std::string_view::npos ? group.size() - q : c - q));
                    if (c == std::string_view::npos) break;
                    q = c + 1;
                }
                int year = 0;
                std::uint64_t volumes = 0;
                if (parts.size() != 4 || !parse_int(parts[0], year) || !parse_int(parts[3], volumes)) throw fail();
                out[year] += volumes;
            }
        } else {
            const auto tab = line.find_first_of("\t ");
            int year = 0;
            std::uint64_t volumes = 0;
            if (tab == std::string_view::npos || !parse_int(line.substr(0, tab), year) ||
                !parse_int(line.substr(tab + 1), volumes)) {
                throw fail();
            }
            out[year] += volumes;
        }
    }
    return out;
}

std::map<int, std::uint64_t> read_volume_sidecar(const std::filesystem::path& path) {
    try {
        return parse_volume_sidecar(io::read_text(path));
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace vcore
