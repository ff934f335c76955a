#include "vcore/windows.hpp"

#include "vcore/errors.hpp"
#include "vcore/parallel.hpp"
#include "vcore/text.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace vcore {

std::string WindowSpec::label() const { return std::to_string(start_year) + ":" + std::to_string(end_year); }

WindowSpec WindowSpec::parse(std::string_view text) {
    auto sep = text.find(':');
    if (sep == std::string_view::npos) sep = text.find('-', 1);
    if (sep == std::string_view::npos) throw std::invalid_argument("window must look like START:END");
    WindowSpec spec;
    const auto a = text.substr(0, sep);
    const auto b = text.substr(sep + 1);
    auto r1 = std::from_chars(a.data(), a.data() + a.size(), spec.start_year);
    auto r2 = std::from_chars(b.data(), b.data() + b.size(), spec.end_year);
    if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size() || r2.ec != std::errc{} ||
        r2.ptr != b.data() + b.size() || a.empty() || b.empty()) {
        throw std::invalid_argument("window must look like START:END, got '" + std::string(text) + "'");
    }
    if (spec.start_year > spec.end_year) throw std::invalid_argument("window start after end: " + std::string(text));
    return spec;
}

std::vector<WindowSpec> standard_windows(YearRange span, int width) {
    if (width < 1) throw std::invalid_argument("window width must be positive");
    std::vector<WindowSpec> out;
    for (int start = span.first; start <= span.last; start += width) {
        out.push_back({start, std::min(span.last, start + width - 1)});
    }
    if (out.size() < 2) {
        throw SpanTooShort("span " + std::to_string(span.first) + "-" + std::to_string(span.last) +
                           " holds fewer than two " + std::to_string(width) + "-year windows");
    }
    return out;
}

std::vector<WindowSpec> standard_windows(const CorpusConfig& config) {
    return standard_windows(YearRange{config.window_start, config.years.last}, config.window_width);
}

PosTag WindowEntry::dominant_pos() const {
    std::size_t best = index_of(PosTag::Untagged);
    std::uint64_t best_count = 0;
    for (std::size_t i = 0; i < kPosTagCount; ++i) {
        if (tag_counts[i] > best_count) {
            best = i;
            best_count = tag_counts[i];
        }
    }
    return kAllPosTags[best];
}

namespace {

void finish_table(WindowTable& table) {
    const auto total = static_cast<double>(table.lexical_total);
    const auto volumes = static_cast<double>(table.volume_total);
    for (auto& e : table.entries) {
        e.relative_frequency = static_cast<double>(e.match_count) / total;
        e.volume_share = table.volume_total > 0 ? static_cast<double>(e.volume_count) / volumes : 0.0;
    }
}

}  // namespace

WindowTable aggregate_window(const CorpusStore& store, const WindowSpec& spec, unsigned threads) {
    const auto range = store.years();
    if (spec.start_year > spec.end_year || !range.contains(spec.start_year) || !range.contains(spec.end_year)) {
        throw Error("window " + spec.label() + " is not inside the store range " + std::to_string(range.first) + ":" +
                    std::to_string(range.last));
    }
    WindowTable table;
    table.spec = spec;
    for (int y = spec.start_year; y <= spec.end_year; ++y) {
        table.lexical_total += store.lexical_total(y);
        table.volume_total += store.volume_total(y);
    }
    if (table.lexical_total == 0) throw EmptyWindow("window " + spec.label() + " has no lexical tokens");

    const std::size_t words = store.word_count();
    const unsigned chunks = std::max(1u, threads);
    std::vector<std::vector<WindowEntry>> parts(std::min<std::size_t>(chunks, std::max<std::size_t>(words, 1)));
    parallel_chunks(words, chunks, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& out = parts[chunk];
        for (std::size_t id = begin; id < end; ++id) {
            const auto p = store.postings(static_cast<WordId>(id));
            auto i = static_cast<std::size_t>(std::lower_bound(p.years.begin(), p.years.end(), spec.start_year) -
                                              p.years.begin());
            WindowEntry e;
            for (; i < p.size() && p.years[i] <= spec.end_year; ++i) {
                e.match_count += p.match_counts[i];
                e.volume_count += p.volume_counts[i];
                e.tag_counts[index_of(p.pos[i])] += p.match_counts[i];
            }
            if (e.match_count == 0) continue;
            e.id = static_cast<WordId>(id);
            e.word = store.word(e.id);
            out.push_back(std::move(e));
        }
    });
    std::size_t n = 0;
    for (const auto& p : parts) n += p.size();
    table.entries.reserve(n);
    for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(table.entries));
    finish_table(table);
    return table;
}

WindowTable merge_windows(const WindowTable& earlier, const WindowTable& later) {
    if (earlier.spec.end_year + 1 != later.spec.start_year) {
        throw std::invalid_argument("merge_windows needs adjacent windows, got " + earlier.spec.label() + " and " +
                                    later.spec.label());
    }
    WindowTable out;
    out.spec = {earlier.spec.start_year, later.spec.end_year};
    out.lexical_total = earlier.lexical_total + later.lexical_total;
    out.volume_total = earlier.volume_total + later.volume_total;
    auto a = earlier.entries.begin();
    auto b = later.entries.begin();
    while (a != earlier.entries.end() || b != later.entries.end()) {
        if (b == later.entries.end() || (a != earlier.entries.end() && a->word < b->word)) {
            out.entries.push_back(*a++);
        } else if (a == earlier.entries.end() || b->word < a->word) {
            out.entries.push_back(*b++);
        } else {
            WindowEntry e = *a;
            e.match_count += b->match_count;
            e.volume_count += b->volume_count;
            for (std::size_t t = 0; t < kPosTagCount; ++t) e.tag_counts[t] += b->tag_counts[t];
            out.entries.push_back(std::move(e));
            ++a;
            ++b;
        }
    }
    finish_table(out);
    return out;
}

std::string describe(const CoreMethod& method) {
    if (const auto* r = std::get_if<RankK>(&method)) return "rank_k(" + std::to_string(r->k) + ")";
    return "book_share(" + text::format_double(std::get<BookShare>(method).threshold) + ")";
}

std::vector<std::string> Core::words() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.word);
    return out;
}

std::vector<std::string> Core::sorted_words() const {
    auto out = words();
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

CoreEntry to_core_entry(const WindowEntry& e) {
    return {e.word, e.relative_frequency, e.volume_share, e.dominant_pos(), e.match_count};
}

}  // namespace

Core frequency_core(const WindowTable& table, std::size_t k) {
    if (k == 0) throw std::invalid_argument("core size K must be at least 1");
    std::vector<std::size_t> order(table.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto by_rank = [&](std::size_t a, std::size_t b) {
        const auto& x = table.entries[a];
        const auto& y = table.entries[b];
        if (x.match_count != y.match_count) return x.match_count > y.match_count;
        return x.word < y.word;
    };
    const auto take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), by_rank);
    Core core{table.spec, RankK{k}, {}};
    core.entries.reserve(take);
    for (std::size_t i = 0; i < take; ++i) core.entries.push_back(to_core_entry(table.entries[order[i]]));
    return core;
}

Core bookshare_core(const WindowTable& table, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("book-share threshold must be in (0, 1]");
    if (table.volume_total == 0) {
        throw EmptyWindow("window " + table.spec.label() + " has no volume totals (missing volume sidecar?)");
    }
    std::vector<const WindowEntry*> picked;
    for (const auto& e : table.entries) {
        if (e.volume_share >= threshold) picked.push_back(&e);
    }
    std::sort(picked.begin(), picked.end(), [](const WindowEntry* a, const WindowEntry* b) {
        if (a->volume_count != b->volume_count) return a->volume_count > b->volume_count;
        return a->word < b->word;
    });
    Core core{table.spec, BookShare{threshold}, {}};
    core.entries.reserve(picked.size());
    for (const auto* e : picked) core.entries.push_back(to_core_entry(*e));
    return core;
}

void write_core_tsv(std::ostream& out, const Core& core) {
    std::size_t rank = 1;
    for (const auto& e : core.entries) {
        out << rank++ << '\t' << e.word << '\t' << text::format_double(e.relative_frequency) << '\t'
            << text::format_double(e.volume_share) << '\n';
    }
}

}  // namespace vcore
