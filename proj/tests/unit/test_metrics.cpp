#include "vcore/errors.hpp"
#include "vcore/metrics.hpp"
#include "vcore/metrics_io.hpp"
#include "vcore/store.hpp"
#include "vcore/windows.hpp"

#include "testkit.hpp"

#include <doctest.h>

#include <numeric>

using namespace vcore;
using testkit::make_core;

namespace {

Core sourced(Core c, WindowSpec w) {
    c.source = w;
    return c;
}

/// Random pair of cores over a shared pool, with random tags, sized k.
std::pair<Core, Core> random_core_pair(testkit::Rng& rng, std::size_t k) {
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < 3 * k; ++i) pool.push_back("w" + std::to_string(i));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> a(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    std::shuffle(pool.begin(), pool.end(), rng);
    std::bernoulli_distribution keep(0.7);
    std::vector<std::string> b;
    for (const auto& w : a) {
        if (keep(rng)) b.push_back(w);
    }
    for (const auto& w : pool) {
        if (b.size() == k) break;
        if (std::find(b.begin(), b.end(), w) == b.end()) b.push_back(w);
    }
    std::vector<PosTag> ta, tb;
    for (std::size_t i = 0; i < k; ++i) {
        ta.push_back(testkit::random_tag(rng));
        tb.push_back(testkit::random_tag(rng));
    }
    return {make_core(a, ta, k), make_core(b, tb, k)};
}

const YearRange kYears{1800, 1809};

CorpusStore random_store(testkit::Rng& rng, std::size_t words = 300) {
    return CorpusStore::from_entries("en", kYears, testkit::random_entries(rng, words, kYears, 0.7),
                                     testkit::random_volume_totals(rng, kYears, 100));
}

}  // namespace

TEST_CASE("dropout share edge cases") {
    const auto a = make_core({"a", "b", "c"});
    CHECK(dropout_share(a, a) == 0.0);
    CHECK(dropout_share(a, make_core({"x", "y", "z"})) == 1.0);
    CHECK(dropout_share(make_core({"a", "b", "c", "d"}), make_core({"d", "a", "q", "r"})) == 0.5);
    CHECK_THROWS_AS(dropout_share(make_core({}), a), std::invalid_argument);
}

TEST_CASE("turnover series") {
    const auto a = sourced(make_core({"a", "b"}), {1800, 1849});
    const auto b = sourced(make_core({"a", "b"}), {1850, 1899});
    const auto c = sourced(make_core({"a", "x"}), {1900, 1949});
    const std::vector<Core> two{a, b};
    const auto s = turnover_series(two);
    REQUIRE(s.points.size() == 1);
    CHECK(s.points[0] == SeriesPoint{1849, 0.0});
    const std::vector<Core> three{a, b, c};
    const auto t = turnover_series(three);
    CHECK(t.points == std::vector<SeriesPoint>{{1849, 0.0}, {1899, 0.5}});
    CHECK_NOTHROW(t.validate());

    auto other = c;
    other.method = BookShare{0.5};
    const std::vector<Core> mixed{a, other};
    CHECK_THROWS_AS(turnover_series(mixed), MixedCoreMethods);
    auto bigger = c;
    bigger.method = RankK{3};
    const std::vector<Core> sizes{a, bigger};
    CHECK_THROWS_AS(turnover_series(sizes), MixedCoreMethods);
    const std::vector<Core> backwards{b, a};
    CHECK_THROWS_AS(turnover_series(backwards), std::invalid_argument);
    const std::vector<Core> one{a};
    CHECK_THROWS_AS(turnover_series(one), std::invalid_argument);
}

TEST_CASE("coverage of the whole vocabulary is one") {
    testkit::Rng rng(1);
    const auto store = random_store(rng);
    const auto s = coverage_series(store.dictionary(), store, kYears);
    for (const auto& p : s.points) CHECK(p.y == 1.0);
    CHECK(s.points.front().x == 1800);
    CHECK(s.points.size() == 10);
}

TEST_CASE("coverage errors and absent words") {
    const auto store = CorpusStore::from_entries("en", {1800, 1801}, {{"a", PosTag::Noun, 1800, 3, 1}});
    const std::vector<std::string> words{"a", "nope"};
    CHECK(coverage_series(words, store, {1800, 1800}).points[0].y == 1.0);
    CHECK_THROWS_AS(coverage_series(words, store, {1800, 1801}), EmptyYearError);
    CHECK_THROWS_AS(coverage_series(words, store, {1799, 1800}), Error);
}

TEST_CASE("coverage is monotone in K (property)") {
    testkit::Rng rng(2);
    for (int iter = 0; iter < 10; ++iter) {
        const auto store = random_store(rng, 200);
        const auto t = aggregate_window(store, {1800, 1804});
        std::uniform_int_distribution<std::size_t> pick(1, t.entries.size());
        const auto k1 = pick(rng), k2 = pick(rng);
        const auto lo = coverage_series(frequency_core(t, std::min(k1, k2)), store, kYears);
        const auto hi = coverage_series(frequency_core(t, std::max(k1, k2)), store, kYears);
        for (std::size_t i = 0; i < lo.points.size(); ++i) CHECK(lo.points[i].y <= hi.points[i].y);
    }
}

TEST_CASE("transition partition") {
    const auto a = make_core({"a", "b", "c"});
    const auto p = partition_core_transition(a, a);
    CHECK(p.both == std::vector<std::string>{"a", "b", "c"});
    CHECK(p.only_old.empty());
    CHECK(p.only_new.empty());
    const auto q = partition_core_transition(a, make_core({"x", "y", "z"}));
    CHECK(q.both.empty());
    CHECK(q.only_old.size() == 3);
    CHECK(q.only_new.size() == 3);
}

TEST_CASE("transition decomposition and dropout cross-check (property)") {
    testkit::Rng rng(3);
    const auto store = random_store(rng, 400);
    for (int iter = 0; iter < 50; ++iter) {
        auto [a, b] = random_core_pair(rng, 10 + static_cast<std::size_t>(iter));
        // draw words from the store so coverage is nonzero
        const auto& dict = store.dictionary();
        for (auto* c : {&a, &b}) {
            for (auto& e : c->entries) e.word = dict[std::stoul(e.word.substr(1)) % dict.size()];
        }
        const auto part = partition_core_transition(a, b);
        const auto whole = coverage_series(a, store, kYears);
        const auto both = coverage_series(part.both, store, kYears);
        const auto gone = coverage_series(part.only_old, store, kYears);
        for (std::size_t i = 0; i < whole.points.size(); ++i) {
            CHECK(std::abs(whole.points[i].y - (both.points[i].y + gone.points[i].y)) <= 1e-9);
        }
        const auto old_set = a.sorted_words();
        CHECK(dropout_share(a, b) == static_cast<double>(part.only_old.size()) / static_cast<double>(old_set.size()));
    }
}

TEST_CASE("group frequency series") {
    testkit::Rng rng(4);
    const auto store = random_store(rng);
    const auto& dict = store.dictionary();
    const std::vector<std::string> one{dict[5]};
    const auto g = group_frequency_series(one, store, kYears);
    for (const auto& p : g.points) CHECK(p.y == relative_frequency(store, dict[5], p.x));

    const std::vector<std::string> left{dict[1], dict[2], dict[3]};
    const std::vector<std::string> right{dict[10], dict[11]};
    std::vector<std::string> all = left;
    all.insert(all.end(), right.begin(), right.end());
    const auto sl = group_frequency_series(left, store, kYears);
    const auto sr = group_frequency_series(right, store, kYears);
    const auto su = group_frequency_series(all, store, kYears);
    for (std::size_t i = 0; i < su.points.size(); ++i) {
        CHECK(std::abs(su.points[i].y - (sl.points[i].y + sr.points[i].y)) <= 1e-15);
    }
    const std::vector<std::string> none{"qqqqqqqqqq"};
    CHECK_THROWS_AS(group_frequency_series(none, store, kYears), EmptyGroup);
}

TEST_CASE("overlap report") {
    const auto a = make_core({"a", "b", "c"});
    const auto same = overlap_report(a, a);
    CHECK(same.overlap_pct == 1.0);
    CHECK(same.symmetric_difference() == 0);

    // 6-word lists sharing 4
    const auto x = make_core({"a", "b", "c", "d", "e", "f"});
    const auto y = make_core({"c", "d", "e", "f", "g", "h"});
    const auto r = overlap_report(x, y);
    CHECK(r.shared == 4);
    CHECK(std::abs(r.overlap_pct - 0.667) < 5e-4);
    CHECK(r.symmetric_difference() == 4);
    CHECK(r.only_a == std::vector<std::string>{"a", "b"});
    CHECK(r.only_b == std::vector<std::string>{"g", "h"});
    CHECK(r.jaccard == 0.5);

    const auto empty = overlap_report(make_core({}), make_core({}));
    CHECK(empty.overlap_pct == 1.0);
    const auto uneven = overlap_report(make_core({"a"}), make_core({"a", "b", "c", "d"}));
    CHECK(uneven.overlap_pct == 0.25);
}

TEST_CASE("pearson basics") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> neg{-1, -2, -3, -4, -5};
    CHECK(pearson_correlation(x, x) == 1.0);
    CHECK(pearson_correlation(x, neg) == -1.0);
    const std::vector<double> flat{2, 2, 2, 2, 2};
    CHECK_THROWS_AS(pearson_correlation(x, flat), DegenerateVariance);
    const std::vector<double> shorter{1, 2};
    CHECK_THROWS_AS(pearson_correlation(x, shorter), std::invalid_argument);
    const std::vector<double> single{1};
    CHECK_THROWS_AS(pearson_correlation(single, single), std::invalid_argument);
}

TEST_CASE("pearson matches two-pass and is affine invariant (property)") {
    testkit::Rng rng(5);
    std::normal_distribution<double> norm;
    std::uniform_real_distribution<double> scale(0.01, 100.0), shift(-1e3, 1e3);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t n = 2 + static_cast<std::size_t>(iter) * 5;
        std::vector<double> x(n), y(n);
        const double rho = std::uniform_real_distribution<double>(-1, 1)(rng);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = norm(rng);
            y[i] = rho * x[i] + norm(rng) * 0.5;
        }
        if (n == 2 && x[0] == x[1]) continue;
        const double r = pearson_correlation(x, y);
        CHECK(std::abs(r - testkit::two_pass_pearson(x, y)) <= 1e-10);
        const double a = scale(rng), b = shift(rng), c = scale(rng), d = shift(rng);
        std::vector<double> x2(n), y2(n);
        for (std::size_t i = 0; i < n; ++i) {
            x2[i] = a * x[i] + b;
            y2[i] = c * y[i] + d;
        }
        CHECK(std::abs(pearson_correlation(x2, y2) - r) <= 1e-9);
        CHECK(std::abs(pearson_correlation(y, x) - r) <= 1e-12);
    }
}

TEST_CASE("frequency/book-share correlation over a window") {
    testkit::Rng rng(6);
    const auto store = random_store(rng, 500);
    const auto t = aggregate_window(store, {1800, 1809});
    std::vector<double> f, s;
    for (const auto& e : t.entries) {
        f.push_back(e.relative_frequency);
        s.push_back(e.volume_share);
    }
    CHECK(std::abs(frequency_bookshare_correlation(t) - testkit::two_pass_pearson(f, s)) <= 1e-10);
    const auto top = frequency_core(t, 50);
    f.clear();
    s.clear();
    for (const auto& e : top.entries) {
        f.push_back(e.relative_frequency);
        s.push_back(e.volume_share);
    }
    CHECK(std::abs(frequency_bookshare_correlation(t, 50) - testkit::two_pass_pearson(f, s)) <= 1e-10);
}

TEST_CASE("pos composition") {
    const auto nouns = make_core({"a", "b", "c"});
    CHECK(pos_composition(nouns) == std::map<PosTag, double>{{PosTag::Noun, 1.0}});

    // 20 words tagged by hand: 9 NOUN, 5 VERB, 3 ADJ, 2 DET, 1 CONJ
    std::vector<std::string> words;
    std::vector<PosTag> tags;
    const std::vector<std::pair<PosTag, int>> plan = {
        {PosTag::Noun, 9}, {PosTag::Verb, 5}, {PosTag::Adj, 3}, {PosTag::Det, 2}, {PosTag::Conj, 1}};
    for (const auto& [tag, n] : plan) {
        for (int i = 0; i < n; ++i) {
            words.push_back(std::string(to_string(tag)) + std::to_string(i));
            tags.push_back(tag);
        }
    }
    const auto comp = pos_composition(make_core(words, tags));
    CHECK(comp.at(PosTag::Noun) == 0.45);
    CHECK(comp.at(PosTag::Verb) == 0.25);
    CHECK(comp.at(PosTag::Adj) == 0.15);
    CHECK(comp.at(PosTag::Det) == 0.1);
    CHECK(comp.at(PosTag::Conj) == 0.05);
    CHECK(comp.size() == 5);
}

TEST_CASE("pos composition sums to one and weighted pos dropout equals dropout (property)") {
    testkit::Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        const auto [a, b] = random_core_pair(rng, 5 + static_cast<std::size_t>(iter) % 60);
        const auto comp = pos_composition(a);
        double sum = 0;
        for (const auto& [t, v] : comp) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-12);

        std::size_t dropped = 0, total = 0;
        for (const auto& [t, d] : pos_dropout_counts(a, b)) {
            dropped += d.dropped;
            total += d.total;
        }
        CHECK(total == a.size());
        CHECK(static_cast<double>(dropped) / static_cast<double>(total) == dropout_share(a, b));
        double weighted = 0;
        const auto drop = pos_dropout(a, b);
        for (const auto& [t, v] : comp) weighted += v * drop.at(t);
        CHECK(std::abs(weighted - dropout_share(a, b)) <= 1e-12);
    }
}

TEST_CASE("pos dropout of identical cores is zero") {
    const auto a = make_core({"a", "b", "c"}, {PosTag::Noun, PosTag::Verb, PosTag::Det});
    for (const auto& [t, v] : pos_dropout(a, a)) CHECK(v == 0.0);
}

TEST_CASE("core size for coverage") {
    std::vector<StoreEntry> rows;
    const std::vector<std::uint64_t> counts{50, 20, 10, 10, 5, 5};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        rows.push_back({"w" + std::to_string(i), PosTag::Noun, 1900, counts[i], 1});
    }
    const auto t = aggregate_window(CorpusStore::from_entries("en", {1900, 1900}, rows), {1900, 1900});
    CHECK(core_size_for_coverage(t, 0.3) == 1);
    CHECK(core_size_for_coverage(t, 0.5) == 1);
    CHECK(core_size_for_coverage(t, 0.51) == 2);
    CHECK(core_size_for_coverage(t, 0.9) == 4);
    CHECK(core_size_for_coverage(t, 0.96) == 6);
    CHECK_THROWS_AS(core_size_for_coverage(t, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(core_size_for_coverage(t, 0.0), std::invalid_argument);
}

TEST_CASE("core size for coverage is monotone in the target (property)") {
    testkit::Rng rng(8);
    const auto store = random_store(rng, 600);
    const auto t = aggregate_window(store, {1800, 1809});
    std::uniform_real_distribution<double> target(1e-6, 0.999);
    for (int i = 0; i < 300; ++i) {
        double a = target(rng), b = target(rng);
        if (a > b) std::swap(a, b);
        CHECK(core_size_for_coverage(t, a) <= core_size_for_coverage(t, b));
        // the K-prefix reaches the target and the (K-1)-prefix does not
        const auto k = core_size_for_coverage(t, b);
        const auto cov = [&](std::size_t n) {
            std::uint64_t sum = 0;
            for (const auto& e : frequency_core(t, n).entries) sum += e.match_count;
            return static_cast<double>(sum) / static_cast<double>(t.lexical_total);
        };
        CHECK(cov(k) >= b);
        if (k > 1) CHECK(cov(k - 1) < b);
    }
}

TEST_CASE("metrics are pure") {
    testkit::Rng rng(9);
    const auto [a, b] = random_core_pair(rng, 40);
    CHECK(overlap_report(a, b).only_a == overlap_report(a, b).only_a);
    CHECK(pos_dropout(a, b) == pos_dropout(a, b));
}

TEST_CASE("series and key/value CSV round trip") {
    MetricSeries s{"x", {{1800, 0.1}, {1801, 1.0 / 3.0}, {1802, 0}}};
    const auto csv = metrics_io::series_csv(s);
    CHECK(csv == "x,y\n1800,0.1\n1801,0.3333333333333333\n1802,0\n");
    CHECK(metrics_io::parse_series_csv(csv, "x").points == s.points);
    const metrics_io::KeyValues kv{{"NOUN", 0.45}, {"VERB", 1e-20}};
    CHECK(metrics_io::parse_key_values_csv(metrics_io::key_values_csv(kv)) == kv);
    CHECK_THROWS_AS(metrics_io::parse_series_csv("x,y\n1800,abc\n", "x"), Error);
    CHECK_THROWS_AS(metrics_io::parse_series_csv("a,b\n", "x"), Error);
    CHECK(metrics_io::series_json(s).find("\"vcore.series/1\"") != std::string::npos);
}

TEST_CASE("series validation") {
    MetricSeries bad{"b", {{1800, 0.1}, {1800, 0.2}}};
    CHECK_THROWS_AS(bad.validate(), std::logic_error);
    MetricSeries nan{"n", {{1800, std::nan("")}}};
    CHECK_THROWS_AS(nan.validate(), std::logic_error);
}
