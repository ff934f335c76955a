// Whole-pipeline properties over randomly generated corpora.

#include "vcore/ingest.hpp"
#include "vcore/metrics.hpp"
#include "vcore/metrics_io.hpp"
#include "vcore/store.hpp"
#include "vcore/text.hpp"
#include "vcore/windows.hpp"

#include "testkit.hpp"

#include <doctest.h>

#include <sstream>

using namespace vcore;
using testkit::TempDir;

namespace {

/// Every metric output of a two-window analysis, concatenated as text.
std::string all_outputs(const CorpusStore& store, WindowSpec a, WindowSpec b, std::size_t k, unsigned threads) {
    const auto ta = aggregate_window(store, a, threads);
    const auto tb = aggregate_window(store, b, threads);
    const auto ca = frequency_core(ta, k);
    const auto cb = frequency_core(tb, k);
    const std::vector<Core> pair{ca, cb};
    std::ostringstream out;
    write_core_tsv(out, ca);
    out << metrics_io::series_csv(turnover_series(pair));
    out << metrics_io::series_csv(coverage_series(ca, store, store.years()));
    const auto part = partition_core_transition(ca, cb);
    out << metrics_io::series_csv(coverage_series(part.only_old, store, store.years()));
    out << metrics_io::key_values_csv(metrics_io::pos_key_values(pos_composition(ca)));
    out << metrics_io::key_values_csv(metrics_io::pos_key_values(pos_dropout(ca, cb)));
    out << metrics_io::overlap_json(overlap_report(ca, bookshare_core(ta, 0.2)));
    out << text::format_double(frequency_bookshare_correlation(ta));
    out << core_size_for_coverage(ta, 0.5);
    return out.str();
}

}  // namespace

TEST_CASE("save/load changes no downstream output byte") {
    testkit::Rng rng(21);
    TempDir dir("prop-persist");
    for (int iter = 0; iter < 8; ++iter) {
        const YearRange years{1800, 1819};
        const auto store = CorpusStore::from_entries("en", years, testkit::random_entries(rng, 300, years, 0.7),
                                                     testkit::random_volume_totals(rng, years, 60));
        save_store(store, dir / "p.vcs");
        const auto back = load_store(dir / "p.vcs");
        CHECK(all_outputs(store, {1800, 1809}, {1810, 1819}, 40, 1) ==
              all_outputs(back, {1800, 1809}, {1810, 1819}, 40, 1));
    }
}

TEST_CASE("thread count changes nothing from ingest to metrics") {
    testkit::Rng rng(22);
    TempDir dir("prop-threads");
    const YearRange years{1900, 1929};
    const auto rows = testkit::random_entries(rng, 800, years, 0.5);
    std::vector<std::filesystem::path> shards;
    std::vector<std::string> text(5);
    std::uniform_int_distribution<std::size_t> pick(0, 4);
    for (const auto& r : rows) {
        text[pick(rng)] += r.word + "_" + std::string(to_string(r.pos)) + "\t" + std::to_string(r.year) + "\t" +
                           std::to_string(r.match_count) + "\t" + std::to_string(r.volume_count) + "\n";
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
        shards.push_back(dir / ("s" + std::to_string(i)));
        testkit::write_file(shards.back(), text[i]);
    }
    CorpusConfig cfg;
    cfg.years = years;
    cfg.window_start = years.first;
    IngestOptions opt;
    opt.volume_totals = testkit::random_volume_totals(rng, years, 40);
    opt.threads = 1;
    const auto one = ingest_shards(cfg, shards, opt);
    const auto base = all_outputs(one, {1900, 1914}, {1915, 1929}, 100, 1);
    for (unsigned t : {2u, 4u, 8u}) {
        opt.threads = t;
        const auto many = ingest_shards(cfg, shards, opt);
        CHECK(many.serialize() == one.serialize());
        CHECK(all_outputs(many, {1900, 1914}, {1915, 1929}, 100, t) == base);
    }
}

TEST_CASE("repeated runs are bit-identical") {
    testkit::Rng rng(23);
    const YearRange years{1800, 1809};
    const auto store = CorpusStore::from_entries("en", years, testkit::random_entries(rng, 200, years),
                                                 testkit::random_volume_totals(rng, years, 10));
    const auto first = all_outputs(store, {1800, 1804}, {1805, 1809}, 30, 3);
    for (int i = 0; i < 3; ++i) CHECK(all_outputs(store, {1800, 1804}, {1805, 1809}, 30, 3) == first);
}
