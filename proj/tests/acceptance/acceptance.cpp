// Acceptance suite: prints one PASS / FAIL / SKIP line per criterion and exits
// nonzero when any criterion fails.

#include "vcore/cli.hpp"
#include "vcore/errors.hpp"
#include "vcore/ingest.hpp"
#include "vcore/io.hpp"
#include "vcore/metrics.hpp"
#include "vcore/metrics_io.hpp"
#include "vcore/store.hpp"
#include "vcore/synth.hpp"
#include "vcore/text.hpp"
#include "vcore/windows.hpp"

#include "testkit.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

using namespace vcore;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

int cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) std::cerr << "  vcore " << args[0] << " failed: " << err.str();
    return code;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------ shared corpus

/// The planted-churn corpus, generated once through the CLI (synth writes
/// shards, ingests them and saves corpus.vcs).
struct ChurnCorpus {
    testkit::TempDir dir{"accept-churn"};
    fs::path path;
    CorpusStore store;
    synth::SynthConfig config = synth::SynthConfig::preset("churn15");
    double build_seconds = 0.0;
};

ChurnCorpus& churn_corpus() {
    static ChurnCorpus c;
    static bool ready = false;
    if (!ready) {
        c.path = c.dir / "t8";
        const auto t0 = std::chrono::steady_clock::now();
        if (cli({"synth", "--preset", "churn15", "--threads", "8", "--out", c.path.string(), "--no-timestamp"}) != 0) {
            throw Error("synth failed");
        }
        c.store = load_store(c.path / "corpus.vcs");
        c.build_seconds = seconds_since(t0);
        ready = true;
    }
    return c;
}

std::vector<Core> window_cores(const CorpusStore& store, std::size_t k, unsigned threads) {
    std::vector<Core> cores;
    for (const auto& w : standard_windows(store.years(), 50)) {
        cores.push_back(frequency_core(aggregate_window(store, w, threads), k));
    }
    return cores;
}

double mean_of(const MetricSeries& s) {
    double sum = 0;
    for (const auto& p : s.points) sum += p.y;
    return sum / static_cast<double>(s.points.size());
}

unsigned hw_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// ------------------------------------------------------------ criteria

Outcome planted_churn() {
    auto& c = churn_corpus();
    const auto t0 = std::chrono::steady_clock::now();
    const auto series = turnover_series(window_cores(c.store, 4000, hw_threads()));
    const double runtime = c.build_seconds + seconds_since(t0);
    double lo = 1, hi = 0;
    for (const auto& p : series.points) lo = std::min(lo, p.y), hi = std::max(hi, p.y);
    const double mean = mean_of(series);
    const bool ok = series.points.size() == 3 && std::abs(mean - 0.15) <= 0.02 && hi - lo < 0.02 && runtime < 120.0;
    return pass_if(ok, "mean dropout " + fmt(mean) + " (want 0.15 +/- 0.02), spread " + fmt(hi - lo) +
                           " (want < 0.02), runtime " + fmt(runtime, 1) + " s (want < 120 s)");
}

Outcome core_size_insensitivity() {
    auto& c = churn_corpus();
    double lo = 1, hi = 0;
    std::string means;
    for (std::size_t k : {1000u, 2000u, 4000u, 8000u}) {
        const double m = mean_of(turnover_series(window_cores(c.store, k, hw_threads())));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        means += (means.empty() ? "" : " ") + std::to_string(k) + ":" + fmt(m);
    }
    return pass_if(hi - lo < 0.02, "mean dropout by K {" + means + "}, max-min " + fmt(hi - lo) + " (want < 0.02)");
}

Outcome zipf_inversion() {
    testkit::TempDir dir("accept-zipf");
    const auto cfg = synth::SynthConfig::preset("zipf");
    const auto out = synth::generate_corpus(cfg, dir.path(), hw_threads());
    IngestOptions opt;
    opt.threads = hw_threads();
    const auto store = ingest_shards(synth::corpus_config_for(cfg), out.shards, opt);
    const auto table = aggregate_window(store, {cfg.years.first, cfg.years.last});
    bool ok = table.entries.size() == cfg.vocabulary;
    std::string detail;
    for (double target : {0.5, 0.75, 0.9}) {
        const auto got = core_size_for_coverage(table, target);
        const auto want = testkit::harmonic_inversion(cfg.vocabulary, target);
        const auto diff = got > want ? got - want : want - got;
        ok = ok && diff <= 1;
        detail += (detail.empty() ? "" : ", ") + fmt(target, 2) + ": K=" + std::to_string(got) + " vs " +
                  std::to_string(want);
    }
    return pass_if(ok, detail + " (want within +/- 1 word, V=" + std::to_string(cfg.vocabulary) + ")");
}

Outcome decomposition_identity() {
    auto& c = churn_corpus();
    double worst = 0;
    std::size_t checked = 0;
    auto check_pair = [&](const CorpusStore& store, const Core& old_core, const Core& new_core) {
        const auto part = partition_core_transition(old_core, new_core);
        const auto whole = coverage_series(old_core, store, store.years());
        const auto both = coverage_series(part.both, store, store.years());
        const auto gone = coverage_series(part.only_old, store, store.years());
        for (std::size_t i = 0; i < whole.points.size(); ++i) {
            worst = std::max(worst, std::abs(whole.points[i].y - (both.points[i].y + gone.points[i].y)));
            ++checked;
        }
    };
    const auto cores = window_cores(c.store, 4000, hw_threads());
    for (std::size_t i = 0; i + 1 < cores.size(); ++i) check_pair(c.store, cores[i], cores[i + 1]);
    check_pair(c.store, cores.front(), cores.back());
    // and on random corpora
    testkit::Rng rng(404);
    for (int iter = 0; iter < 20; ++iter) {
        const YearRange years{1800, 1839};
        const auto store = CorpusStore::from_entries("en", years, testkit::random_entries(rng, 500, years, 0.5));
        std::uniform_int_distribution<std::size_t> k(1, 300);
        check_pair(store, frequency_core(aggregate_window(store, {1800, 1819}), k(rng)),
                   frequency_core(aggregate_window(store, {1820, 1839}), k(rng)));
    }
    return pass_if(worst <= 1e-9, std::to_string(checked) + " yearly points, max |old - (both + only_old)| = " +
                                      text::format_double(worst) + " (want <= 1e-9)");
}

Outcome pos_identity() {
    auto& c = churn_corpus();
    testkit::Rng rng(505);
    const auto windows = standard_windows(c.store.years(), 50);
    std::vector<WindowTable> tables;
    for (const auto& w : windows) tables.push_back(aggregate_window(c.store, w, hw_threads()));
    std::uniform_int_distribution<std::size_t> pick_window(0, windows.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_k(50, 8000);
    std::size_t exact = 0;
    double worst = 0;
    const int pairs = 200;
    for (int i = 0; i < pairs; ++i) {
        auto a = pick_window(rng), b = pick_window(rng);
        if (a == b) b = (a + 1) % windows.size();
        const auto k = pick_k(rng);
        const auto old_core = frequency_core(tables[a], k);
        const auto new_core = frequency_core(tables[b], k);
        // set arithmetic: per-tag dropped words add up to the dropped set
        std::size_t dropped = 0, total = 0;
        for (const auto& [tag, d] : pos_dropout_counts(old_core, new_core)) {
            dropped += d.dropped;
            total += d.total;
        }
        const auto gone = partition_core_transition(old_core, new_core).only_old.size();
        const double share = dropout_share(old_core, new_core);
        if (dropped == gone && total == old_core.size() &&
            static_cast<double>(dropped) / static_cast<double>(total) == share) {
            ++exact;
        }
        double weighted = 0;
        const auto drop = pos_dropout(old_core, new_core);
        for (const auto& [tag, w] : pos_composition(old_core)) weighted += w * drop.at(tag);
        worst = std::max(worst, std::abs(weighted - share));
    }
    return pass_if(exact == static_cast<std::size_t>(pairs) && worst <= 1e-12,
                   std::to_string(exact) + "/" + std::to_string(pairs) +
                       " synthetic core pairs exact in counts; max floating residual " + text::format_double(worst));
}

Outcome brute_force_equivalence() {
    testkit::TempDir dir("accept-brute");
    testkit::Rng rng(606);
    // 10,000 shard lines; each word keeps one tag, some keys repeat
    const YearRange years{1900, 1949};
    std::vector<std::string> words;
    std::map<std::string, PosTag> tag_of;
    while (words.size() < 1500) {
        auto w = testkit::random_word(rng, 2, 8);
        if (tag_of.emplace(w, testkit::random_tag(rng)).second) words.push_back(w);
    }
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> year(years.first, years.last);
    std::uniform_int_distribution<std::uint64_t> count(1, 400);
    std::string lines;
    for (int i = 0; i < 10'000; ++i) {
        // skew towards low ids so ranking is non-trivial
        const auto w = words[std::min(pick(rng), pick(rng))];
        const auto m = count(rng) * (1 + (w.size() % 3));
        std::uniform_int_distribution<std::uint64_t> v(1, m);
        lines += w + "_" + std::string(to_string(tag_of[w])) + "\t" + std::to_string(year(rng)) + "\t" +
                 std::to_string(m) + "\t" + std::to_string(v(rng)) + "\n";
    }
    testkit::write_file(dir / "fixture.tsv", lines);
    std::map<int, std::uint64_t> volumes;
    for (int y = years.first; y <= years.last; ++y) volumes[y] = 5000 + static_cast<std::uint64_t>(y);

    CorpusConfig cfg;
    cfg.years = years;
    cfg.window_start = years.first;
    IngestOptions opt;
    opt.volume_totals = volumes;
    opt.threads = hw_threads();
    const std::vector<fs::path> shards{dir / "fixture.tsv"};
    const auto store = ingest_shards(cfg, shards, opt);

    // naive side: re-parse the text with istringstream
    std::vector<StoreEntry> raw;
    {
        std::istringstream in(lines);
        std::string token;
        int y;
        std::uint64_t m, v;
        while (in >> token >> y >> m >> v) {
            const auto us = token.rfind('_');
            raw.push_back({token.substr(0, us), PosTag::Noun, y, m, v});
        }
    }
    bool agg_ok = true, core_ok = true;
    double worst_r = 0;
    std::size_t checks = 0;
    for (const WindowSpec w : {WindowSpec{1900, 1949}, WindowSpec{1900, 1924}, WindowSpec{1925, 1949},
                               WindowSpec{1930, 1930}}) {
        const auto table = aggregate_window(store, w, hw_threads());
        const auto naive = testkit::naive_window(raw, w.start_year, w.end_year);
        std::uint64_t total = 0, vtotal = 0;
        for (const auto& [word, c] : naive) total += c.match;
        for (int y = w.start_year; y <= w.end_year; ++y) vtotal += volumes[y];
        agg_ok = agg_ok && table.entries.size() == naive.size() && table.lexical_total == total &&
                 table.volume_total == vtotal;
        std::vector<double> f, s;
        auto it = naive.begin();
        for (const auto& e : table.entries) {
            if (it == naive.end()) break;
            const double rf = static_cast<double>(it->second.match) / static_cast<double>(total);
            const double vs = static_cast<double>(it->second.vol) / static_cast<double>(vtotal);
            agg_ok = agg_ok && e.word == it->first && e.match_count == it->second.match &&
                     e.volume_count == it->second.vol && e.relative_frequency == rf && e.volume_share == vs;
            f.push_back(rf);
            s.push_back(vs);
            ++it;
            ++checks;
        }
        for (std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{100}, std::size_t{500}, naive.size()}) {
            core_ok = core_ok && frequency_core(table, k).words() == testkit::naive_top_k(naive, k);
        }
        if (f.size() >= 2) {
            worst_r = std::max(worst_r, std::abs(frequency_bookshare_correlation(table) - testkit::two_pass_pearson(f, s)));
        }
    }
    return pass_if(agg_ok && core_ok && worst_r <= 1e-10,
                   std::string("aggregate ") + (agg_ok ? "exact" : "MISMATCH") + " over " + std::to_string(checks) +
                       " word-windows, frequency_core " + (core_ok ? "exact" : "MISMATCH") +
                       ", max pearson diff " + text::format_double(worst_r) + " (want <= 1e-10)");
}

/// Runs the analysis subcommands into `out` against `store`.
bool run_pipeline(const fs::path& store, const fs::path& out, const std::string& threads) {
    const auto s = store.string();
    const auto o = out.string();
    testkit::write_file(out / "group.txt", "aaa\naab\naac\naad\n");
    const std::vector<std::vector<std::string>> runs = {
        {"turnover", "--store", s, "--k", "4000"},
        {"coverage", "--store", s, "--window", "1800:1849", "--k", "1000"},
        {"overlap", "--store", s, "--window", "1950:1999", "--threshold", "0.5"},
        {"correlate", "--store", s, "--window", "1950:1999", "--k", "1000"},
        {"pos", "--store", s, "--window", "1800:1849", "--window", "1950:1999", "--k", "2000"},
        {"transition", "--store", s, "--window", "1800:1849", "--window", "1950:1999", "--k", "1000"},
        {"group", "--store", s, "--words", (out / "group.txt").string()},
        {"core", "--store", s, "--window", "1900:1949", "--k", "4000"},
    };
    for (auto args : runs) {
        for (const auto& extra : {"--threads", threads.c_str(), "--out", o.c_str(), "--no-timestamp"}) {
            args.emplace_back(extra);
        }
        if (cli(args) != 0) return false;
    }
    return true;
}

/// Every CSV/TSV file in `dir`, by name.
std::map<std::string, std::string> table_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (ext == ".csv" || ext == ".tsv") out[e.path().filename().string()] = testkit::slurp(e.path());
    }
    return out;
}

Outcome thread_determinism() {
    auto& c = churn_corpus();
    const auto t1 = c.dir / "t1";
    if (cli({"synth", "--preset", "churn15", "--threads", "1", "--out", t1.string(), "--no-timestamp"}) != 0) {
        return {Verdict::Fail, "synth --threads 1 failed"};
    }
    std::size_t same_inputs = 0;
    const auto shards = synth::SynthConfig::preset("churn15").shards;
    for (std::size_t i = 0; i < shards; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "shard-%03zu.tsv", i);
        same_inputs += testkit::slurp(t1 / name) == testkit::slurp(c.path / name);
    }
    const bool store_same = io::read_binary(t1 / "corpus.vcs") == io::read_binary(c.path / "corpus.vcs");
    fs::create_directories(t1 / "out");
    fs::create_directories(c.path / "out");
    if (!run_pipeline(t1, t1 / "out", "1") || !run_pipeline(c.path, c.path / "out", "8")) {
        return {Verdict::Fail, "pipeline run failed"};
    }
    const auto a = table_files(t1 / "out");
    const auto b = table_files(c.path / "out");
    std::size_t identical = 0;
    for (const auto& [name, bytes] : a) {
        const auto it = b.find(name);
        identical += it != b.end() && it->second == bytes;
    }
    const bool ok = same_inputs == shards && store_same && a.size() == b.size() && identical == a.size() && !a.empty();
    return pass_if(ok, std::to_string(identical) + "/" + std::to_string(a.size()) +
                           " CSV/TSV outputs byte-identical between --threads 1 and --threads 8; shards " +
                           std::to_string(same_inputs) + "/" + std::to_string(shards) + ", store " +
                           (store_same ? "identical" : "DIFFERENT"));
}

/// Every downstream metric output for a store, as one text blob.
std::string metric_outputs(const CorpusStore& store) {
    std::ostringstream out;
    const auto cores = window_cores(store, 4000, hw_threads());
    out << metrics_io::series_csv(turnover_series(cores));
    out << metrics_io::series_csv(coverage_series(cores.front(), store, store.years()));
    const auto part = partition_core_transition(cores.front(), cores.back());
    for (const auto* words : {&part.both, &part.only_old, &part.only_new}) {
        out << metrics_io::series_csv(coverage_series(*words, store, store.years()));
    }
    out << metrics_io::key_values_csv(metrics_io::pos_key_values(pos_composition(cores.front())));
    out << metrics_io::key_values_csv(metrics_io::pos_key_values(pos_dropout(cores.front(), cores.back())));
    const auto modern = aggregate_window(store, {1950, 1999}, hw_threads());
    const auto share = bookshare_core(modern, 0.5);
    out << metrics_io::overlap_json(overlap_report(frequency_core(modern, share.size()), share));
    out << text::format_double(frequency_bookshare_correlation(modern)) << '\n';
    out << text::format_double(frequency_bookshare_correlation(modern, 1000)) << '\n';
    out << core_size_for_coverage(modern, 0.75) << '\n';
    std::ostringstream tsv;
    write_core_tsv(tsv, cores[1]);
    out << tsv.str();
    return out.str();
}

Outcome persistence_round_trip() {
    auto& c = churn_corpus();
    // in-memory store straight from the shards, never saved
    std::vector<fs::path> shards;
    for (std::size_t i = 0; i < c.config.shards; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "shard-%03zu.tsv", i);
        shards.push_back(c.path / name);
    }
    IngestOptions opt;
    opt.threads = hw_threads();
    opt.volume_totals = read_volume_sidecar(c.path / "total_counts.tsv");
    const auto fresh = ingest_shards(synth::corpus_config_for(c.config), shards, opt);
    const auto before = metric_outputs(fresh);
    save_store(fresh, c.dir / "resaved.vcs");
    const auto after = metric_outputs(load_store(c.dir / "resaved.vcs"));
    const auto from_cli = metric_outputs(c.store);
    return pass_if(before == after && before == from_cli,
                   std::to_string(before.size()) + " bytes of metric output " +
                       (before == after ? "identical" : "DIFFERENT") + " after save/load, " +
                       (before == from_cli ? "identical" : "DIFFERENT") + " for the CLI-written store");
}

Outcome full_data() {
    const char* path = std::getenv("VCORE_FULL_DATA_STORE");
    if (!path || !*path) return {Verdict::Skip, "set VCORE_FULL_DATA_STORE to a store of English GBN v2 1-grams"};
    const auto store = load_store(path);
    const unsigned th = hw_threads();
    std::vector<std::string> fails;
    std::ostringstream d;
    auto check = [&](bool ok, const std::string& what) {
        d << what << (ok ? "" : " [out of tolerance]") << "; ";
        if (!ok) fails.push_back(what);
    };
    const auto windows = standard_windows(store.years(), 50);
    std::vector<WindowTable> tables;
    for (const auto& w : windows) tables.push_back(aggregate_window(store, w, th));
    for (std::size_t k : {1000u, 2000u, 4000u, 8000u}) {
        std::vector<Core> cores;
        for (const auto& t : tables) cores.push_back(frequency_core(t, k));
        const double m = mean_of(turnover_series(cores));
        check(m >= 0.11 && m <= 0.17, "K=" + std::to_string(k) + " mean dropout " + fmt(m));
    }
    const auto core1800 = frequency_core(aggregate_window(store, windows::kCore1800, th), 1000);
    const auto cov = coverage_series(core1800, store, {1800, std::min(2000, store.years().last)});
    const double c0 = cov.points.front().y, c1 = cov.points.back().y;
    check(std::abs(c0 - 0.7) <= 0.05 && std::abs(c1 - 0.6) <= 0.05, "1800-core coverage " + fmt(c0) + " -> " + fmt(c1));
    const auto modern = aggregate_window(store, windows::kCore2000, th);
    const auto share = bookshare_core(modern, 0.5);
    check(std::abs(static_cast<double>(share.size()) / 2302.0 - 1.0) <= 0.05,
          "book-share(0.5) size " + std::to_string(share.size()));
    const auto rep = overlap_report(frequency_core(modern, share.size()), share);
    check(std::abs(rep.overlap_pct - 0.79) <= 0.03, "overlap " + fmt(rep.overlap_pct));
    check(std::abs(static_cast<double>(rep.symmetric_difference()) / 482.0 - 1.0) <= 0.10,
          "symmetric difference " + std::to_string(rep.symmetric_difference()));
    const double r_all = frequency_bookshare_correlation(modern);
    const double r_top = frequency_bookshare_correlation(modern, 1000);
    check(std::abs(r_all - 0.15) <= 0.05 && std::abs(r_top - 0.25) <= 0.05,
          "correlation all " + fmt(r_all) + ", top-1000 " + fmt(r_top));
    const auto k75 = core_size_for_coverage(modern, 0.75);
    check(std::abs(static_cast<double>(k75) / 2300.0 - 1.0) <= 0.10, "K(0.75) " + std::to_string(k75));
    return pass_if(fails.empty(), d.str());
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1 planted churn recovered by turnover", planted_churn},
        {"A2 dropout insensitive to core size", core_size_insensitivity},
        {"A3 Zipf coverage inversion", zipf_inversion},
        {"A4 transition coverage decomposition", decomposition_identity},
        {"A5 POS composition x POS dropout identity", pos_identity},
        {"A6 brute-force equivalence on 10,000 lines", brute_force_equivalence},
        {"A7 thread-count determinism", thread_determinism},
        {"A8 store persistence round trip", persistence_round_trip},
        {"A9 full English data (optional)", full_data},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        failed += o.verdict == Verdict::Fail;
        std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "acceptance: all required criteria passed" : "acceptance: failures present") << '\n';
    return failed == 0 ? 0 : 1;
}
