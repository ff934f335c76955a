#include "vcore/cli.hpp"

#include "vcore/config.hpp"
#include "vcore/errors.hpp"
#include "vcore/ingest.hpp"
#include "vcore/io.hpp"
#include "vcore/metrics.hpp"
#include "vcore/metrics_io.hpp"
#include "vcore/store.hpp"
#include "vcore/svg.hpp"
#include "vcore/synth.hpp"
#include "vcore/text.hpp"
#include "vcore/windows.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace vcore::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string store;
    std::string out_dir = ".";
    std::string in_dir;
    std::string format = "csv";
    std::string volumes;
    std::string windows = "standard";
    std::string years;
    std::string words;
    std::string preset;
    std::string synth_config;
    std::vector<std::string> window;
    std::vector<std::string> inputs;
    std::size_t k = 0;
    double threshold = -1.0;
    int width = 50;
    int svg_width = 720;
    int svg_height = 420;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
    bool no_timestamp = false;
    bool no_store = false;
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Collects outputs of one subcommand and writes its manifest last.
class Run {
public:
    Run(std::string subcommand, const Options& opt, fs::path out_dir)
        : subcommand_(std::move(subcommand)), opt_(opt), out_dir_(std::move(out_dir)) {
        fs::create_directories(out_dir_);
        started_ = opt.no_timestamp ? "" : utc_now();
    }

    const fs::path& out_dir() const { return out_dir_; }

    void write(const std::string& name, std::string_view contents) {
        io::write_atomic(out_dir_ / name, contents);
        outputs_.push_back({name, io::crc32_hex(io::crc32(contents))});
    }

    /// Records a file already written into the output directory.
    void record(const fs::path& file) {
        const auto bytes = io::read_binary(file);
        outputs_.push_back({fs::relative(file, out_dir_).generic_string(), io::crc32_hex(io::crc32(bytes))});
    }

    void set_config(const std::string& path, const std::string& hash) {
        config_path_ = path;
        config_hash_ = hash;
    }
    void set_store(const fs::path& path) {
        store_path_ = path.string();
        store_checksum_ = io::crc32_hex(store_file_checksum(path));
    }
    void add_input(const std::string& path) { inputs_.push_back(path); }
    void set_parameters(ojson params) { parameters_ = std::move(params); }

    void finish() {
        if (config_hash_.empty()) config_hash_ = io::crc32_hex(io::crc32(parameters_.dump()));
        ojson outputs = ojson::array();
        for (const auto& [name, crc] : outputs_) outputs.push_back({{"file", name}, {"crc32", crc}});
        ojson doc = {
            {"schema", "vcore.manifest/1"},
            {"subcommand", subcommand_},
            {"tool_version", std::string(kToolVersion)},
            {"config_path", config_path_},
            {"config_hash", config_hash_},
            {"parameters", parameters_},
            {"inputs", inputs_},
            {"store", store_path_},
            {"store_checksum", store_checksum_},
            {"output_dir", out_dir_.string()},
            {"outputs", std::move(outputs)},
            {"started_at", started_},
            {"finished_at", opt_.no_timestamp ? "" : utc_now()},
        };
        io::write_atomic(out_dir_ / (subcommand_ + ".manifest.json"), doc.dump(2) + "\n");
    }

private:
    std::string subcommand_;
    const Options& opt_;
    fs::path out_dir_;
    std::string started_;
    std::string config_path_;
    std::string config_hash_;
    std::string store_path_;
    std::string store_checksum_;
    std::vector<std::string> inputs_;
    ojson parameters_ = ojson::object();
    std::vector<std::pair<std::string, std::string>> outputs_;
};

fs::path resolve_store(const std::string& flag) {
    fs::path p = flag;
    if (p.empty()) {
        const char* env = std::getenv(kDataDirEnv);
        if (!env || !*env) throw UsageError(std::string("--store is required (or set ") + kDataDirEnv + ")");
        p = fs::path(env);
    }
    if (fs::is_directory(p)) p /= "corpus.vcs";
    return p;
}

WindowSpec parse_window(const std::string& text) {
    try {
        return WindowSpec::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

YearRange parse_years(const std::string& text, YearRange fallback) {
    if (text.empty()) return fallback;
    const auto w = parse_window(text);
    return {w.start_year, w.end_year};
}

void require_core_method(const Options& opt) {
    const bool has_k = opt.k > 0;
    const bool has_t = opt.threshold >= 0.0;
    if (has_k == has_t) throw UsageError("give exactly one of --k or --threshold");
    if (has_t && !(opt.threshold > 0.0 && opt.threshold <= 1.0)) throw UsageError("--threshold must be in (0, 1]");
}

void require_windows(const Options& opt, std::size_t n) {
    if (opt.window.size() != n) {
        throw UsageError("expected " + std::to_string(n) + " --window value" + (n == 1 ? "" : "s") + ", got " +
                         std::to_string(opt.window.size()));
    }
    for (const auto& w : opt.window) parse_window(w);
}

Core make_core(const WindowTable& table, const Options& opt) {
    return opt.k > 0 ? frequency_core(table, opt.k) : bookshare_core(table, opt.threshold);
}

ojson core_parameters(const Options& opt) {
    ojson p = ojson::object();
    if (opt.k > 0) p["k"] = opt.k;
    if (opt.threshold >= 0.0) p["threshold"] = opt.threshold;
    p["window"] = opt.window;
    if (!opt.years.empty()) p["years"] = opt.years;
    return p;
}

bool json_format(const Options& opt) { return opt.format == "json"; }

void emit_series(Run& run, const std::string& stem, const MetricSeries& series, const Options& opt) {
    series.validate();
    if (json_format(opt)) {
        run.write(stem + ".json", metrics_io::series_json(series));
    } else {
        run.write(stem + ".csv", metrics_io::series_csv(series));
    }
}

void emit_key_values(Run& run, const std::string& stem, const metrics_io::KeyValues& values, const Options& opt) {
    if (json_format(opt)) {
        run.write(stem + ".json", metrics_io::key_values_json(stem, values));
    } else {
        run.write(stem + ".csv", metrics_io::key_values_csv(values));
    }
}

struct Loaded {
    fs::path path;
    CorpusStore store;
};

Loaded open_store(const Options& opt) {
    const auto path = resolve_store(opt.store);
    return {path, load_store(path)};
}

// ---------------------------------------------------------------- commands

int cmd_ingest(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.config.empty()) throw UsageError("--config is required");
    if (opt.inputs.empty()) throw UsageError("at least one shard file is required");
    const auto store_path = resolve_store(opt.store);
    const auto config = CorpusConfig::load(opt.config);
    IngestOptions io_opt;
    io_opt.threads = opt.threads;
    if (!opt.volumes.empty()) io_opt.volume_totals = read_volume_sidecar(opt.volumes);
    std::vector<fs::path> shards(opt.inputs.begin(), opt.inputs.end());

    Run run("ingest", opt, opt.out_dir);
    IngestStats stats;
    const auto store = ingest_shards(config, shards, io_opt, &stats);
    if (store_path.has_parent_path()) fs::create_directories(store_path.parent_path());
    save_store(store, store_path);

    for (const auto& e : stats.errors) err << "warning: " << e << '\n';
    for (int y : stats.empty_years) err << "warning: year " << y << " has no lexical tokens\n";
    run.write("ingest_stats.json", stats.to_json_text() + "\n");
    run.set_config(opt.config, config.hash());
    for (const auto& s : opt.inputs) run.add_input(s);
    if (!opt.volumes.empty()) run.add_input(opt.volumes);
    run.set_store(store_path);
    run.set_parameters({{"threads_independent", true}});
    run.finish();
    out << "ingested " << stats.accepted << " rows (" << stats.malformed << " malformed, " << stats.non_lexical
        << " non-lexical) into " << store_path.string() << ": " << store.word_count() << " words, "
        << store.entry_count() << " postings\n";
    return 0;
}

int cmd_core(const Options& opt, std::ostream& out) {
    require_windows(opt, 1);
    require_core_method(opt);
    const auto [path, store] = open_store(opt);
    const auto spec = parse_window(opt.window[0]);
    const auto table = aggregate_window(store, spec, opt.threads);
    const auto core = make_core(table, opt);

    Run run("core", opt, opt.out_dir);
    run.set_store(path);
    run.set_parameters(core_parameters(opt));
    if (json_format(opt)) {
        ojson rows = ojson::array();
        std::size_t rank = 1;
        for (const auto& e : core.entries) {
            rows.push_back({{"rank", rank++},
                            {"word", e.word},
                            {"rel_freq", e.relative_frequency},
                            {"volume_share", e.volume_share},
                            {"pos", std::string(to_string(e.pos))}});
        }
        ojson doc = {{"schema", "vcore.core/1"},
                     {"window", spec.label()},
                     {"method", describe(core.method)},
                     {"words", std::move(rows)}};
        run.write("core.json", doc.dump(2) + "\n");
    } else {
        std::ostringstream tsv;
        write_core_tsv(tsv, core);
        run.write("core.tsv", tsv.str());
    }
    run.finish();
    out << "core " << describe(core.method) << " @" << spec.label() << ": " << core.size() << " words\n";
    return 0;
}

int cmd_turnover(const Options& opt, std::ostream& out) {
    require_core_method(opt);
    std::vector<WindowSpec> specs;
    if (opt.windows != "standard") {
        std::stringstream ss(opt.windows);
        std::string item;
        while (std::getline(ss, item, ',')) specs.push_back(parse_window(item));
        if (specs.size() < 2) throw UsageError("--windows needs at least two windows");
    }
    const auto [path, store] = open_store(opt);
    if (specs.empty()) specs = standard_windows(store.years(), opt.width);

    std::vector<Core> cores;
    for (const auto& spec : specs) cores.push_back(make_core(aggregate_window(store, spec, opt.threads), opt));
    auto series = turnover_series(cores);

    Run run("turnover", opt, opt.out_dir);
    run.set_store(path);
    auto params = core_parameters(opt);
    ojson labels = ojson::array();
    for (const auto& s : specs) labels.push_back(s.label());
    params["windows"] = std::move(labels);
    run.set_parameters(std::move(params));
    emit_series(run, "turnover", series, opt);
    run.finish();
    double mean = 0;
    for (const auto& p : series.points) mean += p.y;
    mean /= static_cast<double>(series.points.size());
    out << "turnover over " << specs.size() << " windows, mean dropout " << text::format_double(mean) << '\n';
    return 0;
}

int cmd_coverage(const Options& opt, std::ostream& out) {
    require_windows(opt, 1);
    require_core_method(opt);
    const auto [path, store] = open_store(opt);
    const auto years = parse_years(opt.years, store.years());
    const auto core = make_core(aggregate_window(store, parse_window(opt.window[0]), opt.threads), opt);
    const auto series = coverage_series(core, store, years);

    Run run("coverage", opt, opt.out_dir);
    run.set_store(path);
    run.set_parameters(core_parameters(opt));
    emit_series(run, "coverage", series, opt);
    run.finish();
    out << "coverage of " << core.size() << "-word core over " << years.size() << " years\n";
    return 0;
}

int cmd_overlap(const Options& opt, std::ostream& out) {
    require_windows(opt, 1);
    const double threshold = opt.threshold >= 0.0 ? opt.threshold : 0.5;
    if (!(threshold > 0.0 && threshold <= 1.0)) throw UsageError("--threshold must be in (0, 1]");
    const auto [path, store] = open_store(opt);
    const auto table = aggregate_window(store, parse_window(opt.window[0]), opt.threads);
    const auto by_share = bookshare_core(table, threshold);
    const auto by_freq = frequency_core(table, opt.k > 0 ? opt.k : std::max<std::size_t>(1, by_share.size()));
    const auto report = overlap_report(by_freq, by_share);

    Run run("overlap", opt, opt.out_dir);
    run.set_store(path);
    auto params = core_parameters(opt);
    params["threshold"] = threshold;
    run.set_parameters(std::move(params));
    if (json_format(opt)) {
        run.write("overlap.json", metrics_io::overlap_json(report));
    } else {
        run.write("overlap.csv", metrics_io::key_values_csv(metrics_io::overlap_key_values(report)));
        std::string a, b;
        for (const auto& w : report.only_a) a += w + "\n";
        for (const auto& w : report.only_b) b += w + "\n";
        run.write("overlap_only_frequency.txt", a);
        run.write("overlap_only_bookshare.txt", b);
    }
    run.finish();
    out << "overlap " << text::format_double(report.overlap_pct) << ", symmetric difference "
        << report.symmetric_difference() << '\n';
    return 0;
}

int cmd_correlate(const Options& opt, std::ostream& out) {
    require_windows(opt, 1);
    const auto [path, store] = open_store(opt);
    const auto table = aggregate_window(store, parse_window(opt.window[0]), opt.threads);
    metrics_io::KeyValues values = {
        {"words_all", static_cast<double>(table.entries.size())},
        {"pearson_all", frequency_bookshare_correlation(table)},
    };
    if (opt.k > 0) {
        values.emplace_back("top_k", static_cast<double>(std::min(opt.k, table.entries.size())));
        values.emplace_back("pearson_top_k", frequency_bookshare_correlation(table, opt.k));
    }
    Run run("correlate", opt, opt.out_dir);
    run.set_store(path);
    run.set_parameters(core_parameters(opt));
    emit_key_values(run, "correlation", values, opt);
    run.finish();
    out << "pearson(rel_freq, book_share) over " << table.entries.size() << " words: "
        << text::format_double(values[1].second) << '\n';
    return 0;
}

int cmd_pos(const Options& opt, std::ostream& out) {
    require_windows(opt, 2);
    require_core_method(opt);
    const auto [path, store] = open_store(opt);
    const auto old_core = make_core(aggregate_window(store, parse_window(opt.window[0]), opt.threads), opt);
    const auto new_core = make_core(aggregate_window(store, parse_window(opt.window[1]), opt.threads), opt);

    Run run("pos", opt, opt.out_dir);
    run.set_store(path);
    run.set_parameters(core_parameters(opt));
    emit_key_values(run, "pos_composition_old", metrics_io::pos_key_values(pos_composition(old_core)), opt);
    emit_key_values(run, "pos_composition_new", metrics_io::pos_key_values(pos_composition(new_core)), opt);
    emit_key_values(run, "pos_dropout", metrics_io::pos_key_values(pos_dropout(old_core, new_core)), opt);
    run.finish();
    out << "pos structure of " << old_core.size() << "-word cores " << opt.window[0] << " -> " << opt.window[1] << '\n';
    return 0;
}

int cmd_transition(const Options& opt, std::ostream& out) {
    require_windows(opt, 2);
    require_core_method(opt);
    const auto [path, store] = open_store(opt);
    const auto years = parse_years(opt.years, store.years());
    const auto old_core = make_core(aggregate_window(store, parse_window(opt.window[0]), opt.threads), opt);
    const auto new_core = make_core(aggregate_window(store, parse_window(opt.window[1]), opt.threads), opt);
    const auto part = partition_core_transition(old_core, new_core);

    auto named = [&](std::span<const std::string> words, const std::string& name) {
        auto s = coverage_series(words, store, years);
        s.name = name;
        return s;
    };
    const auto old_words = old_core.words();
    const auto new_words = new_core.words();
    std::vector<MetricSeries> series = {
        named(old_words, "old_core"), named(new_words, "new_core"), named(part.both, "both"),
        named(part.only_old, "only_old"), named(part.only_new, "only_new"),
    };

    Run run("transition", opt, opt.out_dir);
    run.set_store(path);
    run.set_parameters(core_parameters(opt));
    if (json_format(opt)) {
        run.write("transition.json", metrics_io::series_list_json(series));
    } else {
        for (const auto& s : series) run.write("transition_" + s.name + ".csv", metrics_io::series_csv(s));
    }
    emit_key_values(run, "transition_sizes",
                    {{"both", static_cast<double>(part.both.size())},
                     {"only_old", static_cast<double>(part.only_old.size())},
                     {"only_new", static_cast<double>(part.only_new.size())}},
                    opt);
    run.finish();
    out << "transition: " << part.both.size() << " kept, " << part.only_old.size() << " left, "
        << part.only_new.size() << " entered\n";
    return 0;
}

int cmd_group(const Options& opt, std::ostream& out) {
    if (opt.words.empty()) throw UsageError("--words is required");
    std::vector<std::string> words;
    {
        std::stringstream ss(io::read_text(opt.words));
        std::string line;
        while (std::getline(ss, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty() && line.front() != '#') words.push_back(line);
        }
    }
    const auto [path, store] = open_store(opt);
    const auto years = parse_years(opt.years, store.years());
    auto series = group_frequency_series(words, store, years);
    series.name = fs::path(opt.words).stem().string();

    Run run("group", opt, opt.out_dir);
    run.set_store(path);
    run.add_input(opt.words);
    run.set_parameters({{"words_file", opt.words}, {"years", opt.years}});
    emit_series(run, "group", series, opt);
    run.finish();
    out << "group series for " << words.size() << " words over " << years.size() << " years\n";
    return 0;
}

int cmd_synth(const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.preset.empty() == opt.synth_config.empty()) throw UsageError("give exactly one of --preset or --synth-config");
    synth::SynthConfig cfg;
    try {
        cfg = opt.preset.empty() ? synth::SynthConfig::from_json_text(io::read_text(opt.synth_config))
                                 : synth::SynthConfig::preset(opt.preset);
    } catch (const ConfigInvalid& e) {
        if (!opt.preset.empty()) throw UsageError(e.what());
        throw;
    }
    if (opt.seed != 0) cfg.seed = opt.seed;
    cfg.validate();
    for (const auto& w : cfg.warnings()) err << "warning: " << w << '\n';

    Run run("synth", opt, opt.out_dir);
    const auto generated = synth::generate_corpus(cfg, opt.out_dir, opt.threads);
    for (const auto& s : generated.shards) run.record(s);
    run.record(generated.volumes);
    run.record(generated.truth);
    run.record(generated.corpus_config);
    run.set_config(opt.synth_config, io::crc32_hex(io::crc32(cfg.to_json_text())));
    run.set_parameters(ojson::parse(cfg.to_json_text()));

    if (!opt.no_store) {
        IngestOptions io_opt;
        io_opt.threads = opt.threads;
        io_opt.volume_totals = read_volume_sidecar(generated.volumes);
        IngestStats stats;
        const auto store = ingest_shards(synth::corpus_config_for(cfg), generated.shards, io_opt, &stats);
        const auto store_path = fs::path(opt.out_dir) / "corpus.vcs";
        save_store(store, store_path);
        run.write("ingest_stats.json", stats.to_json_text() + "\n");
        run.record(store_path);
        run.set_store(store_path);
        out << "synthetic corpus: " << stats.accepted << " rows, " << store.word_count() << " words -> "
            << store_path.string() << '\n';
    } else {
        out << "synthetic corpus written to " << opt.out_dir << '\n';
    }
    run.finish();
    return 0;
}

// ------------------------------------------------------------------ report

std::optional<MetricSeries> load_series(const fs::path& dir, const std::string& stem, const std::string& name) {
    if (fs::exists(dir / (stem + ".csv"))) return metrics_io::parse_series_csv(io::read_text(dir / (stem + ".csv")), name);
    if (fs::exists(dir / (stem + ".json"))) {
        const auto doc = ojson::parse(io::read_text(dir / (stem + ".json")));
        MetricSeries s{name, {}};
        for (const auto& p : doc.at("points")) s.points.push_back({p.at("x").get<int>(), p.at("y").get<double>()});
        return s;
    }
    return std::nullopt;
}

std::optional<metrics_io::KeyValues> load_key_values(const fs::path& dir, const std::string& stem) {
    if (fs::exists(dir / (stem + ".csv"))) return metrics_io::parse_key_values_csv(io::read_text(dir / (stem + ".csv")));
    if (fs::exists(dir / (stem + ".json"))) {
        const auto doc = ojson::parse(io::read_text(dir / (stem + ".json")));
        metrics_io::KeyValues kv;
        for (const auto& [k, v] : doc.at("values").items()) kv.emplace_back(k, v.get<double>());
        return kv;
    }
    return std::nullopt;
}

std::vector<MetricSeries> load_transition(const fs::path& dir) {
    std::vector<MetricSeries> out;
    if (fs::exists(dir / "transition.json")) {
        const auto doc = ojson::parse(io::read_text(dir / "transition.json"));
        for (const auto& s : doc.at("series")) {
            MetricSeries m{s.at("name").get<std::string>(), {}};
            for (const auto& p : s.at("points")) m.points.push_back({p.at("x").get<int>(), p.at("y").get<double>()});
            out.push_back(std::move(m));
        }
        return out;
    }
    for (const char* name : {"old_core", "new_core", "both", "only_old", "only_new"}) {
        if (auto s = load_series(dir, std::string("transition_") + name, name)) out.push_back(std::move(*s));
    }
    return out;
}

/// Verifies every manifest in `dir` against the files it lists and that all
/// of them were computed from the same store. Returns the set of files
/// covered by some manifest.
std::vector<std::string> verify_manifests(const fs::path& dir, std::string& store_checksum) {
    std::vector<fs::path> manifests;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 14 && name.ends_with(".manifest.json") && name != "report.manifest.json") {
            manifests.push_back(entry.path());
        }
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw ManifestMismatch(dir.string() + ": no run manifests found");
    std::vector<std::string> covered;
    for (const auto& m : manifests) {
        ojson doc;
        try {
            doc = ojson::parse(io::read_text(m));
        } catch (const ojson::exception& e) {
            throw ManifestMismatch(m.string() + ": unreadable manifest: " + e.what());
        }
        const auto checksum = doc.value("store_checksum", std::string());
        if (!checksum.empty()) {
            if (store_checksum.empty()) {
                store_checksum = checksum;
            } else if (checksum != store_checksum) {
                throw ManifestMismatch(m.string() + ": computed from store " + checksum + ", other inputs from " +
                                       store_checksum);
            }
        }
        for (const auto& o : doc.at("outputs")) {
            const auto file = o.at("file").get<std::string>();
            const auto path = dir / file;
            if (!fs::exists(path)) throw ManifestMismatch(m.string() + ": listed output " + file + " is missing");
            const auto crc = io::crc32_hex(io::crc32(io::read_binary(path)));
            if (crc != o.at("crc32").get<std::string>()) {
                throw ManifestMismatch(path.string() + ": contents do not match " + m.filename().string());
            }
            covered.push_back(file);
        }
    }
    return covered;
}

int cmd_report(const Options& opt, std::ostream& out) {
    const fs::path in_dir = opt.in_dir.empty() ? fs::path(opt.out_dir) : fs::path(opt.in_dir);
    if (!fs::is_directory(in_dir)) throw UsageError("--in must be a directory: " + in_dir.string());
    if (opt.svg_width < 200 || opt.svg_height < 150) throw UsageError("--width/--height too small");
    std::string store_checksum;
    const auto covered = verify_manifests(in_dir, store_checksum);
    auto require_covered = [&](const std::string& stem) {
        for (const char* ext : {".csv", ".json"}) {
            const auto file = stem + ext;
            if (fs::exists(in_dir / file) && std::find(covered.begin(), covered.end(), file) == covered.end()) {
                throw ManifestMismatch((in_dir / file).string() + " is not listed in any run manifest");
            }
        }
    };

    svg::ChartOptions base;
    base.width = opt.svg_width;
    base.height = opt.svg_height;
    base.timestamp = opt.no_timestamp ? "" : utc_now();

    Run run("report", opt, opt.out_dir);
    std::size_t charts = 0;
    auto line = [&](const std::string& file, std::vector<MetricSeries> series, std::string title, std::string y) {
        auto o = base;
        o.title = std::move(title);
        o.x_label = "year";
        o.y_label = std::move(y);
        run.write(file, svg::line_chart(series, o));
        ++charts;
    };

    require_covered("turnover");
    if (auto s = load_series(in_dir, "turnover", "dropout share")) {
        line("fig_turnover.svg", {*s}, "Core words dropped by the next window", "share dropped");
    }
    require_covered("coverage");
    if (auto s = load_series(in_dir, "coverage", "core coverage")) {
        line("fig_coverage.svg", {*s}, "Total frequency of core words", "relative frequency");
    }
    for (const char* name : {"old_core", "new_core", "both", "only_old", "only_new"}) {
        require_covered(std::string("transition_") + name);
    }
    require_covered("transition");
    if (auto t = load_transition(in_dir); !t.empty()) {
        line("fig_transition.svg", t, "Coverage by core transition group", "relative frequency");
    }
    require_covered("group");
    if (auto s = load_series(in_dir, "group", "group")) {
        line("fig_group.svg", {*s}, "Total frequency of word group", "relative frequency");
    }
    require_covered("pos_composition_old");
    require_covered("pos_composition_new");
    const auto comp_old = load_key_values(in_dir, "pos_composition_old");
    const auto comp_new = load_key_values(in_dir, "pos_composition_new");
    if (comp_old || comp_new) {
        std::vector<svg::BarGroup> groups;
        if (comp_old) groups.push_back({"old core", *comp_old});
        if (comp_new) groups.push_back({"new core", *comp_new});
        auto o = base;
        o.title = "Part-of-speech shares in the core";
        o.x_label = "part of speech";
        o.y_label = "share";
        run.write("fig_pos_composition.svg", svg::bar_chart(groups, o));
        ++charts;
    }
    require_covered("pos_dropout");
    if (auto d = load_key_values(in_dir, "pos_dropout")) {
        auto o = base;
        o.title = "Share of core words dropped, by part of speech";
        o.x_label = "part of speech";
        o.y_label = "share dropped";
        run.write("fig_pos_dropout.svg", svg::bar_chart({{"dropout", *d}}, o));
        ++charts;
    }
    if (charts == 0) throw Error(in_dir.string() + ": no chartable outputs found");
    run.add_input(in_dir.string());
    run.set_parameters({{"width", opt.svg_width}, {"height", opt.svg_height}, {"input_store_checksum", store_checksum}});
    run.finish();
    out << "rendered " << charts << " chart" << (charts == 1 ? "" : "s") << " into " << opt.out_dir << '\n';
    return 0;
}

// ------------------------------------------------------------------ wiring

void add_common(CLI::App* sub, Options& opt, bool store = true) {
    if (store) sub->add_option("--store", opt.store, "Store file or directory holding corpus.vcs");
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--threads", opt.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));
    sub->add_flag("--no-timestamp", opt.no_timestamp, "Leave timestamps out of manifests and SVGs");
}

void add_core_flags(CLI::App* sub, Options& opt, std::size_t windows) {
    auto* w = sub->add_option("--window", opt.window, "Year window START:END");
    if (windows > 0) w->expected(static_cast<int>(windows));
    sub->add_option("--k", opt.k, "Frequency core size")->check(CLI::PositiveNumber);
    sub->add_option("--threshold", opt.threshold, "Book-share threshold in (0,1]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Diachronic vocabulary-core analysis of yearly 1-gram counts", "vcore"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    auto* ingest = app.add_subcommand("ingest", "Parse 1-gram shards into a store");
    ingest->add_option("--config", opt.config, "Corpus config (JSON)")->required();
    ingest->add_option("--volumes", opt.volumes, "Per-year total volume sidecar");
    ingest->add_option("shards", opt.inputs, "Shard files (plain or .gz)")->required();
    add_common(ingest, opt);

    auto* core = app.add_subcommand("core", "Extract one vocabulary core");
    add_common(core, opt);
    add_core_flags(core, opt, 1);

    auto* turnover = app.add_subcommand("turnover", "Dropout between consecutive windows");
    add_common(turnover, opt);
    add_core_flags(turnover, opt, 0);
    turnover->add_option("--windows", opt.windows, "'standard' or a comma list of START:END")->capture_default_str();
    turnover->add_option("--width", opt.width, "Standard window width in years")->check(CLI::PositiveNumber);

    auto* coverage = app.add_subcommand("coverage", "Yearly total frequency of a core");
    add_common(coverage, opt);
    add_core_flags(coverage, opt, 1);
    coverage->add_option("--years", opt.years, "Year range START:END (default: whole store)");

    auto* overlap = app.add_subcommand("overlap", "Frequency core vs book-share core");
    add_common(overlap, opt);
    add_core_flags(overlap, opt, 1);

    auto* correlate = app.add_subcommand("correlate", "Correlation of frequency and book share");
    add_common(correlate, opt);
    add_core_flags(correlate, opt, 1);

    auto* pos = app.add_subcommand("pos", "POS composition and POS dropout of two cores");
    add_common(pos, opt);
    add_core_flags(pos, opt, 0);

    auto* transition = app.add_subcommand("transition", "Coverage of kept / dropped / entered core words");
    add_common(transition, opt);
    add_core_flags(transition, opt, 0);
    transition->add_option("--years", opt.years, "Year range START:END (default: whole store)");

    auto* group = app.add_subcommand("group", "Yearly total frequency of a word list");
    add_common(group, opt);
    group->add_option("--words", opt.words, "File with one word per line")->required();
    group->add_option("--years", opt.years, "Year range START:END (default: whole store)");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus with planted ground truth");
    add_common(synth_cmd, opt, false);
    synth_cmd->add_option("--preset", opt.preset, "Preset name")->check(CLI::IsMember(synth::SynthConfig::preset_names()));
    synth_cmd->add_option("--synth-config", opt.synth_config, "Generator config (JSON)");
    synth_cmd->add_option("--seed", opt.seed, "Override the generator seed");
    synth_cmd->add_flag("--no-store", opt.no_store, "Only write shards, skip ingestion");

    auto* report = app.add_subcommand("report", "Render SVG charts from a run directory");
    add_common(report, opt, false);
    report->add_option("--in", opt.in_dir, "Directory with metric outputs (default: --out)");
    report->add_option("--width", opt.svg_width, "Figure width in pixels")->capture_default_str();
    report->add_option("--height", opt.svg_height, "Figure height in pixels")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(opt, out, err);
        if (core->parsed()) return cmd_core(opt, out);
        if (turnover->parsed()) return cmd_turnover(opt, out);
        if (coverage->parsed()) return cmd_coverage(opt, out);
        if (overlap->parsed()) return cmd_overlap(opt, out);
        if (correlate->parsed()) return cmd_correlate(opt, out);
        if (pos->parsed()) return cmd_pos(opt, out);
        if (transition->parsed()) return cmd_transition(opt, out);
        if (group->parsed()) return cmd_group(opt, out);
        if (synth_cmd->parsed()) return cmd_synth(opt, out, err);
        if (report->parsed()) return cmd_report(opt, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, out, err);
}

}  // namespace vcore::cli
