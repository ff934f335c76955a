#include "vcore/synth.hpp"

#include "vcore/errors.hpp"
#include "vcore/io.hpp"
#include "vcore/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace vcore::synth {
namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kChurnBlock = 20;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(purpose)) + index));
}

json tag_map_json(const std::map<PosTag, double>& m) {
    json obj = json::object();
    for (const auto& [t, v] : m) obj[std::string(to_string(t))] = v;
    return obj;
}

std::map<PosTag, double> tag_map_from(const json& obj) {
    std::map<PosTag, double> out;
    for (const auto& [key, value] : obj.items()) {
        const auto tag = parse_pos_tag(key);
        if (!tag) throw ConfigInvalid("unknown POS tag '" + key + "'");
        out[*tag] = value.get<double>();
    }
    return out;
}

struct Slots {
    std::vector<PosTag> tag;          // per rank slot
    std::vector<bool> in_group;       // per rank slot
    std::vector<double> base_prob;    // normalised Zipf-Mandelbrot
    double group_prob = 0.0;
};

Slots make_slots(const SynthConfig& cfg) {
    Slots s;
    const std::size_t v = cfg.vocabulary;
    s.base_prob.resize(v);
    double total = 0.0;
    for (std::size_t r = 0; r < v; ++r) {
        s.base_prob[r] = std::pow(static_cast<double>(r + 1) + cfg.zipf_q, -cfg.zipf_s);
    }
    // sum smallest first
    for (std::size_t r = v; r-- > 0;) total += s.base_prob[r];
    for (auto& p : s.base_prob) p /= total;

    std::vector<PosTag> tags;
    std::vector<double> weights;
    for (const auto& [t, w] : cfg.pos_mix) {
        tags.push_back(t);
        weights.push_back(w);
    }
    auto rng = stream(cfg.seed, 0x7461677300ULL, 0);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    s.tag.resize(v);
    for (auto& t : s.tag) t = tags[pick(rng)];

    s.in_group.assign(v, false);
    for (std::size_t i = 0; i < cfg.group.size; ++i) {
        const auto slot = cfg.group.first_rank - 1 + i * cfg.group.stride;
        s.in_group[slot] = true;
        s.group_prob += s.base_prob[slot];
    }
    return s;
}

/// Replaces an exact, carry-rounded fraction of every 20-slot block of each
/// tag's band slots with fresh words.
TransitionTruth churn_boundary(const SynthConfig& cfg, const Slots& slots, std::vector<std::uint64_t>& serial_of,
                               std::uint64_t& next_serial, std::size_t era) {
    TransitionTruth truth;
    auto rng = stream(cfg.seed, 0x636875726EULL, era);
    const std::size_t band = cfg.churn_band();
    for (PosTag tag : kAllPosTags) {
        std::vector<std::size_t> members;
        for (std::size_t r = 0; r < band; ++r) {
            if (slots.tag[r] == tag && !slots.in_group[r]) members.push_back(r);
        }
        if (members.empty()) continue;
        const auto it = cfg.tag_churn.find(tag);
        const double rate = it != cfg.tag_churn.end() ? it->second : cfg.churn;
        auto& tc = truth.by_tag[tag];
        tc.slots = members.size();
        std::size_t done = 0;
        for (std::size_t b = 0; b < members.size(); b += kChurnBlock) {
            const std::size_t n = std::min(kChurnBlock, members.size() - b);
            const auto quota = static_cast<std::size_t>(std::floor(rate * static_cast<double>(done + n) + 0.5) -
                                                        std::floor(rate * static_cast<double>(done) + 0.5));
            done += n;
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t i = 0; i < quota; ++i) serial_of[members[b + order[i]]] = next_serial++;
            tc.replaced += quota;
        }
        truth.band_slots += tc.slots;
        truth.replaced += tc.replaced;
    }
    return truth;
}

struct YearCounts {
    std::vector<std::uint64_t> counts;
    std::vector<std::uint64_t> volumes;
};

YearCounts sample_year(const SynthConfig& cfg, const Slots& slots, int year) {
    const std::size_t v = cfg.vocabulary;
    const double span = static_cast<double>(cfg.years.last - cfg.years.first);
    const double t = span > 0 ? static_cast<double>(year - cfg.years.first) / span : 0.0;
    const double group_scale = std::pow(cfg.group.decay, t);
    const double rest_scale =
        slots.group_prob < 1.0 ? (1.0 - slots.group_prob * group_scale) / (1.0 - slots.group_prob) : 0.0;

    std::vector<double> prob(v);
    for (std::size_t r = 0; r < v; ++r) prob[r] = slots.base_prob[r] * (slots.in_group[r] ? group_scale : rest_scale);

    YearCounts out;
    out.counts.assign(v, 0);
    out.volumes.assign(v, 0);
    auto rng = stream(cfg.seed, 0x7965617200ULL, static_cast<std::uint64_t>(year));
    const auto n_tokens = cfg.tokens_per_year;
    if (cfg.sampling == Sampling::Expected) {
        for (std::size_t r = 0; r < v; ++r) out.counts[r] = static_cast<std::uint64_t>(std::llround(prob[r] * static_cast<double>(n_tokens)));
    } else {
        // conditional-binomial decomposition of the multinomial
        std::vector<double> suffix(v + 1, 0.0);
        for (std::size_t r = v; r-- > 0;) suffix[r] = suffix[r + 1] + prob[r];
        std::uint64_t left = n_tokens;
        for (std::size_t r = 0; r < v && left > 0; ++r) {
            const double p = suffix[r] > 0 ? std::min(1.0, prob[r] / suffix[r]) : 1.0;
            std::uint64_t c = left;
            if (r + 1 < v && p < 1.0) {
                std::binomial_distribution<std::uint64_t> draw(left, p);
                c = draw(rng);
            }
            out.counts[r] = c;
            left -= c;
        }
    }
    const auto books = static_cast<double>(cfg.volumes_per_year);
    const double log_miss = std::log1p(-1.0 / books);
    for (std::size_t r = 0; r < v; ++r) {
        const auto c = out.counts[r];
        if (c == 0) continue;
        const double hit = -std::expm1(static_cast<double>(c) * log_miss);
        std::uint64_t vol = 0;
        if (cfg.sampling == Sampling::Expected) {
            vol = static_cast<std::uint64_t>(std::llround(books * hit));
        } else {
            std::binomial_distribution<std::uint64_t> draw(cfg.volumes_per_year, std::clamp(hit, 0.0, 1.0));
            vol = draw(rng);
        }
        out.volumes[r] = std::clamp<std::uint64_t>(vol, 1, std::min(c, cfg.volumes_per_year));
    }
    return out;
}

}  // namespace

std::size_t SynthConfig::churn_band() const { return std::min(vocabulary, 2 * core_size); }

void SynthConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigInvalid("synthetic config: " + m); };
    if (vocabulary < 100) fail("vocabulary must be at least 100");
    if (!(zipf_s > 0.0)) fail("zipf_s must be positive");
    if (!(zipf_q >= 0.0)) fail("zipf_q must be non-negative");
    if (years.empty()) fail("years must be a non-empty range");
    if (era_length < 1) fail("era_length must be positive");
    if (!(churn >= 0.0 && churn <= 1.0)) fail("churn must be in [0, 1]");
    for (const auto& [t, p] : tag_churn) {
        if (!(p >= 0.0 && p <= 1.0)) fail("tag churn for " + std::string(to_string(t)) + " must be in [0, 1]");
    }
    if (core_size < 1) fail("core_size must be positive");
    if (tokens_per_year < 1) fail("tokens_per_year must be positive");
    if (volumes_per_year < 1) fail("volumes_per_year must be positive");
    if (shards < 1) fail("shards must be positive");
    if (group.size > 0) {
        if (group.first_rank < 1 || group.stride < 1) fail("group first_rank and stride must be positive");
        if (group.first_rank - 1 + (group.size - 1) * group.stride >= vocabulary) fail("group exceeds vocabulary");
        if (!(group.decay > 0.0)) fail("group decay must be positive");
    }
    if (pos_mix.empty()) fail("pos_mix must not be empty");
    for (const auto& [t, w] : pos_mix) {
        if (!(w > 0.0)) fail("pos_mix weights must be positive");
        if (t == PosTag::Untagged) fail("pos_mix may not contain UNTAGGED");
    }
}

std::vector<std::string> SynthConfig::warnings() const {
    std::vector<std::string> out;
    if (sampling == Sampling::Multinomial && tokens_per_year < 100 * vocabulary) {
        out.push_back("tokens_per_year below 100 x vocabulary; top-K boundaries will be noisy");
    }
    return out;
}

std::string SynthConfig::to_json_text() const {
    json doc = {
        {"format_version", 1},
        {"language", language},
        {"vocabulary", vocabulary},
        {"zipf_s", zipf_s},
        {"zipf_q", zipf_q},
        {"years", {years.first, years.last}},
        {"era_length", era_length},
        {"churn", churn},
        {"tag_churn", tag_map_json(tag_churn)},
        {"core_size", core_size},
        {"tokens_per_year", tokens_per_year},
        {"volumes_per_year", volumes_per_year},
        {"seed", seed},
        {"shards", shards},
        {"sampling", sampling == Sampling::Expected ? "expected" : "multinomial"},
        {"group",
         {{"size", group.size}, {"first_rank", group.first_rank}, {"stride", group.stride}, {"decay", group.decay}}},
        {"pos_mix", tag_map_json(pos_mix)},
    };
    return doc.dump(2) + "\n";
}

SynthConfig SynthConfig::from_json_text(std::string_view text) {
    try {
        const auto doc = json::parse(text);
        if (doc.value("format_version", 1) != 1) throw ConfigInvalid("unsupported synthetic config format_version");
        SynthConfig c;
        c.language = doc.value("language", c.language);
        c.vocabulary = doc.value("vocabulary", c.vocabulary);
        c.zipf_s = doc.value("zipf_s", c.zipf_s);
        c.zipf_q = doc.value("zipf_q", c.zipf_q);
        if (doc.contains("years")) c.years = {doc["years"].at(0).get<int>(), doc["years"].at(1).get<int>()};
        c.era_length = doc.value("era_length", c.era_length);
        c.churn = doc.value("churn", c.churn);
        if (doc.contains("tag_churn")) c.tag_churn = tag_map_from(doc["tag_churn"]);
        c.core_size = doc.value("core_size", c.core_size);
        c.tokens_per_year = doc.value("tokens_per_year", c.tokens_per_year);
        c.volumes_per_year = doc.value("volumes_per_year", c.volumes_per_year);
        c.seed = doc.value("seed", c.seed);
        c.shards = doc.value("shards", c.shards);
        const auto sampling = doc.value("sampling", std::string("multinomial"));
        if (sampling == "expected") {
            c.sampling = Sampling::Expected;
        } else if (sampling == "multinomial") {
            c.sampling = Sampling::Multinomial;
        } else {
            throw ConfigInvalid("sampling must be 'multinomial' or 'expected'");
        }
        if (doc.contains("group")) {
            const auto& g = doc["group"];
            c.group.size = g.value("size", std::size_t{0});
            c.group.first_rank = g.value("first_rank", std::size_t{1});
            c.group.stride = g.value("stride", std::size_t{1});
            c.group.decay = g.value("decay", 1.0);
        }
        if (doc.contains("pos_mix")) c.pos_mix = tag_map_from(doc["pos_mix"]);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("synthetic config: ") + e.what());
    }
}

std::vector<std::string> SynthConfig::preset_names() {
    return {"churn15", "decay", "postag", "small", "stationary", "zipf"};
}

SynthConfig SynthConfig::preset(std::string_view name) {
    SynthConfig c;
    if (name == "churn15") {
        return c;
    }
    if (name == "stationary") {
        c.churn = 0.0;
        return c;
    }
    if (name == "postag") {
        c.vocabulary = 20'000;
        c.tokens_per_year = 2'000'000;
        c.years = {1800, 1899};
        c.core_size = 2000;
        c.tag_churn = {{PosTag::Noun, 0.4}, {PosTag::Det, 0.1}};
        return c;
    }
    if (name == "decay") {
        c.vocabulary = 20'000;
        c.tokens_per_year = 2'000'000;
        c.churn = 0.0;
        c.group = {20, 200, 10, 0.5};
        return c;
    }
    if (name == "zipf") {
        c.vocabulary = 100'000;
        c.years = {2000, 2000};
        c.churn = 0.0;
        c.sampling = Sampling::Expected;
        c.tokens_per_year = 1'000'000'000'000ULL;
        c.volumes_per_year = 100'000;
        c.shards = 2;
        return c;
    }
    if (name == "small") {
        c.vocabulary = 2'000;
        c.years = {1800, 1899};
        c.era_length = 25;
        c.core_size = 200;
        c.tokens_per_year = 200'000;
        c.volumes_per_year = 500;
        c.shards = 3;
        return c;
    }
    throw ConfigInvalid("unknown synthetic preset '" + std::string(name) + "'");
}

std::string SynthTruth::to_json_text(const SynthConfig& config) const {
    json eras_json = json::array();
    for (const auto& e : eras) eras_json.push_back({e.start_year, e.end_year});
    json transitions_json = json::array();
    for (const auto& t : transitions) {
        json by_tag = json::object();
        for (const auto& [tag, c] : t.by_tag) {
            by_tag[std::string(to_string(tag))] = {{"slots", c.slots}, {"replaced", c.replaced}};
        }
        transitions_json.push_back({{"boundary_year", t.boundary_year},
                                    {"band_slots", t.band_slots},
                                    {"replaced", t.replaced},
                                    {"by_tag", std::move(by_tag)}});
    }
    json doc = {
        {"schema", "vcore.synth_truth/1"},
        {"config", json::parse(config.to_json_text())},
        {"churn_band", config.churn_band()},
        {"eras", std::move(eras_json)},
        {"transitions", std::move(transitions_json)},
        {"group", {{"words", group_words}, {"initial_share", group_initial_share}, {"decay", config.group.decay}}},
        {"words_emitted", words_emitted},
    };
    return doc.dump(2) + "\n";
}

std::string word_name(std::uint64_t serial) {
    // bijective base 26, offset so the shortest name has three letters
    std::uint64_t n = serial + 26 + 26 * 26 + 1;
    std::string out;
    while (n > 0) {
        --n;
        out.push_back(static_cast<char>('a' + n % 26));
        n /= 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

CorpusConfig corpus_config_for(const SynthConfig& config) {
    CorpusConfig c;
    c.language = config.language;
    c.alphabet_preset = "en";
    c.alphabet = AlphabetSpec::preset("en");
    c.alphabet.language = config.language;
    c.years = config.years;
    c.case_fold = false;
    c.window_start = config.years.first;
    c.window_width = config.era_length;
    return c;
}

SynthOutput generate_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const Slots slots = make_slots(cfg);

    // Era-by-era slot -> word serial mapping.
    const auto eras = static_cast<std::size_t>((cfg.years.size() + static_cast<std::size_t>(cfg.era_length) - 1) /
                                               static_cast<std::size_t>(cfg.era_length));
    SynthOutput result;
    std::vector<std::vector<std::uint64_t>> serial_by_era;
    std::vector<std::uint64_t> serial_of(cfg.vocabulary);
    std::iota(serial_of.begin(), serial_of.end(), std::uint64_t{0});
    std::uint64_t next_serial = cfg.vocabulary;
    for (std::size_t e = 0; e < eras; ++e) {
        const int start = cfg.years.first + static_cast<int>(e) * cfg.era_length;
        result.planted.eras.push_back({start, std::min(cfg.years.last, start + cfg.era_length - 1)});
        if (e > 0) {
            auto t = churn_boundary(cfg, slots, serial_of, next_serial, e);
            t.boundary_year = start;
            result.planted.transitions.push_back(std::move(t));
        }
        serial_by_era.push_back(serial_of);
    }
    result.planted.words_emitted = next_serial;
    for (std::size_t r = 0; r < cfg.vocabulary; ++r) {
        if (slots.in_group[r]) result.planted.group_words.push_back(word_name(serial_by_era[0][r]));
    }
    result.planted.group_initial_share = slots.group_prob;

    // Spell each serial once.
    std::vector<std::string> tokens(next_serial);
    {
        std::vector<PosTag> serial_tag(next_serial, PosTag::X);
        for (const auto& mapping : serial_by_era) {
            for (std::size_t r = 0; r < cfg.vocabulary; ++r) serial_tag[mapping[r]] = slots.tag[r];
        }
        for (std::uint64_t s = 0; s < next_serial; ++s) {
            tokens[s] = word_name(s) + "_" + std::string(to_string(serial_tag[s]));
        }
    }

    std::vector<std::ofstream> files(cfg.shards);
    for (std::size_t i = 0; i < cfg.shards; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "shard-%03zu.tsv", i);
        result.shards.push_back(out_dir / name);
        files[i].open(result.shards.back(), std::ios::binary | std::ios::trunc);
        if (!files[i]) throw IoError("cannot write " + result.shards.back().string());
    }

    const std::size_t n_years = cfg.years.size();
    const std::size_t batch = std::max<std::size_t>(1, threads) * 2;
    for (std::size_t b0 = 0; b0 < n_years; b0 += batch) {
        const std::size_t b1 = std::min(n_years, b0 + batch);
        std::vector<std::vector<std::string>> text(b1 - b0, std::vector<std::string>(cfg.shards));
        parallel_for_each_index(b1 - b0, threads, [&](std::size_t k) {
            const int year = cfg.years.first + static_cast<int>(b0 + k);
            const auto era = static_cast<std::size_t>(year - cfg.years.first) / static_cast<std::size_t>(cfg.era_length);
            const auto& mapping = serial_by_era[era];
            const auto yc = sample_year(cfg, slots, year);
            const std::string year_field = "\t" + std::to_string(year) + "\t";
            for (std::size_t r = 0; r < cfg.vocabulary; ++r) {
                if (yc.counts[r] == 0) continue;
                const auto serial = mapping[r];
                auto& out = text[k][serial % cfg.shards];
                out += tokens[serial];
                out += year_field;
                out += std::to_string(yc.counts[r]);
                out += '\t';
                out += std::to_string(yc.volumes[r]);
                out += '\n';
            }
        });
        for (auto& per_year : text) {
            for (std::size_t s = 0; s < cfg.shards; ++s) files[s] << per_year[s];
        }
    }
    for (std::size_t i = 0; i < cfg.shards; ++i) {
        files[i].close();
        if (!files[i]) throw IoError("write failed for " + result.shards[i].string());
    }

    std::string volumes;
    for (int y = cfg.years.first; y <= cfg.years.last; ++y) {
        volumes += std::to_string(y) + "\t" + std::to_string(cfg.volumes_per_year) + "\n";
    }
    result.volumes = out_dir / "total_counts.tsv";
    io::write_atomic(result.volumes, volumes);
    result.truth = out_dir / "truth.json";
    io::write_atomic(result.truth, result.planted.to_json_text(cfg));
    result.corpus_config = out_dir / "corpus.json";
    io::write_atomic(result.corpus_config, corpus_config_for(cfg).to_json_text() + "\n");
    return result;
}

}  // namespace vcore::synth
