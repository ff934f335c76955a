#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vcore/config.hpp"
#include "vcore/pos_tag.hpp"
#include "vcore/windows.hpp"
#include "vcore/year_range.hpp"

namespace vcore::synth {

enum class Sampling {
    Multinomial,  // per-year multinomial draw of tokens_per_year tokens
    Expected,     // counts rounded from the exact expectation
};

/// A group of rank slots whose joint share decays geometrically from the
/// first to the last year by `decay` (0.5 = halves). Exempt from churn.
struct GroupPlant {
    std::size_t size = 0;
    std::size_t first_rank = 1;  // 1-based
    std::size_t stride = 1;
    double decay = 1.0;
};

struct SynthConfig {
    std::string language = "en";
    std::size_t vocabulary = 50'000;
    double zipf_s = 1.0;
    double zipf_q = 0.0;
    YearRange years{1800, 1999};
    int era_length = 50;
    double churn = 0.15;
    std::map<PosTag, double> tag_churn;
    /// Churn acts on the top 2 * core_size rank slots.
    std::size_t core_size = 4000;
    std::uint64_t tokens_per_year = 5'000'000;
    std::uint64_t volumes_per_year = 10'000;
    std::uint64_t seed = 20170601;
    std::size_t shards = 4;
    Sampling sampling = Sampling::Multinomial;
    GroupPlant group;
    /// POS tag probabilities for rank slots.
    std::map<PosTag, double> pos_mix = {
        {PosTag::Noun, 0.40}, {PosTag::Verb, 0.20}, {PosTag::Adj, 0.12}, {PosTag::Adv, 0.06},
        {PosTag::Adp, 0.06},  {PosTag::Pron, 0.04}, {PosTag::Det, 0.04}, {PosTag::Conj, 0.03},
        {PosTag::Prt, 0.02},  {PosTag::X, 0.02},    {PosTag::Num, 0.01},
    };

    std::size_t churn_band() const;
    /// Throws ConfigInvalid.
    void validate() const;
    std::vector<std::string> warnings() const;

    std::string to_json_text() const;
    static SynthConfig from_json_text(std::string_view text);

    /// churn15, stationary, postag, decay, zipf, small.
    static SynthConfig preset(std::string_view name);
    static std::vector<std::string> preset_names();
};

struct TagChurn {
    std::size_t slots = 0;
    std::size_t replaced = 0;
};

struct TransitionTruth {
    int boundary_year = 0;  // first year of the new era
    std::size_t band_slots = 0;
    std::size_t replaced = 0;
    std::map<PosTag, TagChurn> by_tag;
};

struct SynthTruth {
    std::vector<WindowSpec> eras;
    std::vector<TransitionTruth> transitions;
    std::vector<std::string> group_words;
    double group_initial_share = 0.0;
    std::size_t words_emitted = 0;

    std::string to_json_text(const SynthConfig& config) const;
};

struct SynthOutput {
    std::vector<std::filesystem::path> shards;
    std::filesystem::path volumes;
    std::filesystem::path truth;
    std::filesystem::path corpus_config;
    SynthTruth planted;
};

/// Deterministic word spelling for a serial number: lowercase letters only,
/// at least three characters, distinct per serial.
std::string word_name(std::uint64_t serial);

/// Ingest configuration matching a generated corpus.
CorpusConfig corpus_config_for(const SynthConfig& config);

/// Writes shard-NNN.tsv files, total_counts.tsv, truth.json and corpus.json
/// into `out_dir`. Output bytes depend only on the config (not on threads).
SynthOutput generate_corpus(const SynthConfig& config, const std::filesystem::path& out_dir, unsigned threads = 1);

}  // namespace vcore::synth
