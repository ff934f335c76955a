#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vcore/year_range.hpp"

namespace vcore {

/// Letters a lexical 1-gram may consist of, plus the apostrophe rule.
struct AlphabetSpec {
    std::string language;
    std::u32string letters;  // sorted, unique
    bool apostrophe_allowed = true;
    int max_apostrophes = 1;

    bool contains(char32_t c) const;

    /// Presets: en, fr, de, it, es, ru.
    static AlphabetSpec preset(std::string_view language);
    /// Builds from a UTF-8 string of letters; throws ConfigInvalid on digits,
    /// punctuation or an empty set.
    static AlphabetSpec custom(std::string language, std::string_view utf8_letters, bool apostrophe_allowed = true);

    static std::vector<std::string> preset_names();
};

/// Versioned, human-readable corpus configuration (JSON on disk).
///
/// {
///   "format_version": 1,
///   "language": "en",
///   "alphabet": "en"              // or {"letters": "...", "apostrophe": true}
///   "years": [1676, 2008],
///   "case_fold": false,
///   "window_start": 1676,         // optional, defaults to years[0]
///   "window_width": 50            // optional
/// }
struct CorpusConfig {
    static constexpr int kFormatVersion = 1;

    std::string language = "en";
    AlphabetSpec alphabet = AlphabetSpec::preset("en");
    std::string alphabet_preset = "en";  // empty when custom
    YearRange years{1676, 2008};
    bool case_fold = false;
    int window_start = 1676;
    int window_width = 50;

    static CorpusConfig from_json_text(std::string_view json_text);
    static CorpusConfig load(const std::filesystem::path& path);

    /// Canonical JSON (sorted keys, no whitespace); its CRC is the config hash.
    std::string to_json_text() const;
    std::string hash() const;
};

}  // namespace vcore
