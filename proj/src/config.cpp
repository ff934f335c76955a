#include "vcore/config.hpp"

#include "vcore/errors.hpp"
#include "vcore/io.hpp"
#include "vcore/text.hpp"

#include <json.hpp>

#include <algorithm>

namespace vcore {
namespace {

using json = nlohmann::json;

std::u32string both_cases(std::u32string_view lower) {
    std::u32string out;
    for (char32_t c : lower) out.push_back(c);
    // collect capitals whose fold lands in the set
    for (char32_t c = 0x41; c < 0x500; ++c) {
        if (c != text::fold_case(c) && lower.find(text::fold_case(c)) != std::u32string_view::npos) out.push_back(c);
    }
    return out;
}

void sort_unique(std::u32string& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

bool is_letter_candidate(char32_t c) {
    if (c < 0x80) return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
    // Latin-1 punctuation and symbols
    if (c < 0xC0) return false;
    return c != 0xD7 && c != 0xF7 && c != text::kRightSingleQuote;
}

}  // namespace

bool AlphabetSpec::contains(char32_t c) const { return std::binary_search(letters.begin(), letters.end(), c); }

std::vector<std::string> AlphabetSpec::preset_names() { return {"de", "en", "es", "fr", "it", "ru"}; }

AlphabetSpec AlphabetSpec::preset(std::string_view language) {
    const std::u32string latin = U"abcdefghijklmnopqrstuvwxyz";
    std::u32string lower;
    if (language == "en") {
        lower = latin;
    } else if (language == "fr") {
        lower = latin + U"àâæçéèêëîïôœùûüÿ";
    } else if (language == "de") {
        lower = latin + U"äöüß";
    } else if (language == "it") {
        lower = latin + U"àèéìíîòóùú";
    } else if (language == "es") {
        lower = latin + U"áéíñóúü";
    } else if (language == "ru") {
        lower = U"абвгдеёжзийклмнопрстуфхцчшщъыьэюя";
    } else {
        throw ConfigInvalid("unknown alphabet preset '" + std::string(language) + "'");
    }
    AlphabetSpec spec;
    spec.language = std::string(language);
    spec.letters = both_cases(lower);
    if (language == "de") spec.letters.push_back(0x1E9E);
    sort_unique(spec.letters);
    return spec;
}

AlphabetSpec AlphabetSpec::custom(std::string language, std::string_view utf8_letters, bool apostrophe_allowed) {
    auto decoded = text::decode_utf8(utf8_letters);
    if (!decoded) throw ConfigInvalid("alphabet letters are not valid UTF-8");
    AlphabetSpec spec;
    spec.language = std::move(language);
    spec.apostrophe_allowed = apostrophe_allowed;
    spec.letters = *decoded;
    for (char32_t c : spec.letters) {
        if (!is_letter_candidate(c)) throw ConfigInvalid("alphabet contains a non-letter character");
    }
    sort_unique(spec.letters);
    if (spec.letters.empty()) throw ConfigInvalid("alphabet letters must not be empty");
    return spec;
}

CorpusConfig CorpusConfig::from_json_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        const int version = doc.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw ConfigInvalid("unsupported config format_version " + std::to_string(version));
        }
        CorpusConfig cfg;
        cfg.language = doc.at("language").get<std::string>();
        const auto& alpha = doc.contains("alphabet") ? doc.at("alphabet") : json(cfg.language);
        if (alpha.is_string()) {
            cfg.alphabet_preset = alpha.get<std::string>();
            cfg.alphabet = AlphabetSpec::preset(cfg.alphabet_preset);
            cfg.alphabet.language = cfg.language;
        } else {
            cfg.alphabet_preset.clear();
            cfg.alphabet = AlphabetSpec::custom(cfg.language, alpha.at("letters").get<std::string>(),
                                                alpha.value("apostrophe", true));
        }
        const auto& years = doc.at("years");
        cfg.years = {years.at(0).get<int>(), years.at(1).get<int>()};
        if (cfg.years.empty()) throw ConfigInvalid("config years must be [first, last] with first <= last");
        cfg.case_fold = doc.value("case_fold", false);
        cfg.window_start = doc.value("window_start", cfg.years.first);
        cfg.window_width = doc.value("window_width", 50);
        if (cfg.window_width < 1) throw ConfigInvalid("window_width must be positive");
        if (!cfg.years.contains(cfg.window_start)) throw ConfigInvalid("window_start outside years");
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigInvalid(std::string("config field error: ") + e.what());
    }
}

CorpusConfig CorpusConfig::load(const std::filesystem::path& path) {
    try {
        return from_json_text(io::read_text(path));
    } catch (const ConfigInvalid& e) {
        throw ConfigInvalid(path.string() + ": " + e.what());
    }
}

std::string CorpusConfig::to_json_text() const {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["language"] = language;
    if (!alphabet_preset.empty()) {
        doc["alphabet"] = alphabet_preset;
    } else {
        doc["alphabet"] = {{"letters", text::encode_utf8(alphabet.letters)}, {"apostrophe", alphabet.apostrophe_allowed}};
    }
    doc["years"] = {years.first, years.last};
    doc["case_fold"] = case_fold;
    doc["window_start"] = window_start;
    doc["window_width"] = window_width;
    return doc.dump();
}

std::string CorpusConfig::hash() const { return io::crc32_hex(io::crc32(to_json_text())); }

}  // namespace vcore
