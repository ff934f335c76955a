#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace vcore::text {

/// Strict UTF-8 decode; nullopt on any ill-formed sequence.
std::optional<std::u32string> decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view code_points);

inline constexpr char32_t kApostrophe = U'\'';
inline constexpr char32_t kRightSingleQuote = U'’';

constexpr bool is_apostrophe(char32_t c) { return c == kApostrophe || c == kRightSingleQuote; }

/// Simple lowercase mapping covering ASCII, Latin-1, Latin Extended-A and
/// basic Cyrillic, which is what the bundled alphabets need.
char32_t fold_case(char32_t c);

/// Rewrites U+2019 to U+0027 and optionally lowercases. Returns nullopt for
/// invalid UTF-8. Pure ASCII input without folding is returned unchanged.
std::optional<std::string> normalize_word(std::string_view word, bool case_fold);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace vcore::text
