#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace vcore {

/// Universal POS tags used by the 2012 Ngram release, plus a bucket for
/// tokens that carry no `_TAG` suffix at all.
enum class PosTag : std::uint8_t {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Num,
    Conj,
    Prt,
    X,
    Untagged,
};

inline constexpr std::size_t kPosTagCount = 12;

inline constexpr std::array<PosTag, kPosTagCount> kAllPosTags = {
    PosTag::Noun, PosTag::Verb, PosTag::Adj, PosTag::Adv,  PosTag::Pron, PosTag::Det,
    PosTag::Adp,  PosTag::Num,  PosTag::Conj, PosTag::Prt, PosTag::X,    PosTag::Untagged,
};

constexpr std::size_t index_of(PosTag tag) { return static_cast<std::size_t>(tag); }

std::string_view to_string(PosTag tag);

/// Accepts the upper-case names produced by to_string(), including UNTAGGED.
std::optional<PosTag> parse_pos_tag(std::string_view name);

/// Only the suffixes that appear in shard tokens (`_NOUN`, ..., `_X`).
std::optional<PosTag> parse_pos_suffix(std::string_view suffix);

}  // namespace vcore
