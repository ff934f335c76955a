#include "vcore/pos_tag.hpp"

namespace vcore {
namespace {

constexpr std::array<std::string_view, kPosTagCount> kNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", "X", "UNTAGGED",
};

}  // namespace

std::string_view to_string(PosTag tag) { return kNames[index_of(tag)]; }

std::optional<PosTag> parse_pos_tag(std::string_view name) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return kAllPosTags[i];
    }
    return std::nullopt;
}

std::optional<PosTag> parse_pos_suffix(std::string_view suffix) {
    auto tag = parse_pos_tag(suffix);
    if (tag == PosTag::Untagged) return std::nullopt;
    return tag;
}

}  // namespace vcore
