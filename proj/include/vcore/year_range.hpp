#pragma once

#include <cstddef>

namespace vcore {

/// Inclusive range of calendar years.
struct YearRange {
    int first = 0;
    int last = -1;

    constexpr bool empty() const { return last < first; }
    constexpr bool contains(int year) const { return year >= first && year <= last; }
    constexpr std::size_t size() const { return empty() ? 0 : static_cast<std::size_t>(last - first + 1); }
    constexpr std::size_t index(int year) const { return static_cast<std::size_t>(year - first); }

    friend constexpr bool operator==(const YearRange&, const YearRange&) = default;
};

}  // namespace vcore
