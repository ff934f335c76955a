#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vcore/pos_tag.hpp"
#include "vcore/store.hpp"
#include "vcore/windows.hpp"

namespace vcore {

struct SeriesPoint {
    int x = 0;
    double y = 0.0;
    friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

/// Named sequence of (year, value) pairs; x strictly increasing, y finite.
struct MetricSeries {
    std::string name;
    std::vector<SeriesPoint> points;

    /// Throws std::logic_error when the invariants do not hold.
    void validate() const;
};

struct OverlapReport {
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::size_t shared = 0;
    std::vector<std::string> only_a;
    std::vector<std::string> only_b;
    double overlap_pct = 0.0;  // shared / max(size_a, size_b), in [0, 1]
    double jaccard = 0.0;

    std::size_t symmetric_difference() const { return only_a.size() + only_b.size(); }
};

struct TransitionPartition {
    std::vector<std::string> both;
    std::vector<std::string> only_old;
    std::vector<std::string> only_new;
};

/// Share of `old_core` words missing from `new_core` (set comparison).
double dropout_share(const Core& old_core, const Core& new_core);

/// One point per consecutive pair, x = end year of the earlier window.
/// Throws MixedCoreMethods when the cores were not built the same way.
MetricSeries turnover_series(std::span<const Core> cores);

/// Summed relative frequency of `words` in each year of `years`. Words absent
/// from the store contribute 0. Throws EmptyYearError for a year without
/// lexical tokens.
MetricSeries coverage_series(std::span<const std::string> words, const CorpusStore& store, YearRange years);
MetricSeries coverage_series(const Core& core, const CorpusStore& store, YearRange years);

TransitionPartition partition_core_transition(const Core& old_core, const Core& new_core);

/// coverage_series for an arbitrary list; throws EmptyGroup when no word of
/// the list is in the store dictionary.
MetricSeries group_frequency_series(std::span<const std::string> words, const CorpusStore& store, YearRange years);

OverlapReport overlap_report(const Core& a, const Core& b);

/// Sample Pearson coefficient, one pass (Welford co-moments with compensated
/// accumulation). Throws DegenerateVariance when either input is constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of relative frequency against book share over the
/// whole table, or over its `top_k` most frequent words when top_k > 0.
double frequency_bookshare_correlation(const WindowTable& table, std::size_t top_k = 0);

std::map<PosTag, double> pos_composition(const Core& core);

struct TagDropout {
    std::size_t dropped = 0;
    std::size_t total = 0;
    double share() const { return total == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(total); }
};

/// Integer counts behind pos_dropout, for exact identities.
std::map<PosTag, TagDropout> pos_dropout_counts(const Core& old_core, const Core& new_core);
/// Per tag of the old core, the share of its words missing from the new core.
std::map<PosTag, double> pos_dropout(const Core& old_core, const Core& new_core);

/// Smallest K whose frequency-ranked prefix reaches `target` cumulative
/// relative frequency. Throws TargetUnreachable.
std::size_t core_size_for_coverage(const WindowTable& table, double target);

}  // namespace vcore
