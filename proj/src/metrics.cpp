#include "vcore/metrics.hpp"

#include "vcore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <stdexcept>

namespace vcore {
namespace {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::vector<std::string> set_minus(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> set_and(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> sorted_unique(std::span<const std::string> words) {
    std::vector<std::string> out(words.begin(), words.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

void MetricSeries::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].y)) throw std::logic_error("series '" + name + "' has a non-finite value");
        if (i > 0 && points[i].x <= points[i - 1].x) {
            throw std::logic_error("series '" + name + "' x values are not strictly increasing");
        }
    }
}

double dropout_share(const Core& old_core, const Core& new_core) {
    if (old_core.size() == 0 || new_core.size() == 0) throw std::invalid_argument("dropout_share needs non-empty cores");
    const auto old_words = old_core.sorted_words();
    const auto gone = set_minus(old_words, new_core.sorted_words());
    return static_cast<double>(gone.size()) / static_cast<double>(old_words.size());
}

MetricSeries turnover_series(std::span<const Core> cores) {
    if (cores.size() < 2) throw std::invalid_argument("turnover_series needs at least two cores");
    MetricSeries series{"turnover " + describe(cores.front().method), {}};
    for (std::size_t i = 0; i + 1 < cores.size(); ++i) {
        if (cores[i + 1].method != cores.front().method) {
            throw MixedCoreMethods("core " + cores[i + 1].source.label() + " uses " + describe(cores[i + 1].method) +
                                   ", expected " + describe(cores.front().method));
        }
        if (cores[i + 1].source.start_year <= cores[i].source.end_year) {
            throw std::invalid_argument("turnover_series cores must be chronologically ordered and non-overlapping");
        }
        series.points.push_back({cores[i].source.end_year, dropout_share(cores[i], cores[i + 1])});
    }
    return series;
}

MetricSeries coverage_series(std::span<const std::string> words, const CorpusStore& store, YearRange years) {
    const auto range = store.years();
    if (years.empty() || !range.contains(years.first) || !range.contains(years.last)) {
        throw Error("coverage years " + std::to_string(years.first) + ":" + std::to_string(years.last) +
                    " are not inside the store range");
    }
    for (int y = years.first; y <= years.last; ++y) {
        if (store.lexical_total(y) == 0) throw EmptyYearError("year " + std::to_string(y) + " has no lexical tokens");
    }
    std::vector<std::uint64_t> counts(years.size(), 0);
    for (const auto& word : sorted_unique(words)) {
        const auto id = store.find(word);
        if (!id) continue;
        const auto p = store.postings(*id);
        auto i = static_cast<std::size_t>(std::lower_bound(p.years.begin(), p.years.end(), years.first) -
                                          p.years.begin());
        for (; i < p.size() && p.years[i] <= years.last; ++i) counts[years.index(p.years[i])] += p.match_counts[i];
    }
    MetricSeries series{"coverage", {}};
    series.points.reserve(years.size());
    for (int y = years.first; y <= years.last; ++y) {
        series.points.push_back(
            {y, static_cast<double>(counts[years.index(y)]) / static_cast<double>(store.lexical_total(y))});
    }
    return series;
}

MetricSeries coverage_series(const Core& core, const CorpusStore& store, YearRange years) {
    auto series = coverage_series(core.words(), store, years);
    series.name = "coverage " + describe(core.method) + " @" + core.source.label();
    return series;
}

TransitionPartition partition_core_transition(const Core& old_core, const Core& new_core) {
    const auto a = old_core.sorted_words();
    const auto b = new_core.sorted_words();
    return {set_and(a, b), set_minus(a, b), set_minus(b, a)};
}

MetricSeries group_frequency_series(std::span<const std::string> words, const CorpusStore& store, YearRange years) {
    const bool any = std::any_of(words.begin(), words.end(), [&](const std::string& w) { return store.find(w).has_value(); });
    if (!any) throw EmptyGroup("none of the " + std::to_string(words.size()) + " group words occur in the store");
    auto series = coverage_series(words, store, years);
    series.name = "group";
    return series;
}

OverlapReport overlap_report(const Core& a, const Core& b) {
    const auto wa = a.sorted_words();
    const auto wb = b.sorted_words();
    OverlapReport r;
    r.size_a = wa.size();
    r.size_b = wb.size();
    r.shared = set_and(wa, wb).size();
    r.only_a = set_minus(wa, wb);
    r.only_b = set_minus(wb, wa);
    const auto larger = std::max(r.size_a, r.size_b);
    const auto united = r.shared + r.only_a.size() + r.only_b.size();
    r.overlap_pct = larger == 0 ? 1.0 : static_cast<double>(r.shared) / static_cast<double>(larger);
    r.jaccard = united == 0 ? 1.0 : static_cast<double>(r.shared) / static_cast<double>(united);
    return r;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_correlation: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson_correlation: need at least two pairs");
    double mean_x = 0.0;
    double mean_y = 0.0;
    CompensatedSum sxx;
    CompensatedSum syy;
    CompensatedSum sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        mean_x += dx / n;
        mean_y += dy / n;
        sxx.add(dx * (x[i] - mean_x));
        syy.add(dy * (y[i] - mean_y));
        sxy.add(dx * (y[i] - mean_y));
    }
    const double vx = sxx.value();
    const double vy = syy.value();
    if (!(vx > 0.0) || !(vy > 0.0)) throw DegenerateVariance("pearson_correlation: an input has zero variance");
    const double r = sxy.value() / std::sqrt(vx * vy);
    return std::clamp(r, -1.0, 1.0);
}

double frequency_bookshare_correlation(const WindowTable& table, std::size_t top_k) {
    std::vector<double> freq;
    std::vector<double> share;
    if (top_k == 0) {
        freq.reserve(table.entries.size());
        share.reserve(table.entries.size());
        for (const auto& e : table.entries) {
            freq.push_back(e.relative_frequency);
            share.push_back(e.volume_share);
        }
    } else {
        for (const auto& e : frequency_core(table, top_k).entries) {
            freq.push_back(e.relative_frequency);
            share.push_back(e.volume_share);
        }
    }
    return pearson_correlation(freq, share);
}

std::map<PosTag, double> pos_composition(const Core& core) {
    std::map<PosTag, std::size_t> counts;
    for (const auto& e : core.entries) ++counts[e.pos];
    std::map<PosTag, double> shares;
    for (const auto& [tag, n] : counts) shares[tag] = static_cast<double>(n) / static_cast<double>(core.size());
    return shares;
}

std::map<PosTag, TagDropout> pos_dropout_counts(const Core& old_core, const Core& new_core) {
    const auto next = new_core.sorted_words();
    std::map<PosTag, TagDropout> out;
    for (const auto& e : old_core.entries) {
        auto& d = out[e.pos];
        ++d.total;
        if (!std::binary_search(next.begin(), next.end(), e.word)) ++d.dropped;
    }
    return out;
}

std::map<PosTag, double> pos_dropout(const Core& old_core, const Core& new_core) {
    std::map<PosTag, double> out;
    for (const auto& [tag, d] : pos_dropout_counts(old_core, new_core)) out[tag] = d.share();
    return out;
}

std::size_t core_size_for_coverage(const WindowTable& table, double target) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("coverage target must be in (0, 1)");
    std::vector<std::uint64_t> counts;
    counts.reserve(table.entries.size());
    for (const auto& e : table.entries) counts.push_back(e.match_count);
    std::sort(counts.begin(), counts.end(), std::greater<>());
    const auto total = static_cast<double>(table.lexical_total);
    std::uint64_t cumulative = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        cumulative += counts[k];
        if (static_cast<double>(cumulative) / total >= target) return k + 1;
    }
    throw TargetUnreachable("coverage target " + std::to_string(target) + " exceeds the table's frequency mass");
}

}  // namespace vcore
