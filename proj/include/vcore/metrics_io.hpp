#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vcore/metrics.hpp"

namespace vcore::metrics_io {

// CSV: header `x,y` or `key,value`, then one row per item; numbers are the
// shortest decimal that round-trips. JSON carries a `schema` tag
// (`vcore.series/1`, `vcore.keyvalue/1`, `vcore.overlap/1`).

using KeyValues = std::vector<std::pair<std::string, double>>;

std::string series_csv(const MetricSeries& series);
std::string series_json(const MetricSeries& series);
std::string series_list_json(const std::vector<MetricSeries>& series);

std::string key_values_csv(const KeyValues& values);
std::string key_values_json(std::string_view name, const KeyValues& values);

KeyValues pos_key_values(const std::map<PosTag, double>& shares);
KeyValues overlap_key_values(const OverlapReport& report);
std::string overlap_json(const OverlapReport& report);

/// Inverse of series_csv; throws vcore::Error naming the bad row.
MetricSeries parse_series_csv(std::string_view text, std::string name);
KeyValues parse_key_values_csv(std::string_view text);

}  // namespace vcore::metrics_io
