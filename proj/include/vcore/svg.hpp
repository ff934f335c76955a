#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vcore/metrics.hpp"

namespace vcore::svg {

struct ChartOptions {
    int width = 720;
    int height = 420;
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Embedded as an XML comment when non-empty.
    std::string timestamp;
};

/// One polyline per series over a shared pair of axes.
std::string line_chart(const std::vector<MetricSeries>& series, const ChartOptions& options);

struct BarGroup {
    std::string name;
    std::vector<std::pair<std::string, double>> values;  // category -> value
};

/// Grouped vertical bars: one cluster per category, one bar per group.
std::string bar_chart(const std::vector<BarGroup>& groups, const ChartOptions& options);

}  // namespace vcore::svg
