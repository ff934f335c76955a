#include "vcore/metrics_io.hpp"

#include "vcore/errors.hpp"
#include "vcore/text.hpp"

#include <json.hpp>

#include <charconv>

namespace vcore::metrics_io {
namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
        pos = nl + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t row) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error("CSV row " + std::to_string(row) + ": '" + std::string(s) + "' is not a number");
    }
    return v;
}

ojson series_object(const MetricSeries& series) {
    ojson points = ojson::array();
    for (const auto& p : series.points) points.push_back({{"x", p.x}, {"y", p.y}});
    return {{"name", series.name}, {"points", std::move(points)}};
}

}  // namespace

std::string series_csv(const MetricSeries& series) {
    std::string out = "x,y\n";
    for (const auto& p : series.points) {
        out += std::to_string(p.x);
        out += ',';
        out += text::format_double(p.y);
        out += '\n';
    }
    return out;
}

std::string series_json(const MetricSeries& series) {
    ojson doc = {{"schema", "vcore.series/1"}};
    doc.update(series_object(series));
    return doc.dump(2) + "\n";
}

std::string series_list_json(const std::vector<MetricSeries>& series) {
    ojson list = ojson::array();
    for (const auto& s : series) list.push_back(series_object(s));
    ojson doc = {{"schema", "vcore.series_list/1"}, {"series", std::move(list)}};
    return doc.dump(2) + "\n";
}

std::string key_values_csv(const KeyValues& values) {
    std::string out = "key,value\n";
    for (const auto& [k, v] : values) {
        out += k;
        out += ',';
        out += text::format_double(v);
        out += '\n';
    }
    return out;
}

std::string key_values_json(std::string_view name, const KeyValues& values) {
    ojson obj = ojson::object();
    for (const auto& [k, v] : values) obj[k] = v;
    ojson doc = {{"schema", "vcore.keyvalue/1"}, {"name", name}, {"values", std::move(obj)}};
    return doc.dump(2) + "\n";
}

KeyValues pos_key_values(const std::map<PosTag, double>& shares) {
    KeyValues out;
    for (const auto& [tag, v] : shares) out.emplace_back(std::string(to_string(tag)), v);
    return out;
}

KeyValues overlap_key_values(const OverlapReport& r) {
    return {
        {"size_a", static_cast<double>(r.size_a)},
        {"size_b", static_cast<double>(r.size_b)},
        {"shared", static_cast<double>(r.shared)},
        {"only_a", static_cast<double>(r.only_a.size())},
        {"only_b", static_cast<double>(r.only_b.size())},
        {"symmetric_difference", static_cast<double>(r.symmetric_difference())},
        {"overlap_pct", r.overlap_pct},
        {"jaccard", r.jaccard},
    };
}

std::string overlap_json(const OverlapReport& r) {
    ojson doc = {
        {"schema", "vcore.overlap/1"},
        {"size_a", r.size_a},
        {"size_b", r.size_b},
        {"shared", r.shared},
        {"overlap_pct", r.overlap_pct},
        {"jaccard", r.jaccard},
        {"symmetric_difference", r.symmetric_difference()},
        {"only_a", r.only_a},
        {"only_b", r.only_b},
    };
    return doc.dump(2) + "\n";
}

MetricSeries parse_series_csv(std::string_view text, std::string name) {
    const auto rows = lines_of(text);
    if (rows.empty() || rows.front() != "x,y") throw Error("series CSV must start with an 'x,y' header");
    MetricSeries series{std::move(name), {}};
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto comma = rows[i].find(',');
        if (comma == std::string_view::npos) throw Error("CSV row " + std::to_string(i + 1) + " has no comma");
        const auto xs = rows[i].substr(0, comma);
        int x = 0;
        const auto [ptr, ec] = std::from_chars(xs.data(), xs.data() + xs.size(), x);
        if (ec != std::errc{} || ptr != xs.data() + xs.size()) {
            throw Error("CSV row " + std::to_string(i + 1) + ": x is not an integer");
        }
        series.points.push_back({x, parse_double(rows[i].substr(comma + 1), i + 1)});
    }
    return series;
}

KeyValues parse_key_values_csv(std::string_view text) {
    const auto rows = lines_of(text);
    if (rows.empty() || rows.front() != "key,value") throw Error("key/value CSV must start with a 'key,value' header");
    KeyValues out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto comma = rows[i].rfind(',');
        if (comma == std::string_view::npos) throw Error("CSV row " + std::to_string(i + 1) + " has no comma");
        out.emplace_back(std::string(rows[i].substr(0, comma)), parse_double(rows[i].substr(comma + 1), i + 1));
    }
    return out;
}

}  // namespace vcore::metrics_io
