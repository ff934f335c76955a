#include "vcore/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace vcore::svg {
namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kLeft = 70;
constexpr double kRight = 160;
constexpr double kTop = 40;
constexpr double kBottom = 55;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Rounds the upper bound to a 1/2/5 step so ticks land on short labels.
double nice_step(double span, int ticks) {
    if (span <= 0) return 1.0;
    const double raw = span / ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

struct Frame {
    double width;
    double height;
    double y_min;
    double y_max;

    double plot_w() const { return width - kLeft - kRight; }
    double plot_h() const { return height - kTop - kBottom; }
    double y_px(double y) const { return kTop + plot_h() * (1.0 - (y - y_min) / (y_max - y_min)); }
};

void open_svg(std::ostringstream& out, const ChartOptions& o) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
        << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!o.timestamp.empty()) out << "<!-- generated " << escape(o.timestamp) << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(o.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(o.title) << "</text>\n";
}

void y_axis(std::ostringstream& out, const Frame& f, const ChartOptions& o, double step) {
    const double x0 = kLeft;
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x0) << "\" y2=\""
        << num(kTop + f.plot_h()) << "\" stroke=\"black\"/>\n";
    for (double y = f.y_min; y <= f.y_max + step * 1e-9; y += step) {
        const double py = f.y_px(y);
        out << "<line x1=\"" << num(x0 - 4) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft + f.plot_w())
            << "\" y2=\"" << num(py) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << num(x0 - 7) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
            << tick_label(std::abs(y) < step * 1e-9 ? 0.0 : y) << "</text>\n";
    }
    out << "<text transform=\"translate(16," << num(kTop + f.plot_h() / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(o.y_label) << "</text>\n";
    out << "<text x=\"" << num(kLeft + f.plot_w() / 2) << "\" y=\"" << num(f.height - 12)
        << "\" text-anchor=\"middle\">" << escape(o.x_label) << "</text>\n";
}

void legend(std::ostringstream& out, const Frame& f, const std::vector<std::string>& names) {
    const double x = kLeft + f.plot_w() + 15;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kTop + 10 + 18.0 * static_cast<double>(i);
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y - 9) << "\" width=\"12\" height=\"12\" fill=\""
            << kPalette[i % kPalette.size()] << "\"/>\n";
        out << "<text x=\"" << num(x + 18) << "\" y=\"" << num(y + 1) << "\">" << escape(names[i]) << "</text>\n";
    }
}

std::pair<double, double> y_bounds(double lo, double hi, double& step) {
    lo = std::min(0.0, lo);
    if (hi <= lo) hi = lo + 1.0;
    step = nice_step(hi - lo, 5);
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step};
}

}  // namespace

std::string line_chart(const std::vector<MetricSeries>& series, const ChartOptions& o) {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            if (first) {
                x_lo = x_hi = p.x;
                y_lo = y_hi = p.y;
                first = false;
            }
            x_lo = std::min<double>(x_lo, p.x);
            x_hi = std::max<double>(x_hi, p.x);
            y_lo = std::min(y_lo, p.y);
            y_hi = std::max(y_hi, p.y);
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    double step = 1;
    const auto [y_min, y_max] = y_bounds(y_lo, y_hi, step);
    Frame f{static_cast<double>(o.width), static_cast<double>(o.height), y_min, y_max};
    const auto x_px = [&](double x) { return kLeft + f.plot_w() * (x - x_lo) / (x_hi - x_lo); };

    std::ostringstream out;
    open_svg(out, o);
    y_axis(out, f, o, step);
    const double base = kTop + f.plot_h();
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(base) << "\" x2=\"" << num(kLeft + f.plot_w())
        << "\" y2=\"" << num(base) << "\" stroke=\"black\"/>\n";
    const double x_step = std::max(1.0, nice_step(x_hi - x_lo, 6));
    for (double x = std::ceil(x_lo / x_step) * x_step; x <= x_hi; x += x_step) {
        out << "<line x1=\"" << num(x_px(x)) << "\" y1=\"" << num(base) << "\" x2=\"" << num(x_px(x)) << "\" y2=\""
            << num(base + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(x_px(x)) << "\" y=\"" << num(base + 18) << "\" text-anchor=\"middle\">"
            << static_cast<long long>(x) << "</text>\n";
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < series.size(); ++i) {
        names.push_back(series[i].name);
        const char* color = kPalette[i % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& p : series[i].points) out << num(x_px(p.x)) << ',' << num(f.y_px(p.y)) << ' ';
        out << "\"/>\n";
        if (series[i].points.size() <= 12) {
            for (const auto& p : series[i].points) {
                out << "<circle cx=\"" << num(x_px(p.x)) << "\" cy=\"" << num(f.y_px(p.y)) << "\" r=\"3\" fill=\""
                    << color << "\"/>\n";
            }
        }
    }
    legend(out, f, names);
    out << "</svg>\n";
    return out.str();
}

std::string bar_chart(const std::vector<BarGroup>& groups, const ChartOptions& o) {
    std::vector<std::string> categories;
    double y_hi = 0;
    for (const auto& g : groups) {
        for (const auto& [cat, v] : g.values) {
            if (std::find(categories.begin(), categories.end(), cat) == categories.end()) categories.push_back(cat);
            y_hi = std::max(y_hi, v);
        }
    }
    double step = 1;
    const auto [y_min, y_max] = y_bounds(0.0, y_hi, step);
    Frame f{static_cast<double>(o.width), static_cast<double>(o.height), y_min, y_max};

    std::ostringstream out;
    open_svg(out, o);
    y_axis(out, f, o, step);
    const double base = kTop + f.plot_h();
    out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(base) << "\" x2=\"" << num(kLeft + f.plot_w())
        << "\" y2=\"" << num(base) << "\" stroke=\"black\"/>\n";
    const double slot = categories.empty() ? f.plot_w() : f.plot_w() / static_cast<double>(categories.size());
    const double bar = groups.empty() ? 0 : slot * 0.8 / static_cast<double>(groups.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
        const double x0 = kLeft + slot * static_cast<double>(c) + slot * 0.1;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const auto it = std::find_if(groups[g].values.begin(), groups[g].values.end(),
                                         [&](const auto& kv) { return kv.first == categories[c]; });
            if (it == groups[g].values.end()) continue;
            const double top = f.y_px(it->second);
            out << "<rect x=\"" << num(x0 + bar * static_cast<double>(g)) << "\" y=\"" << num(top) << "\" width=\""
                << num(bar * 0.95) << "\" height=\"" << num(base - top) << "\" fill=\"" << kPalette[g % kPalette.size()]
                << "\"/>\n";
        }
        out << "<text x=\"" << num(x0 + slot * 0.4) << "\" y=\"" << num(base + 18) << "\" text-anchor=\"middle\">"
            << escape(categories[c]) << "</text>\n";
    }
    std::vector<std::string> names;
    for (const auto& g : groups) names.push_back(g.name);
    legend(out, f, names);
    out << "</svg>\n";
    return out.str();
}

}  // namespace vcore::svg
