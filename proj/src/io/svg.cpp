#include "qspectra/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qspectra::svg {

namespace {

constexpr double width = 720.0;
constexpr double panel_height = 260.0;
constexpr double margin_left = 80.0;
constexpr double margin_right = 20.0;
constexpr double margin_top = 40.0;
constexpr double gap = 50.0;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad()
    {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi == lo) {
            const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
            lo -= d;
            hi += d;
        }
    }
};

// 4 to 6 ticks at a 1-2-5 spacing.
std::vector<double> ticks(double lo, double hi)
{
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
}

} // namespace

const std::string& palette(std::size_t i)
{
    static const std::array<std::string, 6> colors{"#d62728", "#e6b800", "#1f77b4", "#2ca02c", "#9467bd", "#000000"};
    return colors[i % colors.size()];
}

std::string render(const Figure& fig)
{
    Range xr;
    for (const auto& p : fig.panels) {
        for (const auto& s : p.series) {
            for (double x : s.x) {
                xr.add(x);
            }
        }
    }
    xr.pad();
    const double plot_w = width - margin_left - margin_right;
    const double height = margin_top + static_cast<double>(fig.panels.size()) * (panel_height + gap);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    for (const auto& c : fig.comments) {
        // "--" may not appear inside an XML comment.
        std::string safe = c;
        for (auto pos = safe.find("--"); pos != std::string::npos; pos = safe.find("--", pos)) {
            safe.replace(pos, 2, "- -");
        }
        os << "<!-- " << escape(safe) << " -->\n";
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(fig.title) << "</text>\n";

    const auto sx = [&](double x) { return margin_left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    for (std::size_t k = 0; k < fig.panels.size(); ++k) {
        const Panel& panel = fig.panels[k];
        const double top = margin_top + static_cast<double>(k) * (panel_height + gap);
        Range yr;
        for (const auto& s : panel.series) {
            for (double y : s.y) {
                yr.add(y);
            }
        }
        yr.pad();
        const auto sy = [&](double y) { return top + panel_height - (y - yr.lo) / (yr.hi - yr.lo) * panel_height; };

        os << "<rect x=\"" << num(margin_left) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
           << "\" height=\"" << num(panel_height) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : ticks(yr.lo, yr.hi)) {
            os << "<line x1=\"" << num(margin_left - 4) << "\" x2=\"" << num(margin_left) << "\" y1=\""
               << num(sy(t)) << "\" y2=\"" << num(sy(t)) << "\" stroke=\"black\"/>"
               << "<text x=\"" << num(margin_left - 6) << "\" y=\"" << num(sy(t) + 4)
               << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
        }
        for (double t : ticks(xr.lo, xr.hi)) {
            const double y0 = top + panel_height;
            os << "<line x1=\"" << num(sx(t)) << "\" x2=\"" << num(sx(t)) << "\" y1=\"" << num(y0)
               << "\" y2=\"" << num(y0 + 4) << "\" stroke=\"black\"/>"
               << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">"
               << num(t) << "</text>\n";
        }
        os << "<text transform=\"translate(16," << num(top + panel_height / 2)
           << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

        double legend_y = top + 14;
        for (const auto& s : panel.series) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
            const std::size_t n = std::min(s.x.size(), s.y.size());
            for (std::size_t i = 0; i < n; ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
                }
            }
            os << "\"/>\n";
            if (!s.label.empty()) {
                os << "<text x=\"" << num(width - margin_right - 8) << "\" y=\"" << num(legend_y)
                   << "\" text-anchor=\"end\" fill=\"" << s.color << "\">" << escape(s.label) << "</text>\n";
                legend_y += 14;
            }
        }
    }
    const double bottom = margin_top + static_cast<double>(fig.panels.size()) * (panel_height + gap) - gap + 36;
    os << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\"" << num(bottom)
       << "\" text-anchor=\"middle\">" << escape(fig.x_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace qspectra::svg
