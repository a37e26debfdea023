#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "warcast/csv.hpp"

namespace warcast {

// Minimal SVG writer. Shapes accumulate in draw order and flush on save, so
// callers paint back-to-front. No plotting library is involved; every figure
// the toolkit emits is plain hand-assembled XML.
class SvgCanvas {
  public:
    SvgCanvas(int width, int height) : width_(width), height_(height) {}

    void comment(std::string text) {
        // "--" is illegal inside an XML comment.
        std::size_t pos = 0;
        while ((pos = text.find("--", pos)) != std::string::npos) text.replace(pos, 2, "- -");
        body_ += "<!--\n" + text + "\n-->\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                 "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0) {
        body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                 "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 num(stroke_width) + "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                  double stroke_width = 2.0) {
        body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                 num(stroke_width) + "\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i > 0) body_ += ' ';
            body_ += num(points[i].first) + "," + num(points[i].second);
        }
        body_ += "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                 "\" fill=\"" + fill + "\"/>\n";
    }

    // `anchor` is the SVG text-anchor (start, middle, end); `transform` is an
    // optional raw transform attribute, used for the rotated y-axis label.
    void text(double x, double y, const std::string& content, int size = 12,
              const std::string& anchor = "start", const std::string& transform = "") {
        body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
                 std::to_string(size) +
                 "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\"";
        if (!transform.empty()) body_ += " transform=\"" + transform + "\"";
        body_ += ">" + escape(content) + "</text>\n";
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write file: " + path);
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
            << height_ << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
        out << body_;
        out << "</svg>\n";
        if (!out.good()) throw std::runtime_error("cannot write file: " + path);
    }

  private:
    static std::string num(double v) {
        std::string s = format_double(v, 2);
        // Trim the noise off integral coordinates.
        while (s.size() > 1 && s.find('.') != std::string::npos &&
               (s.back() == '0' || s.back() == '.')) {
            const char c = s.back();
            s.pop_back();
            if (c == '.') break;
        }
        return s;
    }

    static std::string escape(const std::string& raw) {
        std::string out;
        for (char c : raw) {
            if (c == '&') out += "&amp;";
            else if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else out += c;
        }
        return out;
    }

    int width_;
    int height_;
    std::string body_;
};

// Sequential colormap from dark purple (sparse) to light yellow (dense),
// sampled at five anchors and interpolated linearly in RGB.
inline std::string heat_color(double t) {
    static constexpr int anchors[5][3] = {
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0);
    const int segment = std::min(3, static_cast<int>(t * 4.0));
    const double local = t * 4.0 - segment;
    char buffer[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) {
        const double v =
            anchors[segment][c] + local * (anchors[segment + 1][c] - anchors[segment][c]);
        rgb[c] = static_cast<int>(std::lround(v));
    }
    std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buffer;
}

struct HeatmapOptions {
    std::size_t bins = 40;
    double lo = -2.0;   // shared axis range for actual (x) and predicted (y)
    double hi = 10.0;
    std::string title;
};

// 2D histogram counts[iy][ix] with iy indexing predicted (row 0 = bottom of
// the range) and ix indexing actual. Outliers clamp into the edge bins.
inline std::vector<std::vector<long long>> heatmap_counts(const std::vector<double>& actual,
                                                          const std::vector<double>& predicted,
                                                          const HeatmapOptions& options) {
    if (actual.size() != predicted.size())
        throw std::runtime_error("heatmap needs equal-length actual and predicted vectors");
    if (actual.empty()) throw std::runtime_error("cannot render a heatmap without data");
    if (options.bins == 0 || options.hi <= options.lo)
        throw std::runtime_error("heatmap bin layout is degenerate");

    const double span = options.hi - options.lo;
    const auto bin_of = [&](double v) {
        const auto raw = static_cast<long long>(
            std::floor((v - options.lo) / span * static_cast<double>(options.bins)));
        return static_cast<std::size_t>(
            std::clamp<long long>(raw, 0, static_cast<long long>(options.bins) - 1));
    };

    std::vector<std::vector<long long>> counts(options.bins,
                                               std::vector<long long>(options.bins, 0));
    for (std::size_t i = 0; i < actual.size(); ++i)
        counts[bin_of(predicted[i])][bin_of(actual[i])] += 1;
    return counts;
}

// Density heatmap of predicted (y) against actual (x) over a shared square
// range, with the y = x reflection line in red. Cell shading runs light to
// dark as frequency falls: the densest cell is lightest, empty cells sit at
// the dark end of the scale. Brightness follows log(1 + count) so single
// observations stay visible next to dense cells. The full bin-count table and
// the color scale are recorded in a metadata comment inside the file.
inline void render_heatmap(const std::vector<double>& actual, const std::vector<double>& predicted,
                           const HeatmapOptions& options, const std::string& path) {
    const auto counts = heatmap_counts(actual, predicted, options);
    long long max_count = 0;
    for (const auto& row : counts)
        for (long long c : row) max_count = std::max(max_count, c);

    const int plot = 480;
    const int left = 64, right = 24, top = 30, bottom = 52;
    const int width = left + plot + right;
    const int height = top + plot + bottom;
    const double cell = static_cast<double>(plot) / static_cast<double>(options.bins);

    SvgCanvas canvas(width, height);

    std::string meta;
    meta += "heatmap metadata\n";
    meta += "x: actual WAR, " + std::to_string(options.bins) + " bins over [" +
            format_double(options.lo, 6) + ", " + format_double(options.hi, 6) + "]\n";
    meta += "y: predicted WAR, same bins over the same range\n";
    meta += "outliers clamp into the edge bins\n";
    meta += "color scale: brightness = log(1 + count) / log(1 + max count), from " +
            heat_color(0.0) + " (count 0, darkest) to " + heat_color(1.0) +
            " (max count, lightest)\n";
    meta += "max count: " + std::to_string(max_count) + "\n";
    meta += "counts, one row per y bin starting at the bottom of the range, columns left to "
            "right:\n";
    for (const auto& row : counts) {
        for (std::size_t ix = 0; ix < row.size(); ++ix) {
            if (ix > 0) meta += ' ';
            meta += std::to_string(row[ix]);
        }
        meta += '\n';
    }
    meta.pop_back();
    canvas.comment(meta);

    // Empty cells share the zero-count color via one background rect.
    canvas.rect(left, top, plot, plot, heat_color(0.0));
    const double log_max = std::log1p(static_cast<double>(max_count));
    for (std::size_t iy = 0; iy < options.bins; ++iy) {
        for (std::size_t ix = 0; ix < options.bins; ++ix) {
            const long long count = counts[iy][ix];
            if (count == 0) continue;
            const double t =
                log_max > 0.0 ? std::log1p(static_cast<double>(count)) / log_max : 1.0;
            const double x = left + static_cast<double>(ix) * cell;
            const double y = top + static_cast<double>(options.bins - 1 - iy) * cell;
            canvas.rect(x, y, cell, cell, heat_color(t));
        }
    }

    // Reflection line y = x across the data range.
    canvas.line(left, top + plot, left + plot, top, "red", 1.5);

    // Axes and ticks every 2 WAR.
    canvas.line(left, top, left, top + plot, "#333333", 1.0);
    canvas.line(left, top + plot, left + plot, top + plot, "#333333", 1.0);
    const double span = options.hi - options.lo;
    for (double tick = std::ceil(options.lo / 2.0) * 2.0; tick <= options.hi + 1e-9; tick += 2.0) {
        const double fraction = (tick - options.lo) / span;
        const double x = left + fraction * plot;
        const double y = top + plot - fraction * plot;
        canvas.line(x, top + plot, x, top + plot + 4, "#333333", 1.0);
        canvas.text(x, top + plot + 17, format_double(tick, 0), 11, "middle");
        canvas.line(left - 4, y, left, y, "#333333", 1.0);
        canvas.text(left - 7, y + 4, format_double(tick, 0), 11, "end");
    }
    canvas.text(left + plot / 2.0, height - 14, "actual WAR", 13, "middle");
    canvas.text(16, top + plot / 2.0, "predicted WAR", 13, "middle",
                "rotate(-90 16 " + std::to_string(top + plot / 2) + ")");
    if (!options.title.empty()) canvas.text(left + plot / 2.0, 18, options.title, 14, "middle");

    canvas.save(path);
}

struct LineChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
};

// Simple single-series line chart with point markers; used for the feature
// elimination curves.
inline void render_line_chart(const std::vector<double>& xs, const std::vector<double>& ys,
                              const LineChartOptions& options, const std::string& path) {
    if (xs.size() != ys.size())
        throw std::runtime_error("line chart needs equal-length coordinate vectors");
    if (xs.empty()) throw std::runtime_error("cannot render a line chart without data");

    const int plot_w = 480, plot_h = 320;
    const int left = 70, right = 24, top = 30, bottom = 52;
    const int width = left + plot_w + right;
    const int height = top + plot_h + bottom;

    auto range_of = [](const std::vector<double>& v) {
        double lo = v[0], hi = v[0];
        for (double value : v) {
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
        if (hi - lo < 1e-12) {  // flat series: pad so the line sits mid-plot
            lo -= 0.5;
            hi += 0.5;
        }
        return std::pair<double, double>{lo, hi};
    };
    const auto [x_lo, x_hi] = range_of(xs);
    auto [y_lo, y_hi] = range_of(ys);
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto py = [&](double y) { return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h; };

    SvgCanvas canvas(width, height);
    canvas.rect(left, top, plot_w, plot_h, "#fafafa");
    canvas.line(left, top, left, top + plot_h, "#333333", 1.0);
    canvas.line(left, top + plot_h, left + plot_w, top + plot_h, "#333333", 1.0);

    // Four evenly spaced ticks per axis, labeled with the data values.
    for (int i = 0; i <= 4; ++i) {
        const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
        const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
        canvas.line(px(fx), top + plot_h, px(fx), top + plot_h + 4, "#333333", 1.0);
        canvas.text(px(fx), top + plot_h + 17, format_double(fx, x_hi - x_lo > 8 ? 0 : 2), 11,
                    "middle");
        canvas.line(left - 4, py(fy), left, py(fy), "#333333", 1.0);
        canvas.text(left - 7, py(fy) + 4, format_double(fy, 3), 11, "end");
    }

    std::vector<std::pair<double, double>> points;
    points.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) points.push_back({px(xs[i]), py(ys[i])});
    canvas.polyline(points, "#2a6f97", 2.0);
    for (const auto& [x, y] : points) canvas.circle(x, y, 2.5, "#2a6f97");

    if (!options.x_label.empty())
        canvas.text(left + plot_w / 2.0, height - 14, options.x_label, 13, "middle");
    if (!options.y_label.empty())
        canvas.text(16, top + plot_h / 2.0, options.y_label, 13, "middle",
                    "rotate(-90 16 " + std::to_string(top + plot_h / 2) + ")");
    if (!options.title.empty()) canvas.text(left + plot_w / 2.0, 18, options.title, 14, "middle");

    canvas.save(path);
}

}  // namespace warcast
