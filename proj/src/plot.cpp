#include "wqad/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include <fmt/format.h>

#include "wqad/error.hpp"
#include "wqad/io.hpp"

namespace wqad::plot {

namespace {

constexpr double kMargin = 50.0;

struct Point {
    double t;
    double y;
    std::string cls;
};

const char* colour(const std::string& cls) {
    if (cls == "tp") return "#1a9850";
    if (cls == "fp") return "#d73027";
    if (cls == "fn") return "#fdae61";
    return "#4575b4";
}

const char* legend_label(const std::string& cls) {
    if (cls == "sub") return "ADAM substituted";
    if (cls == "tp") return "TP";
    if (cls == "fp") return "FP";
    if (cls == "fn") return "FN";
    return "TN";
}

std::string confusion_class(bool flagged, bool anomalous) {
    if (flagged) return anomalous ? "tp" : "fp";
    return anomalous ? "fn" : "tn";
}

std::string escape_xml(const std::string& s) {
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

class Canvas {
public:
    Canvas(const PlotOptions& opt, double t0, double t1, double y0, double y1)
        : opt_(opt), t0_(t0), t1_(t1 > t0 ? t1 : t0 + 1.0), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1.0) {}

    [[nodiscard]] double x(double t) const {
        return kMargin + (t - t0_) / (t1_ - t0_) * (opt_.width - 2 * kMargin);
    }
    [[nodiscard]] double y(double v) const {
        return opt_.height - kMargin - (v - y0_) / (y1_ - y0_) * (opt_.height - 2 * kMargin);
    }

    std::string header() const {
        std::string s = fmt::format(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
            opt_.width, opt_.height, opt_.width, opt_.height);
        s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        if (!opt_.title.empty()) {
            s += fmt::format("<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
                             kMargin, escape_xml(opt_.title));
        }
        s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>\n",
                         kMargin, kMargin, opt_.width - 2 * kMargin, opt_.height - 2 * kMargin);
        s += fmt::format("<text x=\"5\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">{:.3g}</text>\n",
                         y(y1_) + 4, y1_);
        s += fmt::format("<text x=\"5\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\">{:.3g}</text>\n",
                         y(y0_) + 4, y0_);
        return s;
    }

    std::string points(const std::vector<Point>& pts) const {
        std::string s;
        for (const auto& p : pts) {
            s += fmt::format("<circle class=\"pt {}\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\" fill=\"{}\"/>\n", p.cls,
                             x(p.t), y(p.y), colour(p.cls));
        }
        return s;
    }

    std::string legend(const std::set<std::string>& classes) const {
        std::string s;
        double lx = opt_.width - kMargin - 70.0 * static_cast<double>(classes.size());
        for (const auto& cls : {"tn", "fn", "fp", "tp", "sub"}) {
            if (!classes.contains(cls)) continue;
            const std::string name(cls);
            s += fmt::format("<g class=\"legend {}\"><circle cx=\"{:.1f}\" cy=\"30\" r=\"4\" fill=\"{}\"/>", name, lx,
                             name == "sub" ? "#762a83" : colour(name));
            s += fmt::format("<text x=\"{:.1f}\" y=\"34\" font-family=\"sans-serif\" font-size=\"11\">{}</text></g>\n",
                             lx + 8, legend_label(name));
            lx += 70.0;
        }
        return s;
    }

private:
    const PlotOptions& opt_;
    double t0_, t1_, y0_, y1_;
};

double seconds(Timestamp t) { return static_cast<double>(epoch_seconds(t)); }

}  // namespace

std::string trace_svg(const detect::DetectionTrace& trace, const LabelMap& labels, const PlotOptions& options) {
    std::vector<const detect::TraceRecord*> all;
    for (const auto& r : trace.warmup) all.push_back(&r);
    for (const auto& r : trace.records) all.push_back(&r);
    if (all.empty()) throw Error(ErrorCode::EmptyEvaluation, "cannot plot an empty trace");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* r : all) {
        lo = std::min(lo, r->observed);
        hi = std::max(hi, r->observed);
        if (r->pi) {
            lo = std::min(lo, r->pi->lower);
            hi = std::max(hi, r->pi->upper);
        }
    }
    const Canvas canvas(options, seconds(all.front()->timestamp), seconds(all.back()->timestamp), lo, hi);
    std::string svg = canvas.header();

    // Prediction-interval band as one polygon: upper bounds forward, lower bounds back.
    if (!trace.records.empty()) {
        std::string band;
        for (const auto& r : trace.records) band += fmt::format("{:.2f},{:.2f} ", canvas.x(seconds(r.timestamp)), canvas.y(r.pi->upper));
        for (auto it = trace.records.rbegin(); it != trace.records.rend(); ++it) {
            band += fmt::format("{:.2f},{:.2f} ", canvas.x(seconds(it->timestamp)), canvas.y(it->pi->lower));
        }
        band.pop_back();
        svg += fmt::format("<polygon class=\"pi-band\" points=\"{}\" fill=\"#cccccc\" fill-opacity=\"0.5\" stroke=\"none\"/>\n", band);
    }

    std::vector<Point> pts;
    std::set<std::string> classes;
    for (const auto* r : all) {
        const std::string cls = confusion_class(r->flagged, labels.contains(r->timestamp));
        classes.insert(cls);
        pts.push_back({seconds(r->timestamp), r->observed, cls});
    }
    svg += canvas.points(pts);
    for (const auto& r : trace.records) {
        if (!r.substituted) continue;
        classes.insert("sub");
        const double x = canvas.x(seconds(r.timestamp));
        const double y = canvas.y(r.used_value);
        svg += fmt::format("<rect class=\"substituted\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"5\" height=\"5\" fill=\"none\" stroke=\"#762a83\"/>\n",
                           x - 2.5, y - 2.5);
    }
    svg += canvas.legend(classes);
    svg += "</svg>\n";
    return svg;
}

std::string scores_svg(const features::FeatureMatrix& matrix, const features::OutlierScoreSet& scores,
                       const LabelMap& labels, const PlotOptions& options) {
    if (matrix.rows() == 0) throw Error(ErrorCode::EmptyEvaluation, "cannot plot an empty score set");
    const auto [lo_it, hi_it] = std::minmax_element(scores.scores.begin(), scores.scores.end());
    double hi = *hi_it;
    if (std::isfinite(scores.threshold)) hi = std::max(hi, scores.threshold);
    const Canvas canvas(options, seconds(matrix.timestamps.front()), seconds(matrix.timestamps.back()), *lo_it, hi);
    std::string svg = canvas.header();
    if (std::isfinite(scores.threshold)) {
        svg += fmt::format("<line class=\"threshold\" x1=\"{}\" x2=\"{}\" y1=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#d73027\" stroke-dasharray=\"4,3\"/>\n",
                           kMargin, options.width - kMargin, canvas.y(scores.threshold), canvas.y(scores.threshold));
    }
    std::vector<Point> pts;
    std::set<std::string> classes;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        const std::string cls = confusion_class(scores.flagged[i], labels.contains(matrix.timestamps[i]));
        classes.insert(cls);
        pts.push_back({seconds(matrix.timestamps[i]), scores.scores[i], cls});
    }
    svg += canvas.points(pts);
    svg += canvas.legend(classes);
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const std::filesystem::path& path, const std::string& svg) { io::write_file(path, svg); }

}  // namespace wqad::plot
