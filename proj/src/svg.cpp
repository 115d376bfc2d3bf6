#include "optbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace optbench {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 24, kTop = 24, kBottom = 52;

const std::map<std::string, std::string> kNamedColors = {
    {"bo", "#1f77b4"},     {"ea", "#333333"},     {"bea", "#2ca02c"},
    {"bea_s1", "#e377c2"}, {"bea_s2", "#1f77b4"}, {"bea_s3", "#333333"},
    {"bea_s4", "#2ca02c"},
};
const char* kCycle[] = {"#d62728", "#9467bd", "#8c564b", "#ff7f0e", "#17becf", "#bcbd22"};

std::string color_for(const std::string& label, std::size_t index)
{
    if (auto it = kNamedColors.find(label); it != kNamedColors.end())
        return it->second;
    return kCycle[index % std::size(kCycle)];
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> mean;
    std::vector<double> sd;
};

struct AxisScale {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double to_unit(double v) const
    {
        if (log)
            return std::log(v / lo) / std::log(hi / lo);
        return (v - lo) / (hi - lo);
    }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6)
{
    const double span = hi - lo;
    if (!(span > 0))
        return {lo};
    double step = std::pow(10.0, std::floor(std::log10(span / target)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (span / (step * mult) <= target) {
            step *= mult;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
        ticks.push_back(t);
    return ticks;
}

std::vector<double> log_ticks(double lo, double hi)
{
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo)));
         e <= static_cast<int>(std::ceil(std::log10(hi))); ++e) {
        const double t = std::pow(10.0, e);
        if (t >= lo * (1 - 1e-12) && t <= hi * (1 + 1e-12))
            ticks.push_back(t);
    }
    if (ticks.empty())
        ticks = {lo, hi};
    return ticks;
}

std::string fmt_tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

class SvgWriter {
public:
    SvgWriter()
    {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
             << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
             << "\">\n";
        out_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" fill=\"white\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, bool dashed = false)
    {
        out_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\""
             << y2 << "\" stroke=\"" << stroke << "\" stroke-width=\"" << width << '"';
        if (dashed)
            out_ << " stroke-dasharray=\"6 4\"";
        out_ << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke)
    {
        if (pts.size() < 2)
            return;
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke
             << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& [x, y] : pts)
            out_ << x << ',' << y << ' ';
        out_ << "\"/>\n";
    }

    void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill)
    {
        if (pts.size() < 3)
            return;
        out_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (const auto& [x, y] : pts)
            out_ << x << ',' << y << ' ';
        out_ << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, const std::string& anchor = "middle",
              double size = 12, double rotate = 0)
    {
        out_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\""
             << size << "\" text-anchor=\"" << anchor << '"';
        if (rotate != 0)
            out_ << " transform=\"rotate(" << rotate << ' ' << x << ' ' << y << ")\"";
        out_ << '>' << xml_escape(s) << "</text>\n";
    }

    std::string finish()
    {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    std::ostringstream out_;
};

void mean_sd(const std::vector<double>& values, double& mean, double& sd)
{
    mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    sd = std::sqrt(ss / static_cast<double>(values.size()));
}

const char* x_label(PlotKind kind)
{
    return kind == PlotKind::ObjectiveVsTime ? "computation time (s)" : "iteration";
}

const char* y_label(PlotKind kind)
{
    switch (kind) {
    case PlotKind::ObjectiveVsTime:
        return "best objective value";
    case PlotKind::GainVsIter:
        return "gain per second";
    case PlotKind::OverheadVsIter:
        return "overhead time (s)";
    }
    return "";
}

} // namespace

void render_plot(const std::vector<RunResult>& results, PlotKind kind,
                 const std::string& path, const PlotOptions& options)
{
    std::vector<const RunResult*> ok;
    for (const auto& r : results)
        if (r.error.empty())
            ok.push_back(&r);
    if (ok.empty())
        throw std::invalid_argument("render_plot: no successful results");
    for (const auto* r : ok)
        if (r->function != ok.front()->function)
            throw std::invalid_argument("render_plot: results mix functions (" +
                                        ok.front()->function + " vs " + r->function + ")");

    // group by algorithm label, keeping encounter order
    std::vector<std::string> labels;
    std::map<std::string, std::vector<const RunResult*>> groups;
    for (const auto* r : ok) {
        if (!groups.count(r->algorithm))
            labels.push_back(r->algorithm);
        groups[r->algorithm].push_back(r);
    }

    std::vector<Series> series;
    double data_xlo = std::numeric_limits<double>::infinity(), data_xhi = -data_xlo;

    if (kind == PlotKind::ObjectiveVsTime) {
        for (const auto* r : ok) {
            data_xlo = std::min(data_xlo, r->times.front());
            data_xhi = std::max(data_xhi, r->times.back());
        }
        if (!(data_xlo > 0))
            data_xlo = 1e-3;
        std::vector<double> grid(static_cast<std::size_t>(options.grid_points));
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid[i] = data_xlo * std::pow(data_xhi / data_xlo,
                                          static_cast<double>(i) /
                                              static_cast<double>(grid.size() - 1));
        for (std::size_t li = 0; li < labels.size(); ++li) {
            Series s;
            s.label = labels[li];
            s.color = color_for(s.label, li);
            for (double g : grid) {
                std::vector<double> vals;
                for (const auto* r : groups[s.label]) {
                    const double v = step_interpolate(r->times, r->best_curve, g);
                    if (!std::isnan(v))
                        vals.push_back(v);
                }
                if (vals.size() < groups[s.label].size())
                    continue; // wait until every run has started
                double m, sd;
                mean_sd(vals, m, sd);
                s.x.push_back(g);
                s.mean.push_back(m);
                s.sd.push_back(sd);
            }
            series.push_back(std::move(s));
        }
    } else {
        for (std::size_t li = 0; li < labels.size(); ++li) {
            Series s;
            s.label = labels[li];
            s.color = color_for(s.label, li);
            const auto& runs = groups[s.label];
            if (kind == PlotKind::GainVsIter) {
                const std::size_t len = runs.front()->gains.entries.size();
                for (std::size_t i = 0; i < len; ++i) {
                    std::vector<double> vals;
                    for (const auto* r : runs)
                        if (i < r->gains.entries.size())
                            vals.push_back(r->gains.entries[i].efficiency);
                    if (vals.empty())
                        continue;
                    double m, sd;
                    mean_sd(vals, m, sd);
                    s.x.push_back(runs.front()->gains.entries[i].iteration);
                    s.mean.push_back(m);
                    s.sd.push_back(sd);
                }
            } else {
                const int len = runs.front()->trace.size();
                for (int i = 1; i <= len; ++i) {
                    std::vector<double> vals;
                    for (const auto* r : runs)
                        if (i <= r->trace.size())
                            vals.push_back(r->trace.at(i).overhead_s);
                    double m, sd;
                    mean_sd(vals, m, sd);
                    s.x.push_back(i);
                    s.mean.push_back(m);
                    s.sd.push_back(sd);
                }
            }
            if (!s.x.empty()) {
                data_xlo = std::min(data_xlo, s.x.front());
                data_xhi = std::max(data_xhi, s.x.back());
            }
            series.push_back(std::move(s));
        }
    }

    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            ylo = std::min(ylo, s.mean[i] - 2 * s.sd[i]);
            yhi = std::max(yhi, s.mean[i] + 2 * s.sd[i]);
        }
    if (!(yhi > ylo)) {
        ylo -= 1.0;
        yhi += 1.0;
    }
    const double ypad = 0.05 * (yhi - ylo);

    AxisScale xs{data_xlo, data_xhi, options.log_x && kind == PlotKind::ObjectiveVsTime};
    AxisScale ys{ylo - ypad, yhi + ypad, false};
    if (xs.log && !(xs.lo > 0))
        xs.lo = 1e-3;
    if (!(xs.hi > xs.lo))
        xs.hi = xs.lo + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + plot_w * xs.to_unit(v); };
    auto py = [&](double v) { return kTop + plot_h * (1.0 - ys.to_unit(v)); };

    SvgWriter svg;
    // axes
    svg.line(kLeft, kTop, kLeft, kTop + plot_h, "#000");
    svg.line(kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h, "#000");
    const auto xticks = xs.log ? log_ticks(xs.lo, xs.hi) : nice_ticks(xs.lo, xs.hi);
    for (double t : xticks) {
        if (t < xs.lo || t > xs.hi)
            continue;
        svg.line(px(t), kTop + plot_h, px(t), kTop + plot_h + 5, "#000");
        svg.text(px(t), kTop + plot_h + 18, fmt_tick(t));
    }
    for (double t : nice_ticks(ys.lo, ys.hi)) {
        if (t < ys.lo || t > ys.hi)
            continue;
        svg.line(kLeft - 5, py(t), kLeft, py(t), "#000");
        svg.text(kLeft - 8, py(t) + 4, fmt_tick(t), "end", 11);
    }
    svg.text(kLeft + plot_w / 2, kHeight - 12, x_label(kind));
    svg.text(16, kTop + plot_h / 2, y_label(kind), "middle", 12, -90);

    for (const auto& s : series) {
        std::vector<std::pair<double, double>> band;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            band.emplace_back(px(s.x[i]), py(s.mean[i] + 2 * s.sd[i]));
        for (std::size_t i = s.x.size(); i-- > 0;)
            band.emplace_back(px(s.x[i]), py(s.mean[i] - 2 * s.sd[i]));
        svg.polygon(band, s.color);
        std::vector<std::pair<double, double>> mid;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            mid.emplace_back(px(s.x[i]), py(s.mean[i]));
        svg.polyline(mid, s.color);
    }

    std::optional<double> marker = options.switch_marker;
    if (!marker) {
        // mean time (or iteration) of the configured switch across BEA runs
        std::vector<double> xs_at_switch;
        for (const auto* r : ok)
            if (r->switch_point) {
                const auto i = static_cast<std::size_t>(*r->switch_point);
                if (kind == PlotKind::ObjectiveVsTime) {
                    if (i >= 1 && i <= r->times.size())
                        xs_at_switch.push_back(r->times[i - 1]);
                } else {
                    xs_at_switch.push_back(static_cast<double>(i));
                }
            }
        if (!xs_at_switch.empty()) {
            double m, sd;
            mean_sd(xs_at_switch, m, sd);
            marker = m;
        }
    }
    if (marker && *marker >= xs.lo && *marker <= xs.hi)
        svg.line(px(*marker), kTop, px(*marker), kTop + plot_h, "#7f3fbf", 1.2, true);

    // legend, one entry per algorithm
    double ly = kTop + 10;
    for (const auto& s : series) {
        const double lx = kLeft + plot_w - 130;
        svg.line(lx, ly, lx + 24, ly, s.color, 2.0);
        svg.text(lx + 30, ly + 4, s.label, "start", 12);
        ly += 18;
    }

    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out << svg.finish();
    if (!out.good())
        throw std::runtime_error("write failed: " + path);
}

} // namespace optbench
