#include "platoon/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace platoon {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string svg_line_chart(const std::string& title, const std::vector<SvgSeries>& series,
                           const std::string& x_label, const std::string& y_label, int width,
                           int height) {
    const double ml = 64, mr = 16, mt = 32, mb = 36; // margins
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                any = true;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(ml) + "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" +
           escape(title) + "</text>\n";
    out += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
           "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";

    if (ymin < 0.0 && ymax > 0.0) {
        out += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(0)) + "\" x2=\"" + fmt(ml + pw) +
               "\" y2=\"" + fmt(py(0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }

    int idx = 0;
    double lx = ml + 8;
    for (const auto& s : series) {
        const char* color = kPalette[idx % kPaletteSize];
        size_t count = std::min(s.x.size(), s.y.size());
        size_t stride = std::max<size_t>(1, count / 1500);
        std::string path;
        for (size_t i = 0; i < count; i += stride) {
            path += (i == 0 ? "M" : "L");
            path += fmt(px(s.x[i])) + " " + fmt(py(s.y[i]));
        }
        if (count > 0 && (count - 1) % stride != 0) {
            path += "L" + fmt(px(s.x[count - 1])) + " " + fmt(py(s.y[count - 1]));
        }
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.2\"/>\n";
        out += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(mt + 6) +
               "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + fmt(lx + 13) + "\" y=\"" + fmt(mt + 15) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) + "</text>\n";
        lx += 13 + 8.0 * (s.label.size() + 2);
        ++idx;
    }

    out += "<text x=\"" + fmt(ml) + "\" y=\"" + fmt(height - 8) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(xmin) + "</text>\n";
    out += "<text x=\"" + fmt(ml + pw - 30) + "\" y=\"" + fmt(height - 8) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(xmax) + "</text>\n";
    out += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 8) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(x_label) + "</text>\n";
    out += "<text x=\"4\" y=\"" + fmt(py(ymax - ypad)) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(ymax - ypad) + "</text>\n";
    out += "<text x=\"4\" y=\"" + fmt(py(ymin + ypad)) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(ymin + ypad) + "</text>\n";
    out += "<text x=\"4\" y=\"" + fmt(mt + ph / 2) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(y_label) + "</text>\n";
    out += "</svg>\n";
    return out;
}

std::vector<std::pair<std::string, std::string>> plot_panels(const SimScenario& sc,
                                                             const SimResult& r) {
    std::vector<std::pair<std::string, std::string>> out;

    std::vector<SvgSeries> inputs;
    {
        SvgSeries u0{"u0", r.t, {}};
        u0.y.resize(r.t.size());
        for (size_t i = 0; i < r.t.size(); ++i) u0.y[i] = sc.u0_profile.at(i);
        inputs.push_back(std::move(u0));
        for (const auto& [k, sig] : sc.disturbances) {
            SvgSeries w{"w" + std::to_string(k), r.t, {}};
            w.y.resize(r.t.size());
            for (size_t i = 0; i < r.t.size(); ++i) w.y[i] = sig.at(i);
            inputs.push_back(std::move(w));
        }
    }
    out.emplace_back("inputs", svg_line_chart("Leader control and disturbances", inputs,
                                              "time [s]", "accel"));

    std::vector<SvgSeries> zs, ys, vs;
    for (size_t k = 0; k < r.z.size(); ++k)
        zs.push_back({"z" + std::to_string(k + 1), r.t, r.z[k]});
    for (size_t k = 0; k < r.y.size(); ++k)
        ys.push_back({"y" + std::to_string(k), r.t, r.y[k]});
    for (size_t k = 0; k < r.v.size(); ++k)
        vs.push_back({"v" + std::to_string(k), r.t, r.v[k]});

    out.emplace_back("spacing_errors",
                     svg_line_chart("Spacing errors", zs, "time [s]", "z [m]"));
    out.emplace_back("positions", svg_line_chart("Positions", ys, "time [s]", "y [m]"));
    out.emplace_back("velocities", svg_line_chart("Velocities", vs, "time [s]", "v [m/s]"));
    return out;
}

} // namespace platoon
