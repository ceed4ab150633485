#include "paradoxlens/svg.hpp"

#include "paradoxlens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace paradoxlens {

namespace {

constexpr const char* kGroupColor[2] = {"#1b9e77", "#d95f02"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

struct SimpleLine {
    double slope = 0.0;
    double intercept = 0.0;
    bool valid = false;
};

SimpleLine group_regression(const std::vector<double>& x, const std::vector<double>& y) {
    SimpleLine line;
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx > 0.0) {
        line.slope = sxy / sxx;
        line.intercept = my - line.slope * mx;
        line.valid = true;
    }
    return line;
}

// round tick spacing to 1/2/5 * 10^k
double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(1, target_ticks);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0;
    if (norm <= 1.0) step = 1.0;
    else if (norm <= 2.0) step = 2.0;
    else if (norm <= 5.0) step = 5.0;
    return step * mag;
}

} // namespace

std::string render_scatter_svg(const Dataset& ds, const PlotOptions& options) {
    require_both_groups(ds, "plot");

    const double margin_left = 64.0, margin_right = 24.0, margin_top = 44.0, margin_bottom = 56.0;
    const double plot_w = options.width - margin_left - margin_right;
    const double plot_h = options.height - margin_top - margin_bottom;

    const auto xs = ds.values(Variable::w_initial);
    const auto ys = ds.values(Variable::w_final);
    double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
    for (double v : xs) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    for (double v : ys) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    const double xpad = (xmax - xmin) * 0.05 + 1e-9;
    const double ypad = (ymax - ymin) * 0.05 + 1e-9;
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return margin_left + (v - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double v) { return margin_top + (ymax - v) / (ymax - ymin) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height
        << "\">\n";
    svg << "<rect width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << options.title << "</text>\n";

    // axes
    svg << "<rect x=\"" << num(margin_left) << "\" y=\"" << num(margin_top) << "\" width=\""
        << num(plot_w) << "\" height=\"" << num(plot_h)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    const double xstep = nice_step(xmax - xmin, 6);
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9; t += xstep) {
        svg << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(margin_top + plot_h) << "\" x2=\""
            << num(sx(t)) << "\" y2=\"" << num(margin_top + plot_h + 5)
            << "\" stroke=\"#444444\"/>\n";
        svg << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(margin_top + plot_h + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
            << "</text>\n";
    }
    const double ystep = nice_step(ymax - ymin, 6);
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-9; t += ystep) {
        svg << "<line x1=\"" << num(margin_left - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\""
            << num(margin_left) << "\" y2=\"" << num(sy(t)) << "\" stroke=\"#444444\"/>\n";
        svg << "<text x=\"" << num(margin_left - 8) << "\" y=\"" << num(sy(t) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << num(margin_left + plot_w / 2) << "\" y=\""
        << num(margin_top + plot_h + 40)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">initial"
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << num(margin_top + plot_h / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << num(margin_top + plot_h / 2) << ")\">final</text>\n";

    // identity line across the visible diagonal
    const double dlo = std::max(xmin, ymin);
    const double dhi = std::min(xmax, ymax);
    if (dlo < dhi) {
        svg << "<line id=\"identity-line\" x1=\"" << num(sx(dlo)) << "\" y1=\"" << num(sy(dlo))
            << "\" x2=\"" << num(sx(dhi)) << "\" y2=\"" << num(sy(dhi))
            << "\" stroke=\"#888888\" stroke-dasharray=\"6 4\" stroke-width=\"1\"/>\n";
    }

    for (int group : {0, 1}) {
        const auto gx = ds.values(Variable::w_initial, group);
        const auto gy = ds.values(Variable::w_final, group);
        svg << "<g id=\"group" << group << "-points\" fill=\"" << kGroupColor[group]
            << "\" fill-opacity=\"0.55\">\n";
        for (std::size_t i = 0; i < gx.size(); ++i) {
            svg << "<circle cx=\"" << num(sx(gx[i])) << "\" cy=\"" << num(sy(gy[i]))
                << "\" r=\"2.4\"/>\n";
        }
        svg << "</g>\n";

        const SimpleLine line = group_regression(gx, gy);
        if (line.valid) {
            const double x0 = *std::min_element(gx.begin(), gx.end());
            const double x1 = *std::max_element(gx.begin(), gx.end());
            svg << "<line id=\"group" << group << "-fit\" x1=\"" << num(sx(x0)) << "\" y1=\""
                << num(sy(line.intercept + line.slope * x0)) << "\" x2=\"" << num(sx(x1))
                << "\" y2=\"" << num(sy(line.intercept + line.slope * x1)) << "\" stroke=\""
                << kGroupColor[group] << "\" stroke-width=\"2\"/>\n";
        }

        double mx = 0.0, my = 0.0;
        for (double v : gx) mx += v;
        for (double v : gy) my += v;
        mx /= static_cast<double>(gx.size());
        my /= static_cast<double>(gy.size());
        svg << "<path id=\"group" << group << "-mean\" d=\"M " << num(sx(mx) - 7) << " "
            << num(sy(my)) << " L " << num(sx(mx)) << " " << num(sy(my) - 7) << " L "
            << num(sx(mx) + 7) << " " << num(sy(my)) << " L " << num(sx(mx)) << " "
            << num(sy(my) + 7) << " Z\" fill=\"white\" stroke=\"" << kGroupColor[group]
            << "\" stroke-width=\"2\"/>\n";
    }

    // legend
    const double lx = margin_left + 12, ly = margin_top + 12;
    svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect x=\"" << num(lx - 6) << "\" y=\"" << num(ly - 6)
        << "\" width=\"150\" height=\"54\" fill=\"white\" fill-opacity=\"0.85\" "
        << "stroke=\"#777777\"/>\n";
    for (int group : {0, 1}) {
        const double row = ly + 8 + 16.0 * group;
        svg << "<circle cx=\"" << num(lx + 6) << "\" cy=\"" << num(row - 4) << "\" r=\"4\" fill=\""
            << kGroupColor[group] << "\"/>\n";
        svg << "<text x=\"" << num(lx + 16) << "\" y=\"" << num(row) << "\">group " << group
            << " (n=" << ds.group_count(group) << ")</text>\n";
    }
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly + 36) << "\" x2=\"" << num(lx + 12)
        << "\" y2=\"" << num(ly + 36) << "\" stroke=\"#888888\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << num(lx + 16) << "\" y=\"" << num(ly + 40) << "\">identity</text>\n";
    svg << "</g>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace paradoxlens
