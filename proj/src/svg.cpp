#include "iob/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

namespace iob {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 30.0;
constexpr double kMarginTop = 30.0;
constexpr double kMarginBottom = 60.0;

const char* kColors[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void write_power_chart_svg(const SweepResult& sweep, std::ostream& out) {
    double xmin = std::log10(sweep.rates(0));
    double xmax = std::log10(sweep.rates(sweep.rates.size() - 1));
    double ymin = 0.0, ymax = 0.0;
    bool any = false;
    for (const auto& series : sweep.power) {
        for (Eigen::Index i = 0; i < series.size(); ++i) {
            if (std::isnan(series(i)) || series(i) <= 0.0) {
                continue;
            }
            double ly = std::log10(series(i));
            if (!any) {
                ymin = ymax = ly;
                any = true;
            } else {
                ymin = std::min(ymin, ly);
                ymax = std::max(ymax, ly);
            }
        }
    }
    if (!any) {
        ymin = -6.0;
        ymax = 0.0;
    }
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    if (ymax == ymin) {
        ymax += 1.0;
    }

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double lx) {
        return kMarginLeft + (lx - xmin) / (xmax - xmin) * plot_w;
    };
    auto py = [&](double ly) {
        return kMarginTop + (ymax - ly) / (ymax - ymin) * plot_h;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\">\n";
    out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";

    // decade ticks and grid
    for (int d = static_cast<int>(std::ceil(xmin)); d <= std::floor(xmax); ++d) {
        double x = px(d);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kMarginTop)
            << "\" x2=\"" << num(x) << "\" y2=\"" << num(kHeight - kMarginBottom)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(kHeight - kMarginBottom + 20)
            << "\" font-size=\"12\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(ymin)); d <= std::floor(ymax); ++d) {
        double y = py(d);
        out << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(y)
            << "\" x2=\"" << num(kWidth - kMarginRight) << "\" y2=\"" << num(y)
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << num(kMarginLeft - 8) << "\" y=\"" << num(y + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">1e" << d << "</text>\n";
    }

    // axes
    out << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(kMarginTop)
        << "\" width=\"" << num(plot_w) << "\" height=\"" << num(plot_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kMarginLeft + plot_w / 2) << "\" y=\""
        << num(kHeight - 15)
        << "\" font-size=\"14\" text-anchor=\"middle\">data rate (bits/s)</text>\n";
    out << "<text x=\"20\" y=\"" << num(kMarginTop + plot_h / 2)
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << num(kMarginTop + plot_h / 2) << ")\">power (W)</text>\n";

    for (std::size_t c = 0; c < sweep.power.size(); ++c) {
        const auto& series = sweep.power[c];
        out << "<polyline fill=\"none\" stroke=\""
            << kColors[c % (sizeof kColors / sizeof kColors[0])]
            << "\" stroke-width=\"2\" points=\"";
        for (Eigen::Index i = 0; i < series.size(); ++i) {
            if (std::isnan(series(i)) || series(i) <= 0.0) {
                continue;
            }
            out << num(px(std::log10(sweep.rates(i)))) << ','
                << num(py(std::log10(series(i)))) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << num(kWidth - kMarginRight - 10) << "\" y=\""
            << num(kMarginTop + 20.0 * (static_cast<double>(c) + 1)) << "\" font-size=\"13\" text-anchor=\"end\" fill=\""
            << kColors[c % (sizeof kColors / sizeof kColors[0])] << "\">"
            << sweep.labels[c] << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace iob
