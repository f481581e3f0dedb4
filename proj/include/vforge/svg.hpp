#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vforge/complex_util.hpp"
#include "vforge/interval_set.hpp"

namespace vforge {

/* Minimal deterministic SVG emitter: fixed viewport, no timestamps. */
class SvgWriter {
  public:
    SvgWriter(double width, double height) : w_(width), h_(height) {
        body_ << std::setprecision(10);
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double sw = 1.0) {
        body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << sw << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double sw = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << sw
              << "\" points=\"";
        for (const auto& p : pts) body_ << p.first << ',' << p.second << ' ';
        body_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& stroke,
                const std::string& fill = "none") {
        body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" stroke=\""
              << stroke << "\" fill=\"" << fill << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12) {
        body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
              << "\" font-family=\"monospace\">" << s << "</text>\n";
    }

    void write(std::ostream& os) const {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
           << "\" viewBox=\"0 0 " << w_ << ' ' << h_ << "\">\n"
           << body_.str() << "</svg>\n";
    }

  private:
    double w_, h_;
    std::ostringstream body_;
};

/* Interval set bars on a horizontal axis (one row per set). */
inline void svg_interval_sets(std::ostream& os, const std::vector<IntervalSet>& sets,
                              double lo, double hi) {
    double W = 900.0, H = 40.0 * sets.size() + 40.0;
    SvgWriter svg(W, H);
    auto sx = [&](double x) { return 20.0 + (x - lo) / (hi - lo) * (W - 40.0); };
    for (std::size_t r = 0; r < sets.size(); ++r) {
        double y = 40.0 + 40.0 * r;
        svg.line(sx(lo), y, sx(hi), y, "#cccccc", 0.5);
        for (const auto& iv : sets[r].components())
            svg.rect(sx(iv.left), y - 6.0, std::max(0.75, sx(iv.right) - sx(iv.left)), 12.0,
                     "#1f6f43");
        svg.text(sx(lo), y - 14.0, "level " + std::to_string(r + 1));
    }
    svg.write(os);
}

/* Closed curve in the value plane with a marker at the origin. */
inline void svg_loop(std::ostream& os, const std::vector<cplx>& loop, const std::string& title) {
    double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    for (const auto& v : loop) {
        lo_x = std::min(lo_x, v.real());
        hi_x = std::max(hi_x, v.real());
        lo_y = std::min(lo_y, v.imag());
        hi_y = std::max(hi_y, v.imag());
    }
    double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-300});
    double W = 600.0, H = 640.0;
    SvgWriter svg(W, H);
    auto sx = [&](double x) { return 30.0 + (x - lo_x) / span * 540.0; };
    auto sy = [&](double y) { return 610.0 - (y - lo_y) / span * 540.0; };
    std::vector<std::pair<double, double>> pts;
    pts.reserve(loop.size());
    for (const auto& v : loop) pts.emplace_back(sx(v.real()), sy(v.imag()));
    svg.polyline(pts, "#20506e", 1.0);
    svg.circle(sx(0.0), sy(0.0), 3.0, "#b03030", "#b03030");
    svg.text(30.0, 20.0, title);
    svg.write(os);
}

/* log-log count-versus-scale plot with a fitted-slope label. */
inline void svg_dimension_plot(std::ostream& os,
                               const std::vector<std::pair<double, double>>& levels,
                               double slope, const std::string& title) {
    double W = 600.0, H = 440.0;
    SvgWriter svg(W, H);
    if (!levels.empty()) {
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        std::vector<std::pair<double, double>> pts;
        for (const auto& lv : levels) {
            double x = std::log(1.0 / lv.second), y = std::log(lv.first);
            pts.emplace_back(x, y);
            lo_x = std::min(lo_x, x);
            hi_x = std::max(hi_x, x);
            lo_y = std::min(lo_y, y);
            hi_y = std::max(hi_y, y);
        }
        double sp_x = std::max(hi_x - lo_x, 1e-12), sp_y = std::max(hi_y - lo_y, 1e-12);
        std::vector<std::pair<double, double>> spts;
        for (const auto& p : pts)
            spts.emplace_back(40.0 + (p.first - lo_x) / sp_x * 520.0,
                              400.0 - (p.second - lo_y) / sp_y * 360.0);
        svg.polyline(spts, "#20506e", 1.5);
        for (const auto& p : spts) svg.circle(p.first, p.second, 3.0, "#20506e", "#20506e");
    }
    std::ostringstream lab;
    lab << std::setprecision(10) << title << "  slope=" << slope;
    svg.text(40.0, 20.0, lab.str());
    svg.write(os);
}

} // namespace vforge
