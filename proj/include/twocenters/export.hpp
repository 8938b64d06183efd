#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "dynamics.hpp"

namespace twocenters {

/// 17 significant digits; strtod reads the text back bit-exactly.
inline std::string format_full(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// 6 significant digits, for plot coordinates.
inline std::string format_short(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline void write_diagram_grid_csv(std::ostream& os, const Diagram& d)
{
    os << "E,K,label,pattern,bounded\n";
    for (const auto& cell : d.cells) {
        os << format_full(cell.em.e) << ',' << format_full(cell.em.k) << ',' << csv_field(cell.region.label) << ','
           << csv_field(cell.region.pattern) << ',' << (cell.region.bounded_component ? "true" : "false") << '\n';
    }
}

inline void write_diagram_curves_csv(std::ostream& os, const Diagram& d)
{
    os << "curve,E,K\n";
    for (const auto& line : d.curves) {
        for (const auto& p : line.points) {
            os << to_string(line.curve) << ',' << format_full(p.e) << ',' << format_full(p.k) << '\n';
        }
    }
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr)
{
    os << "s,t,q1,q2,p1,p2,x,y,E_drift,K_drift\n";
    for (const auto& s : tr.samples) {
        const auto& c = s.cartesian;
        os << format_full(s.s) << ',' << format_full(s.t) << ',' << format_full(c.q1) << ',' << format_full(c.q2)
           << ',' << format_full(c.p1) << ',' << format_full(c.p2) << ',' << format_full(s.separated.x) << ','
           << format_full(s.separated.y) << ',' << format_full(s.e_drift) << ',' << format_full(s.k_drift) << '\n';
    }
}

inline void write_events_csv(std::ostream& os, const Trajectory& tr)
{
    os << "s,kind\n";
    for (const auto& e : tr.events) os << format_full(e.s) << ',' << to_string(e.kind) << '\n';
}

namespace detail {

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

/// Affine map from data coordinates to an SVG canvas with a margin; y points up.
struct Canvas {
    double x0, x1, y0, y1;
    double width = 640.0;
    double height = 480.0;
    double margin = 48.0;

    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2.0 * margin); }
    double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2.0 * margin); }
    std::string point(double x, double y) const { return format_short(px(x)) + ',' + format_short(py(y)); }
};

inline void svg_open(std::ostream& os, const Canvas& cv)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << format_short(cv.width)
       << "\" height=\"" << format_short(cv.height) << "\" viewBox=\"0 0 " << format_short(cv.width) << ' '
       << format_short(cv.height) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << format_short(cv.width) << "\" height=\"" << format_short(cv.height)
       << "\" fill=\"white\"/>\n";
}

inline void svg_frame(std::ostream& os, const Canvas& cv, const std::string& xlabel, const std::string& ylabel)
{
    os << "<rect x=\"" << format_short(cv.margin) << "\" y=\"" << format_short(cv.margin) << "\" width=\""
       << format_short(cv.width - 2 * cv.margin) << "\" height=\"" << format_short(cv.height - 2 * cv.margin)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto label = [&](double x, double y, const std::string& text, const char* anchor) {
        os << "<text x=\"" << format_short(x) << "\" y=\"" << format_short(y)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"" << anchor << "\">" << text
           << "</text>\n";
    };
    label(cv.margin, cv.height - cv.margin + 14, format_short(cv.x0), "start");
    label(cv.width - cv.margin, cv.height - cv.margin + 14, format_short(cv.x1), "end");
    label(cv.width / 2, cv.height - 12, xlabel, "middle");
    label(cv.margin - 4, cv.height - cv.margin, format_short(cv.y0), "end");
    label(cv.margin - 4, cv.margin + 8, format_short(cv.y1), "end");
    label(14, cv.height / 2, ylabel, "middle");
}

inline const char* curve_color(CurveId c) noexcept
{
    switch (c) {
    case CurveId::L0: return "#555555";
    case CurveId::Lm1: return "#1f77b4";
    case CurveId::Lm2: return "#2ca02c";
    case CurveId::Lm3: return "#9467bd";
    case CurveId::Lp1: return "#8c564b";
    case CurveId::Lp2: return "#d62728";
    case CurveId::Lp3: return "#ff7f0e";
    }
    return "black";
}

} // namespace detail

/// Diagram plot: forbidden region shaded, curves stroked, region names at representative cells.
inline void write_diagram_svg(std::ostream& os, const Diagram& d)
{
    const detail::Canvas cv{d.e_range.lo, d.e_range.hi, d.k_range.lo, d.k_range.hi};
    detail::svg_open(os, cv);

    os << "<polygon fill=\"#d9d9d9\" stroke=\"none\" points=\"";
    os << cv.point(d.e_range.lo, d.k_range.hi);
    for (const auto& p : d.upper_boundary) {
        os << ' ' << cv.point(p.e, std::clamp(p.k, d.k_range.lo, d.k_range.hi));
    }
    os << ' ' << cv.point(d.e_range.hi, d.k_range.hi) << "\"/>\n";

    for (const auto& line : d.curves) {
        os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << detail::curve_color(line.curve)
           << "\" data-curve=\"" << to_string(line.curve) << "\" points=\"";
        for (std::size_t i = 0; i < line.points.size(); ++i) {
            os << (i ? " " : "") << cv.point(line.points[i].e, line.points[i].k);
        }
        os << "\"/>\n";
    }

    // Label each region at the member cell nearest to the mean of its members.
    std::map<std::string, std::vector<const DiagramCell*>> members;
    for (const auto& cell : d.cells) {
        const auto& l = cell.region.label;
        if (l != "boundary" && l != "unlabeled") members[l].push_back(&cell);
    }
    for (const auto& [label, cells] : members) {
        double me = 0.0;
        double mk = 0.0;
        for (const auto* c : cells) {
            me += cv.px(c->em.e);
            mk += cv.py(c->em.k);
        }
        me /= static_cast<double>(cells.size());
        mk /= static_cast<double>(cells.size());
        const DiagramCell* best = cells.front();
        double best_d = INFINITY;
        for (const auto* c : cells) {
            const double dist = std::hypot(cv.px(c->em.e) - me, cv.py(c->em.k) - mk);
            if (dist < best_d) {
                best_d = dist;
                best = c;
            }
        }
        os << "<text x=\"" << format_short(cv.px(best->em.e)) << "\" y=\"" << format_short(cv.py(best->em.k))
           << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" << detail::xml_escape(label) << "</text>\n";
    }
    detail::svg_frame(os, cv, "E", "K");
    os << "</svg>\n";
}

/// Configuration-space path with the centers and the (E, K) level in the caption.
inline void write_trajectory_svg(std::ostream& os, const Trajectory& tr)
{
    double lo1 = -1.5, hi1 = 1.5, lo2 = -1.5, hi2 = 1.5;
    for (const auto& s : tr.samples) {
        lo1 = std::min(lo1, s.cartesian.q1);
        hi1 = std::max(hi1, s.cartesian.q1);
        lo2 = std::min(lo2, s.cartesian.q2);
        hi2 = std::max(hi2, s.cartesian.q2);
    }
    const double half = 0.55 * std::max(hi1 - lo1, hi2 - lo2);
    const double c1 = 0.5 * (lo1 + hi1);
    const double c2 = 0.5 * (lo2 + hi2);
    detail::Canvas cv{c1 - half, c1 + half, c2 - half, c2 + half};
    cv.width = cv.height = 560.0;
    detail::svg_open(os, cv);

    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        os << (i ? " " : "") << cv.point(tr.samples[i].cartesian.q1, tr.samples[i].cartesian.q2);
    }
    os << "\"/>\n";
    for (double q1 : {-1.0, 1.0}) {
        os << "<circle cx=\"" << format_short(cv.px(q1)) << "\" cy=\"" << format_short(cv.py(0.0))
           << "\" r=\"4\" fill=\"black\"/>\n";
    }
    os << "<text x=\"" << format_short(cv.width / 2) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\" "
       << "text-anchor=\"middle\">E = " << format_short(tr.em.e) << ", K = " << format_short(tr.em.k)
       << "</text>\n";
    detail::svg_frame(os, cv, "q1", "q2");
    os << "</svg>\n";
}

} // namespace twocenters
