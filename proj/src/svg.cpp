#include "chiral/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace chiral {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

const char* label_colour(Label l) {
    if (l.w > 0) return l.z > 0 ? "#d95f02" : "#1b9e77";
    return l.z > 0 ? "#7570b3" : "#e7298a";
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string mesh_svg(const MeshPotential& m, double pixels) {
    const Domain& d = m.domain;
    const double scale = pixels / std::max(d.width(), d.height());
    const double w = d.width() * scale;
    const double h = d.height() * scale;
    auto px = [&](Vec2 p) {
        return fmt((p.x - d.origin().x) * scale) + "," + fmt(h - (p.y - d.origin().y) * scale);
    };
    const MeshValidation v = validate_mesh(m);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
        << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        const char* fill = v.valid ? label_colour(v.labels[t]) : "#999999";
        out << "<polygon points=\"" << px(m.vertices[tri[0]]) << ' ' << px(m.vertices[tri[1]]) << ' '
            << px(m.vertices[tri[2]]) << "\" fill=\"" << fill << "\" stroke=\"" << fill << "\"/>\n";
    }
    if (v.valid) {
        for (const JumpSegment& s : jump_set(m)) {
            const std::string a = px(s.p), b = px(s.q);
            const auto ca = a.find(','), cb = b.find(',');
            out << "<line x1=\"" << a.substr(0, ca) << "\" y1=\"" << a.substr(ca + 1) << "\" x2=\""
                << b.substr(0, cb) << "\" y2=\"" << b.substr(cb + 1) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string grid_svg(const ScalarGrid& g, const std::string& title, double pixels) {
    const double cell = pixels / static_cast<double>(std::max<std::size_t>({g.nx(), g.ny(), 1}));
    const double w = cell * static_cast<double>(g.nx());
    const double h = cell * static_cast<double>(g.ny());
    double peak = 0.0;
    for (double v : g.values()) peak = std::max(peak, std::abs(v));
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
        << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\">\n";
    out << "<title>" << escape(title) << "</title>\n";
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double t = peak > 0.0 ? g.at(i, j) / peak : 0.0;
            const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
            char colour[8];
            if (t >= 0.0) {
                std::snprintf(colour, sizeof colour, "#ff%02x%02x", fade, fade);
            } else {
                std::snprintf(colour, sizeof colour, "#%02x%02xff", fade, fade);
            }
            out << "<rect x=\"" << fmt(cell * static_cast<double>(i)) << "\" y=\""
                << fmt(h - cell * static_cast<double>(j + 1)) << "\" width=\"" << fmt(cell) << "\" height=\""
                << fmt(cell) << "\" fill=\"" << colour << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace chiral
