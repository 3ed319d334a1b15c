#include "chiral/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chiral/error.hpp"

namespace chiral {

namespace {

constexpr double kGradTol = 1e-9;
constexpr double kGeomTol = 1e-9;

double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

struct TriangleGeometry {
    double area = 0.0;
    Vec2 gradient;
    Vec2 centroid;
};

TriangleGeometry triangle_geometry(const MeshPotential& m, std::size_t t) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
    const double ha = m.heights[tri[0]], hb = m.heights[tri[1]], hc = m.heights[tri[2]];
    TriangleGeometry g;
    g.area = signed_area(a, b, c);
    g.centroid = (1.0 / 3.0) * (a + b + c);
    const Vec2 e1 = b - a, e2 = c - a;
    const double det = cross(e1, e2);
    if (det != 0.0) {
        const double d1 = hb - ha, d2 = hc - ha;
        g.gradient = {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det};
    }
    return g;
}

int sign_of_unit(double v) {
    if (std::abs(v - 1.0) <= kGradTol) return 1;
    if (std::abs(v + 1.0) <= kGradTol) return -1;
    return 0;
}

Vec2 canonical_normal(Vec2 n) {
    const double len = norm(n);
    n = (1.0 / len) * n;
    if (n.x < -1e-12 || (std::abs(n.x) <= 1e-12 && n.y < 0.0)) n = -1.0 * n;
    if (std::abs(n.x) <= 1e-15) n.x = 0.0;
    if (std::abs(n.y) <= 1e-15) n.y = 0.0;
    return n;
}

double mesh_scale(const Domain& d) { return std::max(1.0, std::hypot(d.width(), d.height())); }

}  // namespace

MeshValidation validate_mesh(const MeshPotential& m) {
    MeshValidation out;
    std::ostringstream msg;
    if (m.heights.size() != m.vertices.size()) {
        out.valid = false;
        out.message = "heights and vertices differ in length";
        return out;
    }
    const double scale = mesh_scale(m.domain);
    double total_area = 0.0;
    out.labels.resize(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        bool ok = true;
        for (int v : m.triangles[t]) {
            if (v < 0 || static_cast<std::size_t>(v) >= m.vertices.size()) ok = false;
        }
        if (!ok) {
            out.offending.push_back(t);
            continue;
        }
        const TriangleGeometry g = triangle_geometry(m, t);
        total_area += std::abs(g.area);
        const int sw = sign_of_unit(g.gradient.x);
        const int sz = sign_of_unit(g.gradient.y);
        if (std::abs(g.area) <= 1e-14 * scale * scale || sw == 0 || sz == 0 ||
            !m.domain.contains(g.centroid, kGeomTol * scale)) {
            out.offending.push_back(t);
            continue;
        }
        out.labels[t] = {sw, sz};
    }
    if (!out.offending.empty()) {
        msg << out.offending.size() << " triangle(s) with gradient outside {-1,1}^2 or bad geometry:";
        for (std::size_t k = 0; k < out.offending.size() && k < 20; ++k) msg << ' ' << out.offending[k];
        out.valid = false;
    } else if (std::abs(total_area - m.domain.area()) > 1e-9 * m.domain.area()) {
        msg << "triangles cover area " << total_area << " but the domain has area " << m.domain.area();
        out.valid = false;
    }
    out.message = msg.str();
    return out;
}

std::vector<Label> mesh_labels(const MeshPotential& m) {
    MeshValidation v = validate_mesh(m);
    if (!v.valid) throw ValidationError("invalid mesh: " + v.message);
    return std::move(v.labels);
}

std::vector<JumpSegment> jump_set(const MeshPotential& m) {
    const std::vector<Label> labels = mesh_labels(m);
    const double tol = kGeomTol * mesh_scale(m.domain);
    std::vector<TriangleGeometry> geo(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) geo[t] = triangle_geometry(m, t);

    std::vector<JumpSegment> raw;
    for (std::size_t a = 0; a < m.triangles.size(); ++a) {
        for (std::size_t b = a + 1; b < m.triangles.size(); ++b) {
            if (labels[a] == labels[b]) continue;
            for (int ea = 0; ea < 3; ++ea) {
                const Vec2 P = m.vertices[m.triangles[a][ea]];
                const Vec2 Q = m.vertices[m.triangles[a][(ea + 1) % 3]];
                const Vec2 d = Q - P;
                const double L = norm(d);
                const Vec2 n{-d.y / L, d.x / L};
                for (int eb = 0; eb < 3; ++eb) {
                    const Vec2 R = m.vertices[m.triangles[b][eb]];
                    const Vec2 S = m.vertices[m.triangles[b][(eb + 1) % 3]];
                    if (std::abs(dot(R - P, n)) > tol || std::abs(dot(S - P, n)) > tol) continue;
                    const double tR = dot(R - P, d) / (L * L);
                    const double tS = dot(S - P, d) / (L * L);
                    const double t0 = std::max(0.0, std::min(tR, tS));
                    const double t1 = std::min(1.0, std::max(tR, tS));
                    if ((t1 - t0) * L <= tol) continue;
                    const double sa = dot(geo[a].centroid - P, n);
                    const double sb = dot(geo[b].centroid - P, n);
                    if (sa * sb >= 0.0) continue;
                    JumpSegment s;
                    s.p = P + t0 * d;
                    s.q = P + t1 * d;
                    s.nu = canonical_normal(n);
                    const bool a_plus = dot(geo[a].centroid - P, s.nu) > 0.0;
                    s.plus = a_plus ? labels[a] : labels[b];
                    s.minus = a_plus ? labels[b] : labels[a];
                    s.length = norm(s.q - s.p);
                    raw.push_back(s);
                }
            }
        }
    }

    // merge collinear touching pieces with identical traces
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t x = 0; x < raw.size() && !merged; ++x) {
            for (std::size_t y = x + 1; y < raw.size() && !merged; ++y) {
                JumpSegment& s = raw[x];
                const JumpSegment& t = raw[y];
                if (!(s.plus == t.plus) || !(s.minus == t.minus) || norm(s.nu - t.nu) > 1e-9) continue;
                if (std::abs(dot(t.p - s.p, s.nu)) > tol || std::abs(dot(t.q - s.p, s.nu)) > tol) continue;
                const Vec2 tau{-s.nu.y, s.nu.x};
                double a0 = dot(s.p, tau), a1 = dot(s.q, tau), b0 = dot(t.p, tau), b1 = dot(t.q, tau);
                if (a0 > a1) std::swap(a0, a1);
                if (b0 > b1) std::swap(b0, b1);
                if (b0 > a1 + tol || a0 > b1 + tol) continue;
                const Vec2 pts[4] = {s.p, s.q, t.p, t.q};
                Vec2 lo = pts[0], hi = pts[0];
                for (const Vec2& p : pts) {
                    if (dot(p, tau) < dot(lo, tau)) lo = p;
                    if (dot(p, tau) > dot(hi, tau)) hi = p;
                }
                s.p = lo;
                s.q = hi;
                s.length = norm(hi - lo);
                raw.erase(raw.begin() + static_cast<std::ptrdiff_t>(y));
                merged = true;
            }
        }
    }
    for (JumpSegment& s : raw) {
        const Vec2 tau{-s.nu.y, s.nu.x};
        if (dot(s.p, tau) > dot(s.q, tau)) std::swap(s.p, s.q);
    }
    std::sort(raw.begin(), raw.end(), [](const JumpSegment& a, const JumpSegment& b) {
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        if (a.p.y != b.p.y) return a.p.y < b.p.y;
        return a.q.x + a.q.y < b.q.x + b.q.y;
    });
    return raw;
}

const char* to_string(JumpClass c) {
    switch (c) {
        case JumpClass::J1: return "J1";
        case JumpClass::J2: return "J2";
        case JumpClass::J3: return "J3";
        case JumpClass::inadmissible: return "inadmissible";
    }
    return "inadmissible";
}

JumpClass classify_triple(Label plus, Label minus, Vec2 nu) {
    auto unit = [](int v) { return v == 1 || v == -1; };
    if (!unit(plus.w) || !unit(plus.z) || !unit(minus.w) || !unit(minus.z)) {
        throw ValidationError("traces must lie in {-1,1}^2");
    }
    if (std::abs(norm(nu) - 1.0) > 1e-9) throw ValidationError("normal must be a unit vector");
    const Vec2 jump{static_cast<double>(plus.w - minus.w), static_cast<double>(plus.z - minus.z)};
    if (jump.x == 0.0 && jump.y == 0.0) return JumpClass::inadmissible;
    // gradients of a continuous potential can only jump along the normal
    if (std::abs(cross(jump, nu)) > 1e-9 * norm(jump)) return JumpClass::inadmissible;
    if (jump.y == 0.0) return JumpClass::J1;
    if (jump.x == 0.0) return JumpClass::J2;
    return JumpClass::J3;
}

TotalVariations total_variations(const std::vector<JumpSegment>& segments) {
    TotalVariations tv;
    for (const JumpSegment& s : segments) {
        const double jw = std::abs(s.plus.w - s.minus.w);
        const double jz = std::abs(s.plus.z - s.minus.z);
        tv.d1w += jw * std::abs(s.nu.x) * s.length;
        tv.d2w += jw * std::abs(s.nu.y) * s.length;
        tv.d1z += jz * std::abs(s.nu.x) * s.length;
        tv.d2z += jz * std::abs(s.nu.y) * s.length;
    }
    return tv;
}

TotalVariations total_variations(const MeshPotential& m) { return total_variations(jump_set(m)); }

double sigma(Label a, Label b, Vec2 nu) {
    if (classify_triple(a, b, nu) == JumpClass::inadmissible) {
        throw ValidationError("sigma is only defined on admissible jump triples");
    }
    return 4.0 / 3.0 * (std::abs(a.w - b.w) * std::abs(nu.x) + std::abs(a.z - b.z) * std::abs(nu.y));
}

double limit_energy(const MeshPotential& m) {
    const TotalVariations tv = total_variations(m);
    return 4.0 / 3.0 * (tv.d1w + tv.d2z);
}

double limit_energy_by_sigma(const MeshPotential& m) {
    double total = 0.0;
    for (const JumpSegment& s : jump_set(m)) total += sigma(s.plus, s.minus, s.nu) * s.length;
    return total;
}

ExampleKind parse_example_kind(const std::string& name) {
    if (name == "affine") return ExampleKind::affine;
    if (name == "vertical_wall") return ExampleKind::vertical_wall;
    if (name == "horizontal_wall") return ExampleKind::horizontal_wall;
    if (name == "diagonal_wall") return ExampleKind::diagonal_wall;
    if (name == "four_quadrant") return ExampleKind::four_quadrant;
    if (name == "laminate") return ExampleKind::laminate;
    if (name == "corner_junction") return ExampleKind::corner_junction;
    throw ValidationError("unknown example kind '" + name + "'");
}

std::string to_string(ExampleKind k) {
    switch (k) {
        case ExampleKind::affine: return "affine";
        case ExampleKind::vertical_wall: return "vertical_wall";
        case ExampleKind::horizontal_wall: return "horizontal_wall";
        case ExampleKind::diagonal_wall: return "diagonal_wall";
        case ExampleKind::four_quadrant: return "four_quadrant";
        case ExampleKind::laminate: return "laminate";
        case ExampleKind::corner_junction: return "corner_junction";
    }
    return "affine";
}

namespace {

using Polygon = std::vector<Vec2>;

// Splits a convex polygon by the line through p with unit direction d.
std::pair<Polygon, Polygon> split(const Polygon& poly, Vec2 p, Vec2 d, double tol) {
    Polygon left, right;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2 a = poly[k];
        const Vec2 b = poly[(k + 1) % n];
        double sa = cross(d, a - p);
        double sb = cross(d, b - p);
        if (std::abs(sa) <= tol) sa = 0.0;
        if (std::abs(sb) <= tol) sb = 0.0;
        if (sa >= 0.0) left.push_back(a);
        if (sa <= 0.0) right.push_back(a);
        if ((sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0)) {
            const Vec2 x = a + (sa / (sa - sb)) * (b - a);
            left.push_back(x);
            right.push_back(x);
        }
    }
    return {left, right};
}

double polygon_area(const Polygon& p) {
    double a = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) a += cross(p[k], p[(k + 1) % p.size()]);
    return 0.5 * a;
}

}  // namespace

MeshPotential mesh_from_function(const Domain& domain, const std::vector<std::pair<Vec2, Vec2>>& cut_lines,
                                 const std::function<double(Vec2)>& phi) {
    if (!domain.is_rectangle()) throw ValidationError("mesh construction needs a rectangular domain");
    const Vec2 o = domain.origin();
    const double scale = mesh_scale(domain);
    const double tol = 1e-12 * scale;
    std::vector<Polygon> pieces{{o, {o.x + domain.width(), o.y}, {o.x + domain.width(), o.y + domain.height()},
                                 {o.x, o.y + domain.height()}}};
    for (const auto& [p, dir] : cut_lines) {
        const Vec2 d = (1.0 / norm(dir)) * dir;
        std::vector<Polygon> next;
        for (const Polygon& poly : pieces) {
            auto [l, r] = split(poly, p, d, tol);
            if (l.size() >= 3 && r.size() >= 3 && std::abs(polygon_area(l)) > tol * scale &&
                std::abs(polygon_area(r)) > tol * scale) {
                next.push_back(std::move(l));
                next.push_back(std::move(r));
            } else {
                next.push_back(poly);
            }
        }
        pieces = std::move(next);
    }

    MeshPotential m;
    m.domain = domain;
    auto vertex_id = [&](Vec2 v) {
        for (std::size_t k = 0; k < m.vertices.size(); ++k) {
            if (norm(m.vertices[k] - v) <= tol) return static_cast<int>(k);
        }
        m.vertices.push_back(v);
        m.heights.push_back(phi(v));
        return static_cast<int>(m.vertices.size() - 1);
    };
    for (Polygon& poly : pieces) {
        if (polygon_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
        Polygon clean;
        for (const Vec2& v : poly) {
            if (clean.empty() || norm(clean.back() - v) > tol) clean.push_back(v);
        }
        while (clean.size() > 1 && norm(clean.front() - clean.back()) <= tol) clean.pop_back();
        for (std::size_t k = 1; k + 1 < clean.size(); ++k) {
            if (signed_area(clean[0], clean[k], clean[k + 1]) <= tol * scale) continue;
            m.triangles.push_back({vertex_id(clean[0]), vertex_id(clean[k]), vertex_id(clean[k + 1])});
        }
    }
    return m;
}

MeshPotential build_example(ExampleKind kind, const Domain& domain, int laminate_walls) {
    if (!domain.is_rectangle()) throw ValidationError("examples are built on rectangles");
    const Vec2 o = domain.origin();
    const double W = domain.width();
    const double H = domain.height();
    const double cx = o.x + W / 2.0;
    const double cy = o.y + H / 2.0;
    const Vec2 ex{1.0, 0.0}, ey{0.0, 1.0};
    switch (kind) {
        case ExampleKind::affine:
            return mesh_from_function(domain, {}, [](Vec2 p) { return p.x + p.y; });
        case ExampleKind::vertical_wall:
            return mesh_from_function(domain, {{{cx, cy}, ey}}, [=](Vec2 p) { return std::abs(p.x - cx) + p.y; });
        case ExampleKind::horizontal_wall:
            return mesh_from_function(domain, {{{cx, cy}, ex}}, [=](Vec2 p) { return p.x + std::abs(p.y - cy); });
        case ExampleKind::diagonal_wall: {
            // corner cut whose wall has length min(W, H)
            const double c = std::min(W, H) / std::sqrt(2.0);
            const double k = o.x + o.y + c;
            return mesh_from_function(domain, {{{o.x + c, o.y}, {1.0, -1.0}}},
                                      [=](Vec2 p) { return std::abs(p.x + p.y - k); });
        }
        case ExampleKind::four_quadrant:
            return mesh_from_function(domain, {{{cx, cy}, ey}, {{cx, cy}, ex}},
                                      [=](Vec2 p) { return std::abs(p.x - cx) + std::abs(p.y - cy); });
        case ExampleKind::laminate: {
            if (laminate_walls < 1) throw ValidationError("laminate needs at least one wall");
            const int n = laminate_walls;
            const double gap = W / (n + 1);
            std::vector<std::pair<Vec2, Vec2>> lines;
            for (int k = 1; k <= n; ++k) lines.push_back({{o.x + k * gap, cy}, ey});
            auto profile = [=](Vec2 p) {
                // sawtooth with slope +1 on the first strip, alternating
                double s = 0.0;
                double x = o.x;
                int sign = 1;
                for (int k = 1; k <= n + 1; ++k) {
                    const double edge = k <= n ? o.x + k * gap : o.x + W;
                    const double end = std::min(p.x, edge);
                    if (end > x) s += sign * (end - x);
                    if (p.x <= edge) break;
                    x = edge;
                    sign = -sign;
                }
                return s + p.y;
            };
            return mesh_from_function(domain, lines, profile);
        }
        case ExampleKind::corner_junction:
            return mesh_from_function(domain, {{{cx, cy}, ey}, {{cx, cy}, ex}, {{cx, cy}, {1.0, 1.0}}}, [=](Vec2 p) {
                const double X = p.x - cx, Y = p.y - cy;
                return std::max({X + Y, X - Y, Y - X});
            });
    }
    throw ValidationError("unknown example kind");
}

MeshEvaluator::MeshEvaluator(const MeshPotential& m) : mesh_(m), labels_(mesh_labels(m)) {
    tol_ = 1e-10 * mesh_scale(m.domain);
    for (const auto& tri : mesh_.triangles) {
        Vec2 lo = mesh_.vertices[tri[0]], hi = lo;
        for (int v : tri) {
            lo = {std::min(lo.x, mesh_.vertices[v].x), std::min(lo.y, mesh_.vertices[v].y)};
            hi = {std::max(hi.x, mesh_.vertices[v].x), std::max(hi.y, mesh_.vertices[v].y)};
        }
        lo_.push_back(lo);
        hi_.push_back(hi);
    }
}

std::optional<std::size_t> MeshEvaluator::locate(Vec2 p) const {
    std::optional<std::size_t> best;
    double best_slack = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
        if (p.x < lo_[t].x - tol_ || p.x > hi_[t].x + tol_ || p.y < lo_[t].y - tol_ || p.y > hi_[t].y + tol_) continue;
        const auto& tri = mesh_.triangles[t];
        const Vec2 a = mesh_.vertices[tri[0]], b = mesh_.vertices[tri[1]], c = mesh_.vertices[tri[2]];
        const double area = signed_area(a, b, c);
        const double orient = area > 0.0 ? 1.0 : -1.0;
        // smallest scaled edge distance; positive inside
        const double s = std::min({orient * cross(b - a, p - a) / norm(b - a), orient * cross(c - b, p - b) / norm(c - b),
                                   orient * cross(a - c, p - c) / norm(a - c)});
        if (s >= -tol_ && s > best_slack) {
            best_slack = s;
            best = t;
            if (s > 0.0) break;
        }
    }
    return best;
}

double MeshEvaluator::operator()(Vec2 p) const {
    const auto t = locate(p);
    if (!t) throw ValidationError("point outside the mesh");
    const auto& tri = mesh_.triangles[*t];
    const Vec2 a = mesh_.vertices[tri[0]];
    const Label l = labels_[*t];
    return mesh_.heights[tri[0]] + l.w * (p.x - a.x) + l.z * (p.y - a.y);
}

}  // namespace chiral
