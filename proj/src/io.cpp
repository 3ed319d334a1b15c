#include "chiral/io.hpp"

#include <fstream>
#include <sstream>

#include "chiral/error.hpp"

namespace chiral {

namespace {

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw ValidationError(std::string("expected an object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing key '") + key + "'");
    return *it;
}

double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

std::size_t count(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ValidationError(std::string("'") + key + "' must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_array()) throw ValidationError(std::string("'") + key + "' must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& x : v) {
        if (!x.is_number()) throw ValidationError(std::string("'") + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Vec2 point(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ValidationError("points are [x, y] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json point(Vec2 p) { return json::array({p.x, p.y}); }

json label(Label l) { return json::array({l.w, l.z}); }

}  // namespace

json to_json(const Domain& d) {
    if (d.is_rectangle()) {
        return {{"type", "rectangle"}, {"origin", point(d.origin())}, {"width", d.width()}, {"height", d.height()}};
    }
    json v = json::array();
    for (const Vec2& p : d.polygon_vertices()) v.push_back(point(p));
    return {{"type", "polygon"}, {"vertices", v}};
}

Domain domain_from_json(const json& j) {
    const json& type = field(j, "type");
    if (type == "rectangle") return Domain::rectangle(point(field(j, "origin")), number(j, "width"), number(j, "height"));
    if (type == "polygon") {
        const json& v = field(j, "vertices");
        if (!v.is_array()) throw ValidationError("'vertices' must be an array");
        std::vector<Vec2> pts;
        for (const json& p : v) pts.push_back(point(p));
        return Domain::polygon(std::move(pts));
    }
    throw ValidationError("domain type must be 'rectangle' or 'polygon'");
}

json to_json(const ModelParams& p) {
    return {{"lambda", p.lambda()}, {"delta", p.delta()}, {"alpha", p.alpha()}, {"epsilon", p.epsilon()}};
}

ModelParams params_from_json(const json& j) { return ModelParams::make(number(j, "lambda"), number(j, "delta")); }

json to_json(const ScalarGrid& g) {
    return {{"nx", g.nx()},
            {"ny", g.ny()},
            {"spacing", g.spacing()},
            {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

ScalarGrid grid_from_json(const json& j) {
    const std::size_t nx = count(j, "nx");
    const std::size_t ny = count(j, "ny");
    std::vector<double> v = numbers(j, "values");
    if (v.size() != nx * ny) {
        throw ValidationError("grid holds " + std::to_string(v.size()) + " values, expected " +
                              std::to_string(nx * ny));
    }
    const double h = number(j, "spacing");
    if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
    return ScalarGrid(nx, ny, h, std::move(v));
}

json to_json(const SpinField& u) {
    json j = to_json(u.angles());
    j["angles"] = std::move(j["values"]);
    j.erase("values");
    return j;
}

SpinField spins_from_json(const json& j) {
    json g = j;
    if (!g.is_object() || !g.contains("angles")) throw ValidationError("missing key 'angles'");
    g["values"] = g["angles"];
    return SpinField(grid_from_json(g));
}

json to_json(const ChiralityPair& p) { return {{"delta", p.delta}, {"w", to_json(p.w)}, {"z", to_json(p.z)}}; }

ChiralityPair pair_from_json(const json& j) {
    ChiralityPair p;
    p.delta = number(j, "delta");
    p.w = grid_from_json(field(j, "w"));
    p.z = grid_from_json(field(j, "z"));
    if (p.w.nx() + 1 != p.z.nx() || p.w.ny() != p.z.ny() + 1) {
        throw ValidationError("w must be (nx-1) x ny and z nx x (ny-1)");
    }
    return p;
}

json to_json(const MeshPotential& m) {
    json v = json::array(), t = json::array();
    for (const Vec2& p : m.vertices) v.push_back(point(p));
    for (const auto& tri : m.triangles) t.push_back(json::array({tri[0], tri[1], tri[2]}));
    return {{"vertices", v}, {"triangles", t}, {"heights", m.heights}, {"domain", to_json(m.domain)}};
}

MeshPotential mesh_from_json(const json& j) {
    MeshPotential m;
    const json& v = field(j, "vertices");
    const json& t = field(j, "triangles");
    if (!v.is_array() || !t.is_array()) throw ValidationError("'vertices' and 'triangles' must be arrays");
    for (const json& p : v) m.vertices.push_back(point(p));
    for (const json& tri : t) {
        if (!tri.is_array() || tri.size() != 3) throw ValidationError("triangles are [a, b, c] index triples");
        std::array<int, 3> idx{};
        for (int k = 0; k < 3; ++k) {
            if (!tri[k].is_number_integer()) throw ValidationError("triangle indices must be integers");
            idx[k] = tri[k].get<int>();
            if (idx[k] < 0 || static_cast<std::size_t>(idx[k]) >= m.vertices.size()) {
                throw ValidationError("triangle index " + std::to_string(idx[k]) + " out of range");
            }
        }
        m.triangles.push_back(idx);
    }
    m.heights = numbers(j, "heights");
    if (m.heights.size() != m.vertices.size()) throw ValidationError("one height per vertex is required");
    m.domain = domain_from_json(field(j, "domain"));
    return m;
}

json to_json(const EnergyReport& r) {
    json j = {{"total", r.total}, {"horizontal", r.horizontal}, {"vertical", r.vertical}, {"term_count", r.term_count}};
    if (r.decomposed) {
        j["potential_part"] = r.potential_part;
        j["gradient_part"] = r.gradient_part;
    }
    return j;
}

json to_json(const JumpSegment& s) {
    return {{"p", point(s.p)},
            {"q", point(s.q)},
            {"nu", point(s.nu)},
            {"plus", label(s.plus)},
            {"minus", label(s.minus)},
            {"length", s.length},
            {"class", to_string(classify_triple(s.plus, s.minus, s.nu))}};
}

json to_json(const TotalVariations& t) {
    return {{"d1w", t.d1w}, {"d2w", t.d2w}, {"d1z", t.d1z}, {"d2z", t.d2z}};
}

json to_json(const SweepRow& r) {
    json j = {{"epsilon", r.epsilon}, {"lambda", r.lambda}, {"delta", r.delta}, {"ok", r.ok}};
    if (r.ok) {
        j["energy"] = to_json(r.energy);
        j["limit"] = r.limit;
        j["ratio"] = r.ratio;
        j["overflow_count"] = r.overflow_count;
        j["curl_residual"] = r.curl_residual;
    } else {
        j["error"] = r.error;
    }
    return j;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace chiral
