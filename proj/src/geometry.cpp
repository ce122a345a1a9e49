#include "geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mems {

namespace {

using I128 = __int128;

I128 cross(const Vec2& o, const Vec2& a, const Vec2& b) {
    return static_cast<I128>(a.x - o.x) * (b.y - o.y) -
           static_cast<I128>(a.y - o.y) * (b.x - o.x);
}

int sign(I128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

bool on_segment(const Vec2& p, const Vec2& q, const Vec2& r) {
    // r collinear with pq assumed; true if r within the bounding box of pq
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
}

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    int o1 = sign(cross(a, b, c));
    int o2 = sign(cross(a, b, d));
    int o3 = sign(cross(c, d, a));
    int o4 = sign(cross(c, d, b));
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

}  // namespace

__int128 Polygon::twice_signed_area() const {
    I128 acc = 0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices[i];
        const Vec2& q = vertices[(i + 1) % n];
        acc += static_cast<I128>(p.x) * q.y - static_cast<I128>(q.x) * p.y;
    }
    return acc;
}

bool Polygon::is_rectilinear() const {
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices[i];
        const Vec2& q = vertices[(i + 1) % n];
        if (p.x != q.x && p.y != q.y) return false;
    }
    return true;
}

bool Polygon::is_simple() const {
    const std::size_t n = vertices.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        if (a == b) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2& c = vertices[j];
            const Vec2& d = vertices[(j + 1) % n];
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // shared endpoint only; collinear backtracking is not simple
                const Vec2& shared = (j == i + 1) ? b : a;
                const Vec2& e1 = (j == i + 1) ? a : b;
                const Vec2& e2 = (j == i + 1) ? d : c;
                if (sign(cross(shared, e1, e2)) == 0 &&
                    (static_cast<I128>(e1.x - shared.x) * (e2.x - shared.x) +
                     static_cast<I128>(e1.y - shared.y) * (e2.y - shared.y)) > 0)
                    return false;
            } else {
                if (segments_touch(a, b, c, d)) return false;
            }
        }
    }
    return true;
}

BBox Polygon::bounding_box() const {
    if (vertices.empty()) return {};
    BBox b{vertices[0].x, vertices[0].y, vertices[0].x, vertices[0].y};
    for (const Vec2& v : vertices) {
        b.x0 = std::min(b.x0, v.x);
        b.y0 = std::min(b.y0, v.y);
        b.x1 = std::max(b.x1, v.x);
        b.y1 = std::max(b.y1, v.y);
    }
    return b;
}

std::optional<BBox> Polygon::as_rect() const {
    Polygon n = normalize_polygon(*this);
    if (n.vertices.size() != 4) return std::nullopt;
    if (!n.is_rectilinear()) return std::nullopt;
    return n.bounding_box();
}

Polygon make_rect(Coord x0, Coord y0, Coord x1, Coord y1) {
    if (x1 <= x0 || y1 <= y0) throw SemanticError("degenerate rectangle");
    return Polygon{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

Polygon normalize_polygon(const Polygon& p) {
    std::vector<Vec2> v = p.vertices;

    auto drop_duplicates = [&]() {
        std::vector<Vec2> out;
        out.reserve(v.size());
        for (const Vec2& q : v) {
            if (out.empty() || out.back() != q) out.push_back(q);
        }
        while (out.size() > 1 && out.front() == out.back()) out.pop_back();
        v = std::move(out);
    };

    drop_duplicates();
    if (v.size() < 3) throw SemanticError("degenerate polygon");

    Polygon tmp{v};
    I128 area2 = tmp.twice_signed_area();
    if (area2 == 0) throw SemanticError("degenerate polygon (zero area)");
    if (area2 < 0) std::reverse(v.begin(), v.end());

    // merge collinear runs until stable
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Vec2> out;
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& prev = v[(i + n - 1) % n];
            const Vec2& cur = v[i];
            const Vec2& next = v[(i + 1) % n];
            if (cross(prev, cur, next) == 0) {
                changed = true;
            } else {
                out.push_back(cur);
            }
        }
        v = std::move(out);
        drop_duplicates();
        if (v.size() < 3) throw SemanticError("degenerate polygon");
    }

    auto min_it = std::min_element(v.begin(), v.end());
    std::rotate(v.begin(), min_it, v.end());
    return Polygon{std::move(v)};
}

bool polygon_less(const Polygon& a, const Polygon& b) {
    return a.vertices < b.vertices;
}

bool polygon_set_equal(std::vector<Polygon> a, std::vector<Polygon> b) {
    if (a.size() != b.size()) return false;
    for (Polygon& p : a) p = normalize_polygon(p);
    for (Polygon& p : b) p = normalize_polygon(p);
    std::sort(a.begin(), a.end(), polygon_less);
    std::sort(b.begin(), b.end(), polygon_less);
    return a == b;
}

// ---------------------------------------------------------------------------
// Process stack

const ProcessLayer* ProcessStack::find_layer(const std::string& mask) const {
    for (const ProcessLayer& l : layers)
        if (l.mask == mask) return &l;
    return nullptr;
}

const ProcessLayer& ProcessStack::layer_or_throw(const std::string& mask) const {
    const ProcessLayer* l = find_layer(mask);
    if (!l) throw SemanticError("unknown layer '" + mask + "' in stack '" + name + "'");
    return *l;
}

const Material* ProcessStack::find_material(const std::string& mname) const {
    for (const Material& m : materials)
        if (m.name == mname) return &m;
    return nullptr;
}

void ProcessStack::check() const {
    Coord prev_z0 = 0;
    bool first = true;
    for (const ProcessLayer& l : layers) {
        if (l.mask.empty()) throw SemanticError("stack layer with empty mask name");
        if (l.thickness <= 0)
            throw SemanticError("layer '" + l.mask + "' has non-positive thickness");
        if (!first && l.z0 < prev_z0)
            throw SemanticError("stack layers not sorted by z0 at '" + l.mask + "'");
        for (const ProcessLayer& o : layers)
            if (&o != &l && o.mask == l.mask)
                throw SemanticError("duplicate mask name '" + l.mask + "'");
        prev_z0 = l.z0;
        first = false;
    }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

// splits "key=value", throws with line context on malformed input
std::pair<std::string, std::string> split_kv(const std::string& tok, int lineno) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ParseError("line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

}  // namespace

ProcessStack parse_stack(const std::string& text) {
    ProcessStack stack;
    bool have_name = false;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = split_ws(strip_comment(line));
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "stack") {
            if (toks.size() != 2)
                throw ParseError("line " + std::to_string(lineno) + ": expected 'stack <name>'");
            stack.name = toks[1];
            have_name = true;
        } else if (head == "material") {
            if (toks.size() != 5)
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected 'material <name> E=<v> nu=<v> rho=<v>'");
            Material m;
            m.name = toks[1];
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], lineno);
                if (k == "E") m.youngs_modulus = parse_double(v, "E");
                else if (k == "nu") m.poisson_ratio = parse_double(v, "nu");
                else if (k == "rho") m.density = parse_double(v, "rho");
                else throw ParseError("line " + std::to_string(lineno) + ": unknown material key '" + k + "'");
            }
            if (m.youngs_modulus <= 0 || m.density <= 0 || m.poisson_ratio < 0 || m.poisson_ratio >= 0.5)
                throw ParseError("line " + std::to_string(lineno) + ": material '" + m.name +
                                 "' violates E>0, rho>0, 0<=nu<0.5");
            stack.materials.push_back(std::move(m));
        } else if (head == "layer") {
            if (toks.size() != 5)
                throw ParseError("line " + std::to_string(lineno) +
                                 ": expected 'layer <mask> z0=<len> t=<len> material=<name>'");
            ProcessLayer l;
            l.mask = toks[1];
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto [k, v] = split_kv(toks[i], lineno);
                if (k == "z0") l.z0 = parse_length_nm(v);
                else if (k == "t") l.thickness = parse_length_nm(v);
                else if (k == "material") l.material = v;
                else throw ParseError("line " + std::to_string(lineno) + ": unknown layer key '" + k + "'");
            }
            stack.layers.push_back(std::move(l));
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown stack directive '" + head + "'");
        }
    }
    if (!have_name) throw ParseError("stack file missing 'stack <name>' line");
    try {
        stack.check();
    } catch (const Error& e) {
        throw ParseError(std::string("invalid stack: ") + e.what());
    }
    return stack;
}

std::string emit_stack(const ProcessStack& stack) {
    std::string out = "stack " + stack.name + "\n";
    for (const Material& m : stack.materials)
        out += "material " + m.name + " E=" + format_double(m.youngs_modulus) +
               " nu=" + format_double(m.poisson_ratio) + " rho=" + format_double(m.density) + "\n";
    for (const ProcessLayer& l : stack.layers)
        out += "layer " + l.mask + " z0=" + format_um(l.z0) + " t=" + format_um(l.thickness) +
               " material=" + l.material + "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Layout

std::size_t Layout::shape_count() const {
    std::size_t n = 0;
    for (const auto& [layer, polys] : shapes) n += polys.size();
    return n;
}

void Layout::insert(const std::string& layer, Polygon p) {
    shapes[layer].push_back(std::move(p));
}

Layout canonical_layout(const Layout& l) {
    Layout out;
    out.cell_id = l.cell_id;
    for (const auto& [layer, polys] : l.shapes) {
        if (polys.empty()) continue;
        std::vector<Polygon> normed;
        normed.reserve(polys.size());
        for (const Polygon& p : polys) normed.push_back(normalize_polygon(p));
        std::sort(normed.begin(), normed.end(), polygon_less);
        out.shapes.emplace(layer, std::move(normed));
    }
    return out;
}

bool layout_equal(const Layout& a, const Layout& b) {
    Layout ca = canonical_layout(a);
    Layout cb = canonical_layout(b);
    return ca.cell_id == cb.cell_id && ca.shapes == cb.shapes;
}

// ---------------------------------------------------------------------------
// Solid model

SolidModel canonical_solid(const SolidModel& s) {
    SolidModel out;
    out.name = s.name;
    out.stack_ref = s.stack_ref;
    out.prisms.reserve(s.prisms.size());
    for (const Prism& pr : s.prisms)
        out.prisms.push_back(Prism{pr.layer, pr.z0, pr.z1, normalize_polygon(pr.footprint)});
    std::sort(out.prisms.begin(), out.prisms.end(), [](const Prism& a, const Prism& b) {
        if (a.layer != b.layer) return a.layer < b.layer;
        if (a.z0 != b.z0) return a.z0 < b.z0;
        if (a.z1 != b.z1) return a.z1 < b.z1;
        return polygon_less(a.footprint, b.footprint);
    });
    return out;
}

bool solid_equal(const SolidModel& a, const SolidModel& b) {
    SolidModel ca = canonical_solid(a);
    SolidModel cb = canonical_solid(b);
    return ca.name == cb.name && ca.stack_ref == cb.stack_ref && ca.prisms == cb.prisms;
}

Prism extrude_polygon(const Polygon& p, const std::string& layer, const ProcessStack& stack) {
    const ProcessLayer& l = stack.layer_or_throw(layer);
    return Prism{layer, l.z0, l.z0 + l.thickness, normalize_polygon(p)};
}

std::pair<std::string, Polygon> project_prism(const Prism& pr) {
    if (pr.z1 <= pr.z0) throw SemanticError("prism with empty z-interval");
    return {pr.layer, pr.footprint};
}

void check_prism_against_stack(const Prism& pr, const ProcessStack& stack, std::size_t index) {
    const ProcessLayer* l = stack.find_layer(pr.layer);
    if (!l || pr.z0 != l->z0 || pr.z1 != l->z0 + l->thickness)
        throw SemanticError("prism " + std::to_string(index) + " (layer '" + pr.layer +
                            "', z [" + std::to_string(pr.z0) + ", " + std::to_string(pr.z1) +
                            "] nm) does not match any layer of stack '" + stack.name + "'");
}

// ---------------------------------------------------------------------------
// CIF

namespace {

struct CifStatement {
    std::vector<std::string> tokens;
};

// statements are ';'-terminated; 'E' ends the file without one
std::vector<CifStatement> cif_statements(const std::string& text) {
    std::string cleaned;
    cleaned.reserve(text.size());
    bool in_comment = false;
    for (char ch : text) {
        if (in_comment) {
            if (ch == ')') in_comment = false;
        } else if (ch == '(') {
            in_comment = true;
        } else {
            cleaned.push_back(ch);
        }
    }
    if (in_comment) throw ParseError("unterminated CIF comment");

    std::vector<CifStatement> out;
    std::string cur;
    for (char ch : cleaned) {
        if (ch == ';') {
            auto toks = split_ws(cur);
            if (!toks.empty()) out.push_back({std::move(toks)});
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    auto toks = split_ws(cur);
    if (!toks.empty()) out.push_back({std::move(toks)});
    return out;
}

long long cif_int(const std::string& tok) {
    return parse_int(tok, "CIF coordinate");
}

// applies the DS scale a/b and the 10 nm CIF unit, exactly
Coord cif_to_nm(long long value, long long a, long long b) {
    I128 num = static_cast<I128>(value) * 10 * a;
    if (num % b != 0) throw ParseError("non-integer coordinate after DS scaling");
    I128 nm = num / b;
    return static_cast<Coord>(nm);
}

// center/extent box corner in nm: (2*c - e) * 10 * a / (2*b)
Coord cif_box_corner(long long c2_minus_e, long long a, long long b) {
    I128 num = static_cast<I128>(c2_minus_e) * 10 * a;
    if (num % (2 * b) != 0) throw ParseError("non-integer coordinate after DS scaling");
    return static_cast<Coord>(num / (2 * b));
}

}  // namespace

Layout parse_cif(const std::string& text, std::vector<std::string>* warnings) {
    auto statements = cif_statements(text);
    Layout layout;
    bool in_symbol = false;
    bool symbol_done = false;
    bool called = false;
    bool ended = false;
    long long ds_id = 0, scale_a = 1, scale_b = 1;
    std::string current_layer;

    for (const CifStatement& st : statements) {
        if (ended) throw ParseError("content after E command");
        const std::string& cmd = st.tokens[0];
        if (cmd == "DS") {
            if (in_symbol || symbol_done) throw ParseError("nested or repeated symbol definition");
            if (st.tokens.size() != 4) throw ParseError("DS expects 'DS id a b'");
            ds_id = cif_int(st.tokens[1]);
            scale_a = cif_int(st.tokens[2]);
            scale_b = cif_int(st.tokens[3]);
            if (ds_id <= 0 || scale_a <= 0 || scale_b <= 0)
                throw ParseError("DS id and scale factors must be positive");
            in_symbol = true;
            layout.cell_id = static_cast<int>(ds_id);
        } else if (cmd == "DF") {
            if (!in_symbol) throw ParseError("DF outside symbol definition");
            if (st.tokens.size() != 1) throw ParseError("DF takes no arguments");
            in_symbol = false;
            symbol_done = true;
        } else if (cmd == "L") {
            if (!in_symbol) throw ParseError("L outside symbol definition");
            if (st.tokens.size() != 2) throw ParseError("L expects a single layer name");
            current_layer = st.tokens[1];
        } else if (cmd == "B") {
            if (!in_symbol) throw ParseError("shape outside symbol definition");
            if (current_layer.empty()) throw ParseError("B before any L layer selection");
            if (st.tokens.size() != 5)
                throw ParseError("B expects 'B length width cx cy' (no direction support)");
            long long len = cif_int(st.tokens[1]);
            long long wid = cif_int(st.tokens[2]);
            long long cx = cif_int(st.tokens[3]);
            long long cy = cif_int(st.tokens[4]);
            if (len <= 0 || wid <= 0) throw ParseError("B with non-positive extent");
            Coord x0 = cif_box_corner(2 * cx - len, scale_a, scale_b);
            Coord x1 = cif_box_corner(2 * cx + len, scale_a, scale_b);
            Coord y0 = cif_box_corner(2 * cy - wid, scale_a, scale_b);
            Coord y1 = cif_box_corner(2 * cy + wid, scale_a, scale_b);
            layout.insert(current_layer, make_rect(x0, y0, x1, y1));
        } else if (cmd == "P") {
            if (!in_symbol) throw ParseError("shape outside symbol definition");
            if (current_layer.empty()) throw ParseError("P before any L layer selection");
            if (st.tokens.size() < 7 || (st.tokens.size() - 1) % 2 != 0)
                throw ParseError("P expects at least three x y pairs");
            Polygon p;
            for (std::size_t i = 1; i + 1 < st.tokens.size(); i += 2) {
                Coord x = cif_to_nm(cif_int(st.tokens[i]), scale_a, scale_b);
                Coord y = cif_to_nm(cif_int(st.tokens[i + 1]), scale_a, scale_b);
                p.vertices.push_back({x, y});
            }
            if (!p.is_simple()) throw ParseError("P polygon is self-intersecting or degenerate");
            layout.insert(current_layer, std::move(p));
        } else if (cmd == "C") {
            if (in_symbol) throw ParseError("C inside symbol definition");
            if (!symbol_done) throw ParseError("C before any symbol definition");
            if (st.tokens.size() != 2) throw ParseError("C expects a symbol id (no transformations)");
            if (cif_int(st.tokens[1]) != ds_id) throw ParseError("C references unknown symbol");
            called = true;
        } else if (cmd == "E") {
            if (in_symbol) throw ParseError("unterminated symbol definition");
            if (st.tokens.size() != 1) throw ParseError("E takes no arguments");
            ended = true;
        } else if (!cmd.empty() && cmd[0] >= '0' && cmd[0] <= '9') {
            if (warnings)
                warnings->push_back("ignored CIF extension command '" + cmd + "'");
        } else {
            throw ParseError("unsupported CIF command '" + cmd + "'");
        }
    }
    if (in_symbol) throw ParseError("unterminated symbol definition");
    if (!symbol_done) throw ParseError("CIF file contains no symbol definition");
    if (!called || !ended) throw ParseError("CIF file missing C call or E terminator");
    return layout;
}

namespace {

Coord to_centimicrons(Coord nm) {
    if (nm % 10 != 0)
        throw SemanticError("coordinate " + std::to_string(nm) +
                            " nm is not on the 10 nm CIF grid");
    return nm / 10;
}

}  // namespace

std::string emit_cif(const Layout& l) {
    Layout c = canonical_layout(l);
    if (c.cell_id <= 0) throw SemanticError("layout cell id must be positive for CIF");
    std::string id = std::to_string(c.cell_id);
    std::string out = "DS " + id + " 1 1;\n";
    for (const auto& [layer, polys] : c.shapes) {
        out += "L " + layer + ";\n";
        for (const Polygon& p : polys) {
            auto rect = p.as_rect();
            bool boxed = false;
            if (rect) {
                Coord len = to_centimicrons(rect->width());
                Coord wid = to_centimicrons(rect->height());
                Coord sx = rect->x0 + rect->x1;
                Coord sy = rect->y0 + rect->y1;
                if (sx % 20 == 0 && sy % 20 == 0) {
                    out += "B " + std::to_string(len) + " " + std::to_string(wid) + " " +
                           std::to_string(sx / 20) + " " + std::to_string(sy / 20) + ";\n";
                    boxed = true;
                }
            }
            if (!boxed) {
                out += "P";
                for (const Vec2& v : p.vertices)
                    out += " " + std::to_string(to_centimicrons(v.x)) + " " +
                           std::to_string(to_centimicrons(v.y));
                out += ";\n";
            }
        }
    }
    out += "DF;\nC " + id + ";\nE\n";
    return out;
}

// ---------------------------------------------------------------------------
// ESM

SolidModel parse_esm(const std::string& text) {
    SolidModel solid;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool have_header = false;
    bool have_stack = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::string body = strip_comment(line);
        auto first = body.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        body = body.substr(first);
        while (!body.empty() && (body.back() == ' ' || body.back() == '\t' || body.back() == '\r'))
            body.pop_back();

        if (!have_header) {
            if (body != "esm 1")
                throw ParseError("line " + std::to_string(lineno) + ": bad ESM header (expected 'esm 1')");
            have_header = true;
            continue;
        }
        auto toks = split_ws(body);
        if (toks[0] == "stack") {
            if (have_stack || toks.size() != 2)
                throw ParseError("line " + std::to_string(lineno) + ": expected single 'stack <name>' line");
            solid.stack_ref = toks[1];
            have_stack = true;
        } else if (toks[0] == "prism") {
            if (!have_stack)
                throw ParseError("line " + std::to_string(lineno) + ": prism before stack line");
            auto poly_pos = body.find("poly=(");
            auto close = body.rfind(')');
            if (poly_pos == std::string::npos || close == std::string::npos || close < poly_pos)
                throw ParseError("line " + std::to_string(lineno) + ": prism missing poly=(...)");
            Prism pr;
            bool have_layer = false, have_z0 = false, have_z1 = false;
            for (const std::string& tok : split_ws(body.substr(5, poly_pos - 5))) {
                auto [k, v] = split_kv(tok, lineno);
                if (k == "layer") { pr.layer = v; have_layer = true; }
                else if (k == "z0") { pr.z0 = parse_int(v, "z0"); have_z0 = true; }
                else if (k == "z1") { pr.z1 = parse_int(v, "z1"); have_z1 = true; }
                else throw ParseError("line " + std::to_string(lineno) + ": unknown prism key '" + k + "'");
            }
            if (!have_layer || !have_z0 || !have_z1)
                throw ParseError("line " + std::to_string(lineno) + ": prism needs layer, z0 and z1");
            if (pr.z1 <= pr.z0)
                throw ParseError("line " + std::to_string(lineno) + ": prism with z1 <= z0");
            std::string coords = body.substr(poly_pos + 6, close - poly_pos - 6);
            for (const std::string& pair : split_ws(coords)) {
                auto comma = pair.find(',');
                if (comma == std::string::npos)
                    throw ParseError("line " + std::to_string(lineno) + ": bad vertex '" + pair + "'");
                pr.footprint.vertices.push_back(
                    {parse_int(pair.substr(0, comma), "x"), parse_int(pair.substr(comma + 1), "y")});
            }
            if (pr.footprint.vertices.size() < 3 || !pr.footprint.is_simple())
                throw ParseError("line " + std::to_string(lineno) + ": malformed polygon");
            solid.prisms.push_back(std::move(pr));
        } else {
            throw ParseError("line " + std::to_string(lineno) + ": unknown ESM directive '" + toks[0] + "'");
        }
    }
    if (!have_header) throw ParseError("bad ESM header (empty file)");
    if (!have_stack) throw ParseError("ESM file missing stack line");
    return solid;
}

std::string emit_esm(const SolidModel& s) {
    SolidModel c = canonical_solid(s);
    std::string out = "esm 1\n";
    out += "stack " + c.stack_ref + "\n";
    for (const Prism& pr : c.prisms) {
        out += "prism layer=" + pr.layer + " z0=" + std::to_string(pr.z0) +
               " z1=" + std::to_string(pr.z1) + " poly=(";
        bool first = true;
        for (const Vec2& v : pr.footprint.vertices) {
            if (!first) out += " ";
            out += std::to_string(v.x) + "," + std::to_string(v.y);
            first = false;
        }
        out += ")\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// File helpers

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError(path);
    std::ostringstream ss;
    ss << f.rdbuf();
    if (f.bad()) throw IoError(path);
    return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError(path);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f.good()) throw IoError(path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError(path);
    }
}

}  // namespace mems
