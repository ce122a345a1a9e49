#include "netlist.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace mems {

const char* kind_name(ComponentKind k) {
    switch (k) {
        case ComponentKind::Beam: return "beam";
        case ComponentKind::RigidMass: return "mass";
        case ComponentKind::LinearComb: return "lincomb";
        case ComponentKind::BiasComb: return "biascomb";
        case ComponentKind::Anchor: return "anchor";
    }
    return "?";
}

bool is_comb(ComponentKind k) {
    return k == ComponentKind::LinearComb || k == ComponentKind::BiasComb;
}

const char* orient_name(CombOrient o) {
    switch (o) {
        case CombOrient::PlusX: return "+x";
        case CombOrient::MinusX: return "-x";
        case CombOrient::PlusY: return "+y";
        case CombOrient::MinusY: return "-y";
    }
    return "?";
}

const Material* Netlist::find_material(const std::string& name) const {
    for (const Material& m : materials)
        if (m.name == name) return &m;
    return nullptr;
}

std::size_t Netlist::count_kind(ComponentKind k) const {
    std::size_t n = 0;
    for (const ComponentInstance& c : instances)
        if (c.kind == k) ++n;
    return n;
}

namespace {

struct LineCtx {
    int lineno;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(lineno) + ": " + msg);
    }
};

std::vector<std::string> tokenize(const std::string& line) {
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

// "(a,b,c)" -> {"a","b","c"}; "()" -> {}
std::vector<std::string> parse_list(const std::string& v, const LineCtx& ctx) {
    if (v.size() < 2 || v.front() != '(' || v.back() != ')')
        ctx.fail("expected parenthesized list, got '" + v + "'");
    std::vector<std::string> out;
    std::string body = v.substr(1, v.size() - 2);
    if (body.empty()) return out;
    std::size_t start = 0;
    while (true) {
        auto comma = body.find(',', start);
        std::string item = body.substr(start, comma == std::string::npos ? comma : comma - start);
        if (item.empty()) ctx.fail("empty element in list '" + v + "'");
        out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

CombOrient parse_orient(const std::string& v, const LineCtx& ctx) {
    if (v == "+x") return CombOrient::PlusX;
    if (v == "-x") return CombOrient::MinusX;
    if (v == "+y") return CombOrient::PlusY;
    if (v == "-y") return CombOrient::MinusY;
    ctx.fail("bad orient '" + v + "' (want +x, -x, +y or -y)");
}

struct ParamSpec {
    const char* key;
    enum { Length, Int, Orient, LayerName } type;
};

// fixed schema order per kind; serialization uses the same order
const std::vector<ParamSpec>& schema_for(ComponentKind k) {
    static const std::vector<ParamSpec> beam = {{"l", ParamSpec::Length}, {"w", ParamSpec::Length}};
    static const std::vector<ParamSpec> mass = {{"w", ParamSpec::Length}, {"h", ParamSpec::Length}};
    static const std::vector<ParamSpec> comb = {
        {"fingers", ParamSpec::Int},   {"fl", ParamSpec::Length}, {"fw", ParamSpec::Length},
        {"gap", ParamSpec::Length},    {"overlap", ParamSpec::Length},
        {"orient", ParamSpec::Orient}};
    static const std::vector<ParamSpec> anchor = {
        {"w", ParamSpec::Length}, {"h", ParamSpec::Length}, {"anchor_layer", ParamSpec::LayerName}};
    switch (k) {
        case ComponentKind::Beam: return beam;
        case ComponentKind::RigidMass: return mass;
        case ComponentKind::LinearComb:
        case ComponentKind::BiasComb: return comb;
        case ComponentKind::Anchor: return anchor;
    }
    return beam;
}

Coord* length_slot(ComponentInstance& c, const std::string& key) {
    if (key == "l") return &c.l;
    if (key == "w") return &c.w;
    if (key == "h") return &c.h;
    if (key == "fl") return &c.fl;
    if (key == "fw") return &c.fw;
    if (key == "gap") return &c.gap;
    if (key == "overlap") return &c.overlap;
    return nullptr;
}

Coord length_value(const ComponentInstance& c, const std::string& key) {
    return *length_slot(const_cast<ComponentInstance&>(c), key);
}

}  // namespace

Netlist parse_netlist(const std::string& text) {
    Netlist n;
    std::set<std::string> names;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        LineCtx ctx{lineno};
        auto toks = tokenize(strip_comment(line));
        if (toks.empty()) continue;
        const std::string& head = toks[0];

        if (head == "process") {
            if (toks.size() != 2 || toks[1].size() < 2 || toks[1].front() != '"' || toks[1].back() != '"')
                ctx.fail("expected 'process \"<name>\"'");
            n.process_ref = toks[1].substr(1, toks[1].size() - 2);
            continue;
        }
        if (head == "material") {
            if (toks.size() != 5) ctx.fail("expected 'material <name> E=<v> nu=<v> rho=<v>'");
            Material m;
            m.name = toks[1];
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) ctx.fail("expected key=value, got '" + toks[i] + "'");
                std::string k = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
                if (k == "E") m.youngs_modulus = parse_double(v, "E");
                else if (k == "nu") m.poisson_ratio = parse_double(v, "nu");
                else if (k == "rho") m.density = parse_double(v, "rho");
                else ctx.fail("unknown material key '" + k + "'");
            }
            n.materials.push_back(std::move(m));
            continue;
        }

        ComponentKind kind;
        if (head == "beam") kind = ComponentKind::Beam;
        else if (head == "mass") kind = ComponentKind::RigidMass;
        else if (head == "lincomb") kind = ComponentKind::LinearComb;
        else if (head == "biascomb") kind = ComponentKind::BiasComb;
        else if (head == "anchor") kind = ComponentKind::Anchor;
        else ctx.fail("unknown component kind '" + head + "'");

        if (toks.size() < 2) ctx.fail("missing instance name after '" + head + "'");
        ComponentInstance c;
        c.kind = kind;
        c.name = toks[1];
        if (!names.insert(c.name).second) ctx.fail("duplicate instance name '" + c.name + "'");

        std::map<std::string, std::string> kv;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            auto eq = toks[i].find('=');
            if (eq == std::string::npos || eq == 0)
                ctx.fail("expected key=value, got '" + toks[i] + "'");
            std::string k = toks[i].substr(0, eq);
            if (!kv.emplace(k, toks[i].substr(eq + 1)).second)
                ctx.fail("duplicate key '" + k + "'");
        }
        auto take = [&](const std::string& key) -> std::string {
            auto it = kv.find(key);
            if (it == kv.end()) ctx.fail("missing required parameter '" + key + "'");
            std::string v = it->second;
            kv.erase(it);
            return v;
        };

        for (const ParamSpec& ps : schema_for(kind)) {
            std::string v = take(ps.key);
            switch (ps.type) {
                case ParamSpec::Length: *length_slot(c, ps.key) = parse_length_nm(v); break;
                case ParamSpec::Int: c.fingers = static_cast<int>(parse_int(v, ps.key)); break;
                case ParamSpec::Orient: c.orient = parse_orient(v, ctx); break;
                case ParamSpec::LayerName: c.anchor_layer = v; break;
            }
        }
        c.nodes = parse_list(take("node"), ctx);
        auto pos = parse_list(take("pos"), ctx);
        if (pos.size() != 2) ctx.fail("pos expects (x,y)");
        c.position = {parse_length_nm(pos[0]), parse_length_nm(pos[1])};
        c.layer = take("layer");
        if (auto it = kv.find("angle"); it != kv.end()) {
            c.angle_deg = parse_double(it->second, "angle");
            kv.erase(it);
        }
        if (!kv.empty()) ctx.fail("unknown parameter '" + kv.begin()->first + "' for " + head);

        if (kind == ComponentKind::Beam && c.nodes.size() != 2)
            ctx.fail("beam '" + c.name + "' needs exactly 2 nodes");
        if ((kind == ComponentKind::RigidMass || kind == ComponentKind::Anchor) && c.nodes.empty())
            ctx.fail(std::string(kind_name(kind)) + " '" + c.name + "' needs at least 1 node");

        n.instances.push_back(std::move(c));
    }
    return n;
}

std::string serialize_netlist(const Netlist& n) {
    std::string out = "process \"" + n.process_ref + "\"\n";
    for (const Material& m : n.materials)
        out += "material " + m.name + " E=" + format_double(m.youngs_modulus) +
               " nu=" + format_double(m.poisson_ratio) + " rho=" + format_double(m.density) + "\n";
    for (const ComponentInstance& c : n.instances) {
        out += std::string(kind_name(c.kind)) + " " + c.name;
        out += " node=(";
        for (std::size_t i = 0; i < c.nodes.size(); ++i) {
            if (i) out += ",";
            out += c.nodes[i];
        }
        out += ")";
        for (const ParamSpec& ps : schema_for(c.kind)) {
            out += " " + std::string(ps.key) + "=";
            switch (ps.type) {
                case ParamSpec::Length: out += format_um(length_value(c, ps.key)); break;
                case ParamSpec::Int: out += std::to_string(c.fingers); break;
                case ParamSpec::Orient: out += orient_name(c.orient); break;
                case ParamSpec::LayerName: out += c.anchor_layer; break;
            }
        }
        out += " pos=(" + format_um(c.position.x) + "," + format_um(c.position.y) + ")";
        out += " layer=" + c.layer;
        if (c.angle_deg != 0) out += " angle=" + format_double(c.angle_deg);
        out += "\n";
    }
    return out;
}

std::string ValidationReport::to_string() const {
    if (issues.empty()) return "ok\n";
    std::string out;
    for (const ValidationIssue& i : issues)
        out += i.code + " " + i.subject + ": " + i.message + "\n";
    return out;
}

ValidationReport validate_netlist(const Netlist& n, const ProcessStack& stack) {
    ValidationReport report;
    auto add = [&](const std::string& code, const std::string& subject, const std::string& msg) {
        report.issues.push_back({code, subject, msg});
    };

    std::map<std::string, int> node_refs;
    std::set<std::string> anchor_nodes;
    for (const ComponentInstance& c : n.instances) {
        for (const std::string& node : c.nodes) {
            ++node_refs[node];
            if (c.kind == ComponentKind::Anchor) anchor_nodes.insert(node);
        }
    }
    for (const auto& [node, refs] : node_refs)
        if (refs == 1 && !anchor_nodes.count(node))
            add("dangling_node", node, "referenced by exactly one instance");

    for (const ComponentInstance& c : n.instances) {
        if (!stack.find_layer(c.layer))
            add("unknown_layer", c.layer, "instance '" + c.name + "' uses a layer not in the stack");
        if (c.kind == ComponentKind::Anchor && !stack.find_layer(c.anchor_layer))
            add("unknown_layer", c.anchor_layer,
                "anchor '" + c.name + "' uses an anchor layer not in the stack");

        auto positive = [&](const char* key, Coord v) {
            if (v <= 0)
                add("param_range", c.name, std::string("parameter '") + key + "' must be positive");
        };
        switch (c.kind) {
            case ComponentKind::Beam:
                positive("l", c.l);
                positive("w", c.w);
                break;
            case ComponentKind::RigidMass:
            case ComponentKind::Anchor:
                positive("w", c.w);
                positive("h", c.h);
                break;
            case ComponentKind::LinearComb:
            case ComponentKind::BiasComb:
                positive("fl", c.fl);
                positive("fw", c.fw);
                positive("gap", c.gap);
                positive("overlap", c.overlap);
                if (c.fingers < 1)
                    add("param_range", c.name, "finger count must be >= 1");
                if (c.overlap > c.fl)
                    add("param_range", c.name, "overlap exceeds finger length");
                break;
        }
    }
    return report;
}

const Material& resolve_material(const ComponentInstance& c, const Netlist& n,
                                 const ProcessStack& stack) {
    const ProcessLayer& layer = stack.layer_or_throw(c.layer);
    if (const Material* m = n.find_material(layer.material)) return *m;
    if (const Material* m = stack.find_material(layer.material)) return *m;
    throw SemanticError("material '" + layer.material + "' of layer '" + layer.mask +
                        "' is defined neither in the netlist nor in the stack file");
}

}  // namespace mems
