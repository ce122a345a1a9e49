#include "sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "components.hpp"

namespace mems {

Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw ParseError("bad axis '" + s + "' (want x, y or z)");
}

double Source::value(double t) const {
    double signal = 0;
    switch (kind) {
        case Kind::Step: signal = t >= t_on ? amplitude : 0.0; break;
        case Kind::Pulse: signal = (t >= t_on && t < t_off) ? amplitude : 0.0; break;
        case Kind::Sine: signal = amplitude * std::sin(2.0 * std::acos(-1.0) * freq_hz * t + phase); break;
        case Kind::Dc: signal = amplitude; break;
    }
    return bias + signal;
}

const InputChannel* SimModel::find_channel(const std::string& target) const {
    for (const InputChannel& ch : channels)
        if (ch.target == target) return &ch;
    return nullptr;
}

const ProbeDef* SimModel::find_probe(const std::string& name) const {
    for (const ProbeDef& p : probes)
        if (p.name == name) return &p;
    return nullptr;
}

namespace {

// in-plane direction cosines of a beam axis, exact for quarter turns
std::pair<double, double> beam_direction(double angle_deg) {
    double q = angle_deg / 90.0;
    if (q == std::round(q)) {
        switch ((static_cast<int>(std::llround(q)) % 4 + 4) % 4) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    double rad = angle_deg * (std::acos(-1.0) / 180.0);
    return {std::cos(rad), std::sin(rad)};
}

double comb_axis_sign(CombOrient o, Axis axis) {
    switch (axis) {
        case Axis::X:
            if (o == CombOrient::PlusX) return 1.0;
            if (o == CombOrient::MinusX) return -1.0;
            return 0.0;
        case Axis::Y:
            if (o == CombOrient::PlusY) return 1.0;
            if (o == CombOrient::MinusY) return -1.0;
            return 0.0;
        case Axis::Z: return 0.0;
    }
    return 0.0;
}

}  // namespace

SimModel build_sim_model(const Netlist& n, const ProcessStack& stack,
                         const std::vector<MacroAttachment>& macromodels,
                         const SimOptions& opts) {
    // ownership: every node is grounded (anchor), owned by a mass, or free
    std::map<std::string, int> mass_of_node;   // node -> lumped dof
    std::set<std::string> grounded;
    std::vector<const ComponentInstance*> masses;
    for (const ComponentInstance& c : n.instances) {
        if (c.kind == ComponentKind::RigidMass) {
            int dof = static_cast<int>(masses.size());
            masses.push_back(&c);
            for (const std::string& node : c.nodes) {
                if (!mass_of_node.emplace(node, dof).second)
                    throw SemanticError("node '" + node + "' attached to two masses");
            }
        } else if (c.kind == ComponentKind::Anchor) {
            for (const std::string& node : c.nodes) grounded.insert(node);
        }
    }
    for (const auto& [node, dof] : mass_of_node)
        if (grounded.count(node))
            throw SemanticError("node '" + node + "' is both grounded and on a mass");

    // beams replaced by a macromodel: the beam subgraph reachable from the
    // attachment node without crossing a mass or ground
    std::set<const ComponentInstance*> covered;
    for (const MacroAttachment& ma : macromodels) {
        std::set<std::string> frontier{ma.node};
        bool grew = true;
        while (grew) {
            grew = false;
            for (const ComponentInstance& c : n.instances) {
                if (c.kind != ComponentKind::Beam || covered.count(&c)) continue;
                bool touches = frontier.count(c.nodes[0]) || frontier.count(c.nodes[1]);
                if (!touches) continue;
                covered.insert(&c);
                grew = true;
                for (const std::string& node : c.nodes)
                    if (!mass_of_node.count(node) && !grounded.count(node)) frontier.insert(node);
            }
        }
    }

    const int nm = static_cast<int>(masses.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nm, nm);

    SimModel model;
    for (const ComponentInstance* c : masses) {
        const Material& mat = resolve_material(*c, n, stack);
        LumpedParams lp = lumped_params(*c, mat, stack);
        M(static_cast<int>(model.dof_names.size()), static_cast<int>(model.dof_names.size())) = lp.mass;
        model.dof_names.push_back(c->name);
    }

    auto owner = [&](const std::string& node) -> int {
        // -1 ground, -2 free
        if (grounded.count(node)) return -1;
        auto it = mass_of_node.find(node);
        return it == mass_of_node.end() ? -2 : it->second;
    };

    for (const ComponentInstance& c : n.instances) {
        if (c.kind != ComponentKind::Beam || covered.count(&c)) continue;
        const Material& mat = resolve_material(c, n, stack);
        LumpedParams lp = lumped_params(c, mat, stack);
        auto [cx, sy] = beam_direction(c.angle_deg);
        double k = 0;
        switch (opts.axis) {
            case Axis::X: k = lp.k_axial * cx * cx + lp.k_lateral * sy * sy; break;
            case Axis::Y: k = lp.k_axial * sy * sy + lp.k_lateral * cx * cx; break;
            case Axis::Z: k = lp.k_out_of_plane; break;
        }
        int a = owner(c.nodes[0]);
        int b = owner(c.nodes[1]);
        if (a == -2 || b == -2)
            throw SemanticError("beam '" + c.name +
                                "' ends on a massless free node; the lumped model needs mass or "
                                "ground at every spring end");
        if (a >= 0) K(a, a) += k;
        if (b >= 0) K(b, b) += k;
        if (a >= 0 && b >= 0 && a != b) {
            K(a, b) -= k;
            K(b, a) -= k;
        }
    }

    Eigen::MatrixXd Cd = opts.alpha * M + opts.beta * K;

    // count macromodel states
    int extra = 0;
    for (const MacroAttachment& ma : macromodels) extra += static_cast<int>(ma.model.q());
    const int ns = 2 * nm + extra;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(ns, ns);
    for (int i = 0; i < nm; ++i) A(i, nm + i) = 1.0;
    if (nm > 0) {
        Eigen::LDLT<Eigen::MatrixXd> mf(M);
        if (mf.info() != Eigen::Success || !mf.isPositive())
            throw SemanticError("lumped mass matrix is singular (mass with zero mass?)");
        A.block(nm, 0, nm, nm) = -mf.solve(K);
        A.block(nm, nm, nm, nm) = -mf.solve(Cd);
    }

    // macromodel coupling: interface spring k_c between mass DOF and port
    int offset = 2 * nm;
    for (const MacroAttachment& ma : macromodels) {
        int dof = owner(ma.node);
        if (dof < 0)
            throw SemanticError("macromodel attachment node '" + ma.node +
                                "' must belong to a rigid mass (port/DOF mismatch)");
        const ReducedModel& rm = ma.model;
        if (rm.c_r.rows() != 1)
            throw SemanticError("macromodel must expose exactly one displacement output port");
        int q = static_cast<int>(rm.q());
        double k_c = ma.k_couple;
        if (k_c == 0) {
            // 1e4 x the port's static stiffness keeps the joint much stiffer
            // than the flexure without wrecking the time constant
            Eigen::VectorXd x_dc = rm.A_r.partialPivLu().solve(-rm.b_r);
            double compliance = (rm.c_r * x_dc)(0);
            if (!(compliance > 0))
                throw SemanticError("macromodel has non-positive static port compliance");
            k_c = 1e4 / compliance;
        }
        double m_i = M(dof, dof);
        // mass row: v' += (k_c/m) (c_r x_s - x_i)
        A(nm + dof, dof) += -k_c / m_i;
        A.block(nm + dof, offset, 1, q) += (k_c / m_i) * rm.c_r;
        // subsystem: x_s' = A_r x_s + b_r k_c (x_i - c_r x_s)
        A.block(offset, offset, q, q) = rm.A_r - k_c * (rm.b_r * rm.c_r);
        A.block(offset, dof, q, 1) = k_c * rm.b_r;

        ProbeDef port;
        port.type = ProbeDef::Type::Linear;
        port.name = "y@" + ma.node;
        port.row = Eigen::VectorXd::Zero(ns);
        port.row.segment(offset, q) = rm.c_r.row(0);
        model.probes.push_back(std::move(port));
        offset += q;
    }

    model.A = std::move(A);
    model.M_lumped = std::move(M);
    model.K_lumped = std::move(K);

    // force channels for every mass-owned node and for the mass itself
    std::set<std::string> made;
    auto add_force_channel = [&](const std::string& label, int dof) {
        if (!made.insert(label).second) return;
        InputChannel ch;
        ch.type = InputChannel::Type::Force;
        ch.target = "force@" + label;
        ch.g = Eigen::VectorXd::Zero(ns);
        ch.g(nm + dof) = 1.0 / model.M_lumped(dof, dof);
        model.channels.push_back(std::move(ch));
    };
    for (int i = 0; i < nm; ++i) add_force_channel(masses[static_cast<std::size_t>(i)]->name, i);
    for (const auto& [node, dof] : mass_of_node) add_force_channel(node, dof);

    // per-mass displacement and velocity probes
    for (int i = 0; i < nm; ++i) {
        ProbeDef disp;
        disp.name = "disp@" + model.dof_names[static_cast<std::size_t>(i)];
        disp.row = Eigen::VectorXd::Zero(ns);
        disp.row(i) = 1.0;
        model.probes.push_back(disp);
        ProbeDef vel;
        vel.name = "vel@" + model.dof_names[static_cast<std::size_t>(i)];
        vel.row = Eigen::VectorXd::Zero(ns);
        vel.row(nm + i) = 1.0;
        model.probes.push_back(vel);
    }

    // comb drives: electrostatic force channel plus capacitance/current probes
    for (const ComponentInstance& c : n.instances) {
        if (!is_comb(c.kind)) continue;
        const Material& mat = resolve_material(c, n, stack);
        LumpedParams lp = lumped_params(c, mat, stack);
        int dof = -2;
        for (const std::string& node : c.nodes) {
            int o = owner(node);
            if (o >= 0) { dof = o; break; }
        }
        InputChannel ch;
        ch.type = InputChannel::Type::CombVoltage;
        ch.target = "volt@" + c.name;
        ch.dcdx = lp.dcdx;
        ch.axis_sign = comb_axis_sign(c.orient, opts.axis);
        ch.g = Eigen::VectorXd::Zero(ns);
        if (dof >= 0) ch.g(nm + dof) = 1.0 / model.M_lumped(dof, dof);
        int ch_index = static_cast<int>(model.channels.size());
        model.channels.push_back(ch);

        Eigen::VectorXd disp_row = Eigen::VectorXd::Zero(ns);
        Eigen::VectorXd vel_row = Eigen::VectorXd::Zero(ns);
        if (dof >= 0) {
            disp_row(dof) = ch.axis_sign;
            vel_row(nm + dof) = ch.axis_sign;
        }
        ProbeDef cap;
        cap.type = ProbeDef::Type::Capacitance;
        cap.name = "cap@" + c.name;
        cap.row = disp_row;
        cap.c0 = lp.c_rest;
        cap.dcdx = lp.dcdx;
        model.probes.push_back(cap);
        ProbeDef cur;
        cur.type = ProbeDef::Type::Current;
        cur.name = "i@" + c.name;
        cur.row = vel_row;
        cur.dcdx = lp.dcdx;
        cur.volt_channel = ch_index;
        model.probes.push_back(cur);
    }

    return model;
}

SimModel from_state_space(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::MatrixXd& c) {
    SimModel model;
    model.A = A;
    InputChannel ch;
    ch.type = InputChannel::Type::Force;
    ch.target = "force@in";
    ch.g = b;
    model.channels.push_back(std::move(ch));
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
        ProbeDef p;
        p.name = "y" + std::to_string(r);
        p.row = c.row(r);
        model.probes.push_back(std::move(p));
    }
    return model;
}

SimModel from_state_space(const StateSpace& ss) { return from_state_space(ss.A, ss.b, ss.c); }

SimModel from_reduced(const ReducedModel& rm) {
    return from_state_space(rm.A_r, rm.b_r, rm.c_r);
}

namespace {

struct ResolvedInputs {
    // per channel, the sources feeding it
    std::vector<std::vector<const Source*>> feeds;

    double channel_value(const SimModel& model, std::size_t ch, double t) const {
        const InputChannel& c = model.channels[ch];
        double v = 0;
        for (const Source* s : feeds[ch]) v += s->value(t);
        if (c.type == InputChannel::Type::CombVoltage)
            return 0.5 * c.dcdx * v * v * c.axis_sign;
        return v;
    }

    double voltage(const SimModel& model, int ch, double t) const {
        double v = 0;
        for (const Source* s : feeds[static_cast<std::size_t>(ch)]) v += s->value(t);
        (void)model;
        return v;
    }
};

ResolvedInputs resolve_sources(const SimModel& model, const std::vector<Source>& sources) {
    ResolvedInputs ri;
    ri.feeds.resize(model.channels.size());
    for (const Source& s : sources) {
        bool found = false;
        for (std::size_t i = 0; i < model.channels.size(); ++i) {
            if (model.channels[i].target == s.target) {
                ri.feeds[i].push_back(&s);
                found = true;
                break;
            }
        }
        if (!found) throw SemanticError("source targets unknown channel '" + s.target + "'");
    }
    return ri;
}

}  // namespace

SimResult transient(const SimModel& model, const std::vector<Source>& sources, double t_end,
                    double dt, const Eigen::VectorXd* x0) {
    if (!(dt > 0) || !(t_end > 0)) throw SemanticError("transient needs dt > 0 and t_end > 0");
    ResolvedInputs inputs = resolve_sources(model, sources);

    const Eigen::Index ns = model.state_count();
    Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(ns);
    if (x.size() != ns) throw SemanticError("initial state size mismatch");

    const long n_steps = static_cast<long>(std::llround(t_end / dt));
    SimResult result;
    result.time.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (const ProbeDef& p : model.probes) result.probe_names.push_back(p.name);
    result.signals.assign(model.probes.size(), {});
    for (auto& s : result.signals) s.reserve(static_cast<std::size_t>(n_steps) + 1);

    auto record = [&](double t, const Eigen::VectorXd& state) {
        result.time.push_back(t);
        for (std::size_t pi = 0; pi < model.probes.size(); ++pi) {
            const ProbeDef& p = model.probes[pi];
            double v = p.row.dot(state);
            switch (p.type) {
                case ProbeDef::Type::Linear: break;
                case ProbeDef::Type::Capacitance: v = p.c0 + p.dcdx * v; break;
                case ProbeDef::Type::Current:
                    v = inputs.voltage(model, p.volt_channel, t) * p.dcdx * v;
                    break;
            }
            result.signals[pi].push_back(v);
        }
    };

    Eigen::VectorXd k1(ns), k2(ns), k3(ns), k4(ns), tmp(ns);
    auto deriv = [&](double t, const Eigen::VectorXd& state, Eigen::VectorXd& out) {
        out.noalias() = model.A * state;
        for (std::size_t ci = 0; ci < model.channels.size(); ++ci) {
            if (inputs.feeds[ci].empty()) continue;
            out.noalias() += inputs.channel_value(model, ci, t) * model.channels[ci].g;
        }
    };

    auto start = std::chrono::steady_clock::now();
    record(0.0, x);
    for (long step = 0; step < n_steps; ++step) {
        double t = static_cast<double>(step) * dt;
        deriv(t, x, k1);
        tmp = x + (0.5 * dt) * k1;
        deriv(t + 0.5 * dt, tmp, k2);
        tmp = x + (0.5 * dt) * k2;
        deriv(t + 0.5 * dt, tmp, k3);
        tmp = x + dt * k3;
        deriv(t + dt, tmp, k4);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double t_next = static_cast<double>(step + 1) * dt;
        if (!x.allFinite())
            throw SemanticError("transient diverged (non-finite state at t = " +
                                format_double(t_next) + " s)");
        record(t_next, x);
    }
    auto stop = std::chrono::steady_clock::now();
    result.steps = n_steps;
    result.wall_seconds = std::chrono::duration<double>(stop - start).count();
    return result;
}

std::vector<std::complex<double>> frequency_response(const SimModel& model, const Source& input,
                                                     const std::string& probe,
                                                     const std::vector<double>& freqs_hz) {
    const InputChannel* ch = model.find_channel(input.target);
    if (!ch) throw SemanticError("unknown input channel '" + input.target + "'");
    const ProbeDef* p = model.find_probe(probe);
    if (!p) throw SemanticError("unknown probe '" + probe + "'");

    Eigen::VectorXd b = ch->g;
    if (ch->type == InputChannel::Type::CombVoltage) {
        // linearized electrostatic drive about the bias point
        b *= ch->dcdx * input.bias * ch->axis_sign;
    }
    Eigen::VectorXd row = p->row;
    switch (p->type) {
        case ProbeDef::Type::Linear: break;
        case ProbeDef::Type::Capacitance: row *= p->dcdx; break;
        case ProbeDef::Type::Current: {
            if (p->volt_channel < 0) throw SemanticError("current probe without a voltage channel");
            const InputChannel& vc = model.channels[static_cast<std::size_t>(p->volt_channel)];
            double bias = (&vc == ch) ? input.bias : 0.0;
            row *= p->dcdx * bias;
            break;
        }
    }

    Eigen::MatrixXd c(1, model.state_count());
    c.row(0) = row;
    std::vector<std::complex<double>> s;
    s.reserve(freqs_hz.size());
    for (double f : freqs_hz) s.emplace_back(0.0, 2.0 * std::acos(-1.0) * f);
    std::vector<Eigen::VectorXcd> h = transfer_function(model.A, b, c, s);
    std::vector<std::complex<double>> out;
    out.reserve(h.size());
    for (const Eigen::VectorXcd& v : h) out.push_back(v(0));
    return out;
}

std::string CompareMetrics::summary() const {
    std::ostringstream os;
    for (const auto& [probe, err] : rel_l2)
        os << probe << ": rel_l2 " << format_double(err) << ", max_abs "
           << format_double(max_abs.at(probe)) << "\n";
    os << "wall_ratio " << format_double(wall_ratio) << "\n";
    return os.str();
}

CompareMetrics compare_results(const SimResult& a, const SimResult& b) {
    CompareMetrics m;
    std::set<std::string> common;
    for (const std::string& p : a.probe_names)
        if (std::find(b.probe_names.begin(), b.probe_names.end(), p) != b.probe_names.end())
            common.insert(p);
    if (common.empty()) throw SemanticError("results share no probes");

    const SimResult& coarse = a.time.size() <= b.time.size() ? a : b;
    const SimResult& fine = a.time.size() <= b.time.size() ? b : a;

    auto signal_of = [](const SimResult& r, const std::string& name) {
        for (std::size_t i = 0; i < r.probe_names.size(); ++i)
            if (r.probe_names[i] == name) return i;
        return r.probe_names.size();
    };
    auto interp = [&](const std::vector<double>& sig, double t) {
        const std::vector<double>& ft = fine.time;
        auto it = std::lower_bound(ft.begin(), ft.end(), t);
        if (it == ft.begin()) return sig.front();
        if (it == ft.end()) return sig.back();
        std::size_t hi = static_cast<std::size_t>(it - ft.begin());
        std::size_t lo = hi - 1;
        double w = (t - ft[lo]) / (ft[hi] - ft[lo]);
        return sig[lo] + w * (sig[hi] - sig[lo]);
    };

    for (const std::string& probe : common) {
        const auto& ref_sig = a.signals[signal_of(a, probe)];
        std::size_t ci = signal_of(coarse, probe);
        std::size_t fi = signal_of(fine, probe);
        double num = 0, den = 0, worst = 0;
        for (std::size_t k = 0; k < coarse.time.size(); ++k) {
            double va = coarse.signals[ci][k];
            double vb = interp(fine.signals[fi], coarse.time[k]);
            // orient the difference so `a` is always the reference
            double ra = (&coarse == &a) ? va : vb;
            double rb = (&coarse == &a) ? vb : va;
            num += (ra - rb) * (ra - rb);
            den += ra * ra;
            worst = std::max(worst, std::abs(ra - rb));
        }
        (void)ref_sig;
        m.rel_l2[probe] = den > 0 ? std::sqrt(num / den)
                                  : (num > 0 ? std::numeric_limits<double>::infinity() : 0.0);
        m.max_abs[probe] = worst;
    }
    m.wall_ratio = b.wall_seconds > 0 ? a.wall_seconds / b.wall_seconds : 1.0;
    return m;
}

std::string to_csv(const SimResult& r) {
    std::ostringstream os;
    os << "t";
    for (const std::string& p : r.probe_names) os << "," << p;
    os << "\n";
    char buf[40];
    for (std::size_t k = 0; k < r.time.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.time[k]);
        os << buf;
        for (const auto& sig : r.signals) {
            std::snprintf(buf, sizeof(buf), "%.17g", sig[k]);
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Run configuration

namespace {

std::map<std::string, std::string> parse_csv_fields(const std::string& v, int lineno) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    bool first = true;
    while (start <= v.size()) {
        auto comma = v.find(',', start);
        std::string item = v.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!item.empty()) {
            if (first) {
                out["target"] = item;
                first = false;
            } else {
                auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw ParseError("line " + std::to_string(lineno) + ": expected key=value in '" +
                                     item + "'");
                out[item.substr(0, eq)] = item.substr(eq + 1);
            }
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

Source parse_source_value(const std::string& v, int lineno) {
    auto fields = parse_csv_fields(v, lineno);
    Source s;
    if (!fields.count("target") || !fields.count("kind"))
        throw ParseError("line " + std::to_string(lineno) + ": source needs <target>,kind=<kind>");
    s.target = fields["target"];
    std::string kind = fields["kind"];
    if (kind == "step") s.kind = Source::Kind::Step;
    else if (kind == "pulse") s.kind = Source::Kind::Pulse;
    else if (kind == "sine") s.kind = Source::Kind::Sine;
    else if (kind == "dc") s.kind = Source::Kind::Dc;
    else throw ParseError("line " + std::to_string(lineno) + ": unknown source kind '" + kind + "'");
    auto num = [&](const char* key, double* slot) {
        if (fields.count(key)) *slot = parse_double(fields[key], key);
    };
    num("amp", &s.amplitude);
    num("ton", &s.t_on);
    num("toff", &s.t_off);
    num("freq", &s.freq_hz);
    num("phase", &s.phase);
    num("bias", &s.bias);
    if (s.kind == Source::Kind::Sine && !(s.freq_hz > 0))
        throw ParseError("line " + std::to_string(lineno) + ": sine source needs freq > 0");
    if (s.kind == Source::Kind::Pulse && !(s.t_off > s.t_on))
        throw ParseError("line " + std::to_string(lineno) + ": pulse source needs toff > ton");
    return s;
}

}  // namespace

SimRunConfig parse_sim_config(const std::string& text, const std::string& base_dir) {
    std::filesystem::path base(base_dir);
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    std::string netlist_path, stack_path, statespace_prefix, macromodel_prefix;
    std::vector<std::pair<std::string, std::string>> attaches;  // prefix, node[:k]
    SimOptions opts;
    SimRunConfig cfg;
    double f0 = 0, f1 = 0;
    int fpoints = 0;
    bool flog = false;

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);

        if (key == "netlist") netlist_path = resolve(value);
        else if (key == "stack") stack_path = resolve(value);
        else if (key == "statespace") statespace_prefix = resolve(value);
        else if (key == "macromodel") macromodel_prefix = resolve(value);
        else if (key == "attach") {
            auto at = value.find('@');
            if (at == std::string::npos)
                throw ParseError("line " + std::to_string(lineno) + ": attach=<prefix>@<node>");
            attaches.emplace_back(resolve(value.substr(0, at)), value.substr(at + 1));
        }
        else if (key == "axis") opts.axis = parse_axis(value);
        else if (key == "alpha") opts.alpha = parse_double(value, "alpha");
        else if (key == "beta") opts.beta = parse_double(value, "beta");
        else if (key == "dt") cfg.dt = parse_double(value, "dt");
        else if (key == "tend") cfg.t_end = parse_double(value, "tend");
        else if (key == "source") cfg.sources.push_back(parse_source_value(value, lineno));
        else if (key == "probe") cfg.probes.push_back(value);
        else if (key == "input") cfg.ac_input = value;
        else if (key == "output") cfg.ac_output = value;
        else if (key == "freq_start") f0 = parse_double(value, key);
        else if (key == "freq_stop") f1 = parse_double(value, key);
        else if (key == "freq_points") fpoints = static_cast<int>(parse_int(value, key));
        else if (key == "freq_scale") flog = (value == "log");
        else throw ParseError("line " + std::to_string(lineno) + ": unknown config key '" + key + "'");
    }

    if (!statespace_prefix.empty()) {
        SystemMatrices sys = import_system(statespace_prefix);
        cfg.model = from_state_space(to_first_order_modal(sys));
    } else if (!macromodel_prefix.empty() && netlist_path.empty()) {
        cfg.model = from_reduced(import_reduced(macromodel_prefix));
    } else if (!netlist_path.empty()) {
        if (stack_path.empty()) throw SemanticError("config needs stack= when netlist= is given");
        Netlist n = parse_netlist(read_text_file(netlist_path));
        ProcessStack stack = parse_stack(read_text_file(stack_path));
        std::vector<MacroAttachment> macros;
        if (!macromodel_prefix.empty() && attaches.empty())
            throw SemanticError("config gives macromodel= with netlist=; use attach=<prefix>@<node>");
        for (const auto& [prefix, node] : attaches)
            macros.push_back({import_reduced(prefix), node, 0});
        cfg.model = build_sim_model(n, stack, macros, opts);
    } else {
        throw SemanticError("config needs a model: netlist=, statespace= or macromodel=");
    }

    if (fpoints > 0) {
        if (!(f1 > f0) || !(f0 > 0))
            throw SemanticError("frequency sweep needs 0 < freq_start < freq_stop");
        for (int i = 0; i < fpoints; ++i) {
            double t = fpoints == 1 ? 0.0 : static_cast<double>(i) / (fpoints - 1);
            cfg.ac_freqs_hz.push_back(flog ? f0 * std::pow(f1 / f0, t) : f0 + t * (f1 - f0));
        }
    }
    return cfg;
}

namespace {

SimResult select_probes(SimResult r, const std::vector<std::string>& wanted) {
    if (wanted.empty()) return r;
    SimResult out;
    out.time = r.time;
    out.steps = r.steps;
    out.wall_seconds = r.wall_seconds;
    for (const std::string& name : wanted) {
        auto it = std::find(r.probe_names.begin(), r.probe_names.end(), name);
        if (it == r.probe_names.end()) throw SemanticError("unknown probe '" + name + "'");
        out.probe_names.push_back(name);
        out.signals.push_back(r.signals[static_cast<std::size_t>(it - r.probe_names.begin())]);
    }
    return out;
}

}  // namespace

SimResult run_transient_config(const SimRunConfig& cfg) {
    return select_probes(transient(cfg.model, cfg.sources, cfg.t_end, cfg.dt), cfg.probes);
}

std::string run_ac_config(const SimRunConfig& cfg) {
    if (cfg.ac_input.empty() || cfg.ac_output.empty() || cfg.ac_freqs_hz.empty())
        throw SemanticError("AC run needs input=, output= and a frequency sweep");
    Source in;
    in.target = cfg.ac_input;
    for (const Source& s : cfg.sources)
        if (s.target == cfg.ac_input) in = s;  // picks up the bias
    std::vector<std::complex<double>> h =
        frequency_response(cfg.model, in, cfg.ac_output, cfg.ac_freqs_hz);

    std::ostringstream os;
    os << "f," << cfg.ac_output << ".re," << cfg.ac_output << ".im," << cfg.ac_output << ".mag\n";
    char buf[40];
    for (std::size_t i = 0; i < h.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", cfg.ac_freqs_hz[i]);
        os << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", h[i].real());
        os << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", h[i].imag());
        os << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", std::abs(h[i]));
        os << "," << buf << "\n";
    }
    return os.str();
}

}  // namespace mems
