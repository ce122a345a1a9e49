#include "memsflow.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "demos.hpp"
#include "fixtures.hpp"
#include "sim.hpp"

using namespace mems;

struct mf_netlist {
    Netlist v;
};
struct mf_stack {
    ProcessStack v;
};
struct mf_layout {
    Layout v;
};
struct mf_solid {
    SolidModel v;
};

namespace {

thread_local std::string g_last_error;

mf_status status_of(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Parse: return MF_ERR_PARSE;
        case ErrorKind::Semantic: return MF_ERR_SEMANTIC;
        case ErrorKind::Io: return MF_ERR_IO;
    }
    return MF_ERR_SEMANTIC;
}

template <typename Fn>
mf_status guarded(Fn&& fn) {
    try {
        fn();
        return MF_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MF_ERR_SEMANTIC;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_out(char** out, const std::string& s) {
    if (out) *out = dup_string(s);
}

}  // namespace

extern "C" {

const char* mf_last_error(void) { return g_last_error.c_str(); }

void mf_string_free(char* s) { std::free(s); }

/* ---- netlist ---------------------------------------------------------- */

mf_status mf_netlist_read(const char* path, mf_netlist** out) {
    return guarded([&] { *out = new mf_netlist{parse_netlist(read_text_file(path))}; });
}

mf_status mf_netlist_write(const mf_netlist* n, const char* path) {
    return guarded([&] { write_text_file_atomic(path, serialize_netlist(n->v)); });
}

void mf_netlist_free(mf_netlist* n) { delete n; }

size_t mf_netlist_instance_count(const mf_netlist* n) { return n->v.instances.size(); }

size_t mf_netlist_kind_count(const mf_netlist* n, const char* kind) {
    for (ComponentKind k : {ComponentKind::Beam, ComponentKind::RigidMass,
                            ComponentKind::LinearComb, ComponentKind::BiasComb,
                            ComponentKind::Anchor})
        if (std::strcmp(kind_name(k), kind) == 0) return n->v.count_kind(k);
    return 0;
}

mf_status mf_netlist_validate(const mf_netlist* n, const mf_stack* s, char** report) {
    return guarded([&] {
        ValidationReport r = validate_netlist(n->v, s->v);
        set_out(report, r.empty() ? "" : r.to_string());
    });
}

/* ---- process stack ----------------------------------------------------- */

mf_status mf_stack_read(const char* path, mf_stack** out) {
    return guarded([&] { *out = new mf_stack{parse_stack(read_text_file(path))}; });
}

void mf_stack_free(mf_stack* s) { delete s; }

/* ---- layout and solid --------------------------------------------------- */

mf_status mf_layout_read(const char* path, mf_layout** out) {
    return guarded([&] { *out = new mf_layout{parse_cif(read_text_file(path))}; });
}

mf_status mf_layout_write(const mf_layout* l, const char* path) {
    return guarded([&] { write_text_file_atomic(path, emit_cif(l->v)); });
}

void mf_layout_free(mf_layout* l) { delete l; }

size_t mf_layout_shape_count(const mf_layout* l) { return l->v.shape_count(); }

mf_status mf_solid_read(const char* path, mf_solid** out) {
    return guarded([&] { *out = new mf_solid{parse_esm(read_text_file(path))}; });
}

mf_status mf_solid_write(const mf_solid* s, const char* path) {
    return guarded([&] { write_text_file_atomic(path, emit_esm(s->v)); });
}

void mf_solid_free(mf_solid* s) { delete s; }

size_t mf_solid_prism_count(const mf_solid* s) { return s->v.prisms.size(); }

/* ---- flows --------------------------------------------------------------- */

mf_status mf_netlist_to_layout(const mf_netlist* n, const mf_stack* s, mf_layout** out) {
    return guarded([&] {
        ValidationReport r = validate_netlist(n->v, s->v);
        if (!r.empty()) throw SemanticError("netlist not flow-ready:\n" + r.to_string());
        *out = new mf_layout{netlist_to_layout(n->v, s->v)};
    });
}

mf_status mf_netlist_to_solid(const mf_netlist* n, const mf_stack* s, mf_solid** out) {
    return guarded([&] {
        ValidationReport r = validate_netlist(n->v, s->v);
        if (!r.empty()) throw SemanticError("netlist not flow-ready:\n" + r.to_string());
        *out = new mf_solid{netlist_to_solid(n->v, s->v)};
    });
}

mf_status mf_solid_to_layout(const mf_solid* sm, const mf_stack* s, mf_layout** out) {
    return guarded([&] { *out = new mf_layout{solid_to_layout(sm->v, s->v)}; });
}

mf_status mf_layout_to_solid(const mf_layout* l, const mf_stack* s, mf_solid** out) {
    return guarded([&] { *out = new mf_solid{layout_to_solid(l->v, s->v)}; });
}

mf_status mf_extract(const mf_layout* l, const mf_stack* s, const char* rules_path,
                     mf_netlist** out, char** report) {
    return guarded([&] {
        ExtractionRules rules =
            rules_path ? parse_rules(read_text_file(rules_path)) : ExtractionRules{};
        ExtractionReport er = layout_to_netlist(l->v, s->v, rules);
        std::ostringstream os;
        os << er.summary() << "\n";
        for (const UnrecognizedShape& u : er.unrecognized)
            os << "unrecognized on " << u.layer << ": " << u.reason << "\n";
        *out = new mf_netlist{er.recognized};
        set_out(report, os.str());
    });
}

mf_status mf_verify_triangle(const mf_netlist* n, const mf_stack* s, char** report) {
    std::string text;
    mf_status st = guarded([&] {
        ValidationReport r = validate_netlist(n->v, s->v);
        if (!r.empty()) throw SemanticError("netlist not flow-ready:\n" + r.to_string());
        if (!verify_triangle(n->v, s->v, &text))
            throw SemanticError("triangle check failed:\n" + text);
    });
    set_out(report, text);
    return st;
}

/* ---- numerics pipelines ---------------------------------------------------- */

namespace {

DofRef parse_dof_spec(const std::string& spec) {
    auto c1 = spec.find(':');
    if (c1 == std::string::npos)
        throw SemanticError("DOF spec '" + spec + "' wants <node>:<dof>[:<scale>]");
    auto c2 = spec.find(':', c1 + 1);
    DofRef ref;
    ref.node = spec.substr(0, c1);
    std::string dof = spec.substr(c1 + 1, c2 == std::string::npos ? c2 : c2 - c1 - 1);
    static const char* names[6] = {"ux", "uy", "uz", "rx", "ry", "rz"};
    ref.dof = -1;
    for (int i = 0; i < 6; ++i)
        if (dof == names[i]) ref.dof = i;
    if (ref.dof < 0) throw SemanticError("unknown DOF name '" + dof + "'");
    if (c2 != std::string::npos) ref.scale = parse_double(spec.substr(c2 + 1), "scale");
    return ref;
}

}  // namespace

mf_status mf_fea_assemble(const char* netlist_path, const char* stack_path, int refine,
                          const char* input_spec, const char* output_spec, double alpha,
                          double beta, const char* out_prefix, char** summary) {
    return guarded([&] {
        Netlist n = parse_netlist(read_text_file(netlist_path));
        ProcessStack stack = parse_stack(read_text_file(stack_path));
        FeaModel model = build_fea_model(n, stack, refine);
        std::vector<DofRef> inputs, outputs;
        if (input_spec && *input_spec) inputs.push_back(parse_dof_spec(input_spec));
        if (output_spec && *output_spec) outputs.push_back(parse_dof_spec(output_spec));
        SystemMatrices sys = assemble(model, inputs, outputs, alpha, beta);
        export_system(sys, out_prefix);
        std::ostringstream os;
        os << "assembled " << model.elements.size() << " elements, " << sys.n()
           << " DOFs after constraints -> " << out_prefix << ".{M,K,Cd,B,C}.mm";
        set_out(summary, os.str());
    });
}

mf_status mf_mor_reduce(const char* fea_prefix, int q, const char* mode_str,
                        const char* out_prefix, char** summary) {
    return guarded([&] {
        SystemMatrices sys = import_system(fea_prefix);
        StateSpace ss = to_first_order_modal(sys);
        ReductionMode mode = ReductionMode::ShiftInvert;
        double s0 = 0;
        std::string m = mode_str ? mode_str : "shift:0";
        if (m == "direct") {
            mode = ReductionMode::Direct;
        } else if (m.rfind("shift:", 0) == 0) {
            mode = ReductionMode::ShiftInvert;
            s0 = parse_double(m.substr(6), "s0");
        } else {
            throw SemanticError("mode must be 'direct' or 'shift:<s0>'");
        }
        ReducedModel rm = reduce(ss, q, mode, s0);
        export_reduced(rm, &sys, out_prefix);
        std::ostringstream os;
        os << "reduced " << ss.n() << " states to order " << rm.q()
           << (rm.breakdown ? " (happy breakdown)" : "") << " -> " << out_prefix << ".{A,b,c}.mm";
        set_out(summary, os.str());
    });
}

mf_status mf_sim_transient(const char* config_path, const char* out_csv, char** summary) {
    return guarded([&] {
        std::string dir = std::filesystem::path(config_path).parent_path().string();
        SimRunConfig cfg = parse_sim_config(read_text_file(config_path), dir);
        SimResult r = run_transient_config(cfg);
        write_text_file_atomic(out_csv, to_csv(r));
        std::ostringstream os;
        os << r.steps << " steps, " << r.probe_names.size() << " probes, wall "
           << format_double(r.wall_seconds) << " s -> " << out_csv;
        set_out(summary, os.str());
    });
}

mf_status mf_sim_ac(const char* config_path, const char* out_csv, char** summary) {
    return guarded([&] {
        std::string dir = std::filesystem::path(config_path).parent_path().string();
        SimRunConfig cfg = parse_sim_config(read_text_file(config_path), dir);
        std::string csv = run_ac_config(cfg);
        write_text_file_atomic(out_csv, csv);
        std::ostringstream os;
        os << cfg.ac_freqs_hz.size() << " frequencies -> " << out_csv;
        set_out(summary, os.str());
    });
}

/* ---- demos ----------------------------------------------------------------- */

mf_status mf_fixture_write(const char* which, const char* dir) {
    return guarded([&] { write_fixtures(which, dir); });
}

mf_status mf_demo_gyro(const char* workdir, char** report) {
    return guarded([&] {
        DemoReport r = run_demo_gyro(workdir);
        set_out(report, r.text);
    });
}

mf_status mf_demo_accel(const char* workdir, int q, char** report) {
    return guarded([&] {
        DemoReport r = run_demo_accel(workdir, q > 0 ? q : 10);
        set_out(report, r.text);
    });
}

}  // extern "C"
