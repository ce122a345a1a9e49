// memsflow command-line driver. One subcommand per inter-level interface
// plus verification and the two bundled demo pipelines. Talks to the kernel
// exclusively through the C API in memsflow.h.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "memsflow.h"

namespace {

int fail(mf_status st) {
    const char* cls = "semantic";
    if (st == MF_ERR_PARSE) cls = "parse";
    else if (st == MF_ERR_IO) cls = "io";
    std::printf("error: %s: %s\n", cls, mf_last_error());
    return static_cast<int>(st);
}

struct StringOut {
    char* s = nullptr;
    ~StringOut() { mf_string_free(s); }
    const char* get() const { return s ? s : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
    T* p = nullptr;
    ~Handle() { Free(p); }
    T** out() { return &p; }
    const T* get() const { return p; }
};

using NetlistH = Handle<mf_netlist, mf_netlist_free>;
using StackH = Handle<mf_stack, mf_stack_free>;
using LayoutH = Handle<mf_layout, mf_layout_free>;
using SolidH = Handle<mf_solid, mf_solid_free>;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memsflow: three-level MEMS design flows over netlist, ESM solid and CIF layout"};
    app.require_subcommand(1);

    std::string in_path, stack_path, out_path, rules_path, mode = "shift:0";
    std::string input_spec, output_spec, workdir;
    int refine = 1, q = 10;
    double alpha = 0, beta = 0;

    auto add_stack = [&](CLI::App* cmd) {
        cmd->add_option("--stack", stack_path, "process stack file")->required();
    };

    CLI::App* synth_layout = app.add_subcommand("synth-layout", "netlist -> CIF layout");
    synth_layout->add_option("netlist", in_path)->required();
    add_stack(synth_layout);
    synth_layout->add_option("-o,--output", out_path, "output CIF")->required();

    CLI::App* synth_solid = app.add_subcommand("synth-solid", "netlist -> ESM solid model");
    synth_solid->add_option("netlist", in_path)->required();
    add_stack(synth_solid);
    synth_solid->add_option("-o,--output", out_path, "output ESM")->required();

    CLI::App* solid2layout = app.add_subcommand("solid2layout", "ESM solid -> CIF layout");
    solid2layout->add_option("solid", in_path)->required();
    add_stack(solid2layout);
    solid2layout->add_option("-o,--output", out_path, "output CIF")->required();

    CLI::App* layout2solid = app.add_subcommand("layout2solid", "CIF layout -> ESM solid");
    layout2solid->add_option("layout", in_path)->required();
    add_stack(layout2solid);
    layout2solid->add_option("-o,--output", out_path, "output ESM")->required();

    CLI::App* extract = app.add_subcommand("extract", "CIF layout -> recognized netlist");
    extract->add_option("layout", in_path)->required();
    add_stack(extract);
    extract->add_option("--rules", rules_path, "extraction rules file");
    extract->add_option("-o,--output", out_path, "output netlist")->required();

    CLI::App* fea = app.add_subcommand("fea-assemble", "netlist -> Matrix Market system bundle");
    fea->add_option("netlist", in_path)->required();
    add_stack(fea);
    fea->add_option("--refine", refine, "elements per beam");
    fea->add_option("--input", input_spec, "input DOF <node>:<dof>[:<scale>]");
    fea->add_option("--output", output_spec, "output DOF <node>:<dof>[:<scale>]");
    fea->add_option("--alpha", alpha, "Rayleigh mass damping");
    fea->add_option("--beta", beta, "Rayleigh stiffness damping");
    fea->add_option("-o,--output-prefix", out_path, "output file prefix")->required();

    CLI::App* mor = app.add_subcommand("mor-reduce", "system bundle -> reduced macromodel");
    mor->add_option("prefix", in_path, "fea-assemble output prefix")->required();
    mor->add_option("--q", q, "reduced order");
    mor->add_option("--mode", mode, "direct | shift:<s0>");
    mor->add_option("-o,--output-prefix", out_path, "output file prefix")->required();

    CLI::App* simt = app.add_subcommand("sim-transient", "run a transient config -> CSV");
    simt->add_option("config", in_path)->required();
    simt->add_option("-o,--output", out_path, "output CSV")->required();

    CLI::App* sima = app.add_subcommand("sim-ac", "run a frequency sweep config -> CSV");
    sima->add_option("config", in_path)->required();
    sima->add_option("-o,--output", out_path, "output CSV")->required();

    CLI::App* tri = app.add_subcommand("verify-triangle",
                                       "check netlist->solid->layout against netlist->layout");
    tri->add_option("netlist", in_path)->required();
    add_stack(tri);

    CLI::App* demo_gyro = app.add_subcommand("demo-gyro", "run the rate-sensor demo pipeline");
    demo_gyro->add_option("workdir", workdir)->required();

    CLI::App* demo_accel = app.add_subcommand("demo-accel", "run the accelerometer demo pipeline");
    demo_accel->add_option("workdir", workdir)->required();
    demo_accel->add_option("--q", q, "macromodel order");

    CLI11_PARSE(app, argc, argv);
    mf_status st = MF_OK;

    if (*synth_layout || *synth_solid) {
        NetlistH n;
        StackH s;
        if ((st = mf_netlist_read(in_path.c_str(), n.out()))) return fail(st);
        if ((st = mf_stack_read(stack_path.c_str(), s.out()))) return fail(st);
        if (*synth_layout) {
            LayoutH l;
            if ((st = mf_netlist_to_layout(n.get(), s.get(), l.out()))) return fail(st);
            if ((st = mf_layout_write(l.get(), out_path.c_str()))) return fail(st);
            std::printf("synth-layout: %zu instances -> %zu shapes -> %s\n",
                        mf_netlist_instance_count(n.get()), mf_layout_shape_count(l.get()),
                        out_path.c_str());
        } else {
            SolidH sm;
            if ((st = mf_netlist_to_solid(n.get(), s.get(), sm.out()))) return fail(st);
            if ((st = mf_solid_write(sm.get(), out_path.c_str()))) return fail(st);
            std::printf("synth-solid: %zu instances -> %zu prisms -> %s\n",
                        mf_netlist_instance_count(n.get()), mf_solid_prism_count(sm.get()),
                        out_path.c_str());
        }
    } else if (*solid2layout) {
        SolidH sm;
        StackH s;
        LayoutH l;
        if ((st = mf_solid_read(in_path.c_str(), sm.out()))) return fail(st);
        if ((st = mf_stack_read(stack_path.c_str(), s.out()))) return fail(st);
        if ((st = mf_solid_to_layout(sm.get(), s.get(), l.out()))) return fail(st);
        if ((st = mf_layout_write(l.get(), out_path.c_str()))) return fail(st);
        std::printf("solid2layout: %zu prisms -> %zu shapes -> %s\n",
                    mf_solid_prism_count(sm.get()), mf_layout_shape_count(l.get()),
                    out_path.c_str());
    } else if (*layout2solid) {
        LayoutH l;
        StackH s;
        SolidH sm;
        if ((st = mf_layout_read(in_path.c_str(), l.out()))) return fail(st);
        if ((st = mf_stack_read(stack_path.c_str(), s.out()))) return fail(st);
        if ((st = mf_layout_to_solid(l.get(), s.get(), sm.out()))) return fail(st);
        if ((st = mf_solid_write(sm.get(), out_path.c_str()))) return fail(st);
        std::printf("layout2solid: %zu shapes -> %zu prisms -> %s\n",
                    mf_layout_shape_count(l.get()), mf_solid_prism_count(sm.get()),
                    out_path.c_str());
    } else if (*extract) {
        LayoutH l;
        StackH s;
        NetlistH n;
        StringOut report;
        if ((st = mf_layout_read(in_path.c_str(), l.out()))) return fail(st);
        if ((st = mf_stack_read(stack_path.c_str(), s.out()))) return fail(st);
        if ((st = mf_extract(l.get(), s.get(), rules_path.empty() ? nullptr : rules_path.c_str(),
                             n.out(), &report.s)))
            return fail(st);
        if ((st = mf_netlist_write(n.get(), out_path.c_str()))) return fail(st);
        std::printf("extract: %s-> %s\n", report.get(), out_path.c_str());
    } else if (*fea) {
        StringOut summary;
        if ((st = mf_fea_assemble(in_path.c_str(), stack_path.c_str(), refine, input_spec.c_str(),
                                  output_spec.c_str(), alpha, beta, out_path.c_str(), &summary.s)))
            return fail(st);
        std::printf("fea-assemble: %s\n", summary.get());
    } else if (*mor) {
        StringOut summary;
        if ((st = mf_mor_reduce(in_path.c_str(), q, mode.c_str(), out_path.c_str(), &summary.s)))
            return fail(st);
        std::printf("mor-reduce: %s\n", summary.get());
    } else if (*simt) {
        StringOut summary;
        if ((st = mf_sim_transient(in_path.c_str(), out_path.c_str(), &summary.s)))
            return fail(st);
        std::printf("sim-transient: %s\n", summary.get());
    } else if (*sima) {
        StringOut summary;
        if ((st = mf_sim_ac(in_path.c_str(), out_path.c_str(), &summary.s))) return fail(st);
        std::printf("sim-ac: %s\n", summary.get());
    } else if (*tri) {
        NetlistH n;
        StackH s;
        StringOut report;
        if ((st = mf_netlist_read(in_path.c_str(), n.out()))) return fail(st);
        if ((st = mf_stack_read(stack_path.c_str(), s.out()))) return fail(st);
        if ((st = mf_verify_triangle(n.get(), s.get(), &report.s))) return fail(st);
        std::printf("verify-triangle: closed triangle exact\n%s", report.get());
    } else if (*demo_gyro) {
        StringOut report;
        if ((st = mf_demo_gyro(workdir.c_str(), &report.s))) return fail(st);
        std::printf("demo-gyro:\n%sdemo-gyro: ok\n", report.get());
    } else if (*demo_accel) {
        StringOut report;
        if ((st = mf_demo_accel(workdir.c_str(), q, &report.s))) return fail(st);
        std::printf("demo-accel:\n%sdemo-accel: ok\n", report.get());
    }
    return 0;
}
