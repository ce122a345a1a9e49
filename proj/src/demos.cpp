#include "demos.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "sim.hpp"

namespace mems {

namespace {

namespace fs = std::filesystem;

double max_abs_eigenvalue(const Eigen::MatrixXd& a) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

DemoReport run_demo_gyro(const std::string& workdir) {
    DemoReport report;
    std::ostringstream os;
    fs::path wd(workdir);
    fs::create_directories(wd);

    write_fixtures("gyro", workdir);
    os << "stage fixtures: gyro.net soi.stack extract.rules\n";

    Netlist n = parse_netlist(read_text_file((wd / "gyro.net").string()));
    ProcessStack stack = parse_stack(read_text_file((wd / "soi.stack").string()));
    ValidationReport vr = validate_netlist(n, stack);
    if (!vr.empty()) throw SemanticError("gyro netlist not flow-ready:\n" + vr.to_string());
    os << "stage netlist: " << n.instances.size() << " instances ("
       << n.count_kind(ComponentKind::Beam) << " beams, "
       << n.count_kind(ComponentKind::RigidMass) << " masses, "
       << n.count_kind(ComponentKind::LinearComb) << " linear combs, "
       << n.count_kind(ComponentKind::BiasComb) << " bias combs, "
       << n.count_kind(ComponentKind::Anchor) << " anchors)\n";

    SolidModel solid = netlist_to_solid(n, stack);
    write_text_file_atomic((wd / "gyro.esm").string(), emit_esm(solid));
    os << "stage solid: " << solid.prisms.size() << " prisms -> gyro.esm\n";

    Layout layout = solid_to_layout(solid, stack);
    write_text_file_atomic((wd / "gyro.cif").string(), emit_cif(layout));
    os << "stage layout: " << layout.shape_count() << " shapes -> gyro.cif\n";

    std::string triangle;
    bool equal = verify_triangle(n, stack, &triangle);
    os << "stage triangle:\n" << triangle;
    if (!equal) throw SemanticError("closed-triangle check failed:\n" + triangle);

    // lumped drive-axis sweep around the suspension resonance
    SimModel model = build_sim_model(n, stack, {}, SimOptions{Axis::X, 0.0, 1e-9});
    Source drive;
    drive.target = "volt@lc1";
    drive.bias = 50.0;
    double k_beam;
    {
        const ComponentInstance* b = nullptr;
        for (const ComponentInstance& c : n.instances)
            if (c.kind == ComponentKind::Beam) { b = &c; break; }
        k_beam = lumped_params(*b, resolve_material(*b, n, stack), stack).k_lateral;
    }
    const ComponentInstance* plate = nullptr;
    for (const ComponentInstance& c : n.instances)
        if (c.kind == ComponentKind::RigidMass) { plate = &c; break; }
    double m_plate = lumped_params(*plate, resolve_material(*plate, n, stack), stack).mass;
    double f0 = std::sqrt(4.0 * k_beam / m_plate) / (2.0 * std::acos(-1.0));
    std::vector<double> freqs;
    for (int i = 0; i < 41; ++i) freqs.push_back(f0 * (0.5 + 1.0 * i / 40.0));
    std::vector<std::complex<double>> h = frequency_response(model, drive, "disp@m1", freqs);
    std::ostringstream csv;
    csv << "f,disp@m1.re,disp@m1.im,disp@m1.mag\n";
    std::size_t peak = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        csv << format_double(freqs[i]) << "," << format_double(h[i].real()) << ","
            << format_double(h[i].imag()) << "," << format_double(std::abs(h[i])) << "\n";
        if (std::abs(h[i]) > std::abs(h[peak])) peak = i;
    }
    write_text_file_atomic((wd / "gyro_ac.csv").string(), csv.str());
    os << "stage ac-sweep: drive resonance near " << format_double(freqs[peak])
       << " Hz (lumped estimate " << format_double(f0) << " Hz) -> gyro_ac.csv\n";

    report.ok = true;
    report.text = os.str();
    return report;
}

DemoReport run_demo_accel(const std::string& workdir, int q) {
    DemoReport report;
    std::ostringstream os;
    fs::path wd(workdir);
    fs::create_directories(wd);

    write_fixtures("accel", workdir);
    os << "stage fixtures: accel.cif accel.stack extract.rules\n";

    Layout layout = parse_cif(read_text_file((wd / "accel.cif").string()));
    ProcessStack stack = parse_stack(read_text_file((wd / "accel.stack").string()));
    os << "stage layout: " << layout.shape_count() << " shapes\n";

    SolidModel solid = layout_to_solid(layout, stack);
    write_text_file_atomic((wd / "accel.esm").string(), emit_esm(solid));
    os << "stage solid: " << solid.prisms.size() << " prisms -> accel.esm\n";

    ExtractionRules rules = parse_rules(read_text_file((wd / "extract.rules").string()));
    ExtractionReport er = layout_to_netlist(layout, stack, rules);
    if (!er.unrecognized.empty())
        throw SemanticError("accel extraction left " + std::to_string(er.unrecognized.size()) +
                            " shapes unrecognized");
    write_text_file_atomic((wd / "accel.net").string(), serialize_netlist(er.recognized));
    os << "stage extract: " << er.summary() << " -> accel.net\n";

    // the proof mass is the single extracted rigid mass; force and readout
    // act on its master node along z
    std::string pm;
    for (const ComponentInstance& c : er.recognized.instances)
        if (c.kind == ComponentKind::RigidMass) pm = c.name;
    if (pm.empty()) throw SemanticError("accel extraction found no proof mass");

    // light stiffness damping: physically a small material loss, numerically
    // it keeps the projected model's near-imaginary poles on the stable side
    FeaModel fmodel = build_fea_model(er.recognized, stack, 1);
    SystemMatrices sys = assemble(fmodel, {{pm, 2, 1.0}}, {{pm, 2, 1.0}}, 0.0, 2e-9);
    std::string fea_prefix = (wd / "accel_fea").string();
    export_system(sys, fea_prefix);
    os << "stage fea: " << sys.n() << " DOFs (" << 2 * sys.n() << " states) -> accel_fea.*\n";

    StateSpace full = to_first_order_modal(sys);
    if (q <= 0) q = static_cast<int>(full.n());  // full-order regression mode
    if (q > full.n()) throw SemanticError("reduction order exceeds state dimension");
    ReducedModel reduced = reduce(full, q, ReductionMode::ShiftInvert, 0.0);
    std::string mor_prefix = (wd / "accel_mor").string();
    export_reduced(reduced, &sys, mor_prefix);
    os << "stage mor: order " << reduced.q() << " shift-invert(0) reduction -> accel_mor.*\n";

    // step sizes follow each model's own spectrum (RK4 stability)
    std::vector<Mode> modes = modal_analysis(sys, static_cast<int>(sys.n()));
    double f_low = modes.front().frequency_hz;
    double w_max = 2.0 * std::acos(-1.0) * modes.back().frequency_hz;
    double t1 = 1.0 / f_low;
    double t_end = 3.0 * t1;
    double dt_full = std::min(2.0 / w_max, t1 / 200.0);
    double dt_red = reduced.q() == full.n()
                        ? dt_full
                        : std::min(std::min(2.0 / max_abs_eigenvalue(reduced.A_r), t1 / 200.0),
                                   t_end / 100.0);

    std::vector<Source> sources;
    Source pulse;
    pulse.kind = Source::Kind::Pulse;
    pulse.target = "force@in";
    pulse.amplitude = 1e-6;
    pulse.t_on = 0;
    pulse.t_off = t1 / 2.0;
    sources.push_back(pulse);
    Source sine;
    sine.kind = Source::Kind::Sine;
    sine.target = "force@in";
    sine.amplitude = 5e-7;
    sine.freq_hz = f_low / 3.0;
    sources.push_back(sine);

    SimResult r_full = transient(from_state_space(full), sources, t_end, dt_full);
    SimResult r_red = transient(from_reduced(reduced), sources, t_end, dt_red);
    write_text_file_atomic((wd / "accel_full.csv").string(), to_csv(r_full));
    write_text_file_atomic((wd / "accel_reduced.csv").string(), to_csv(r_red));
    os << "stage transient: pulse (" << format_double(pulse.t_off) << " s) + sine ("
       << format_double(sine.freq_hz) << " Hz), t_end " << format_double(t_end) << " s; full "
       << r_full.steps << " steps, reduced " << r_red.steps << " steps\n";

    CompareMetrics metrics = compare_results(r_full, r_red);
    write_text_file_atomic((wd / "accel_compare.txt").string(), metrics.summary());
    double worst = 0;
    for (const auto& [probe, err] : metrics.rel_l2) worst = std::max(worst, err);
    os << "stage compare: rel_l2 " << format_double(worst) << ", wall ratio "
       << format_double(metrics.wall_ratio) << " -> accel_compare.txt\n";

    report.ok = true;
    report.text = os.str();
    report.rel_l2 = worst;
    report.wall_ratio = metrics.wall_ratio;
    return report;
}

}  // namespace mems
