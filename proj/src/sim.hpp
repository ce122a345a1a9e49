#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "mor.hpp"
#include "netlist.hpp"

namespace mems {

enum class Axis { X, Y, Z };

Axis parse_axis(const std::string& s);

struct Source {
    enum class Kind { Step, Pulse, Sine, Dc };
    Kind kind = Kind::Dc;
    std::string target;  // force@<node|mass>, volt@<comb>, force@in
    double amplitude = 0;
    double t_on = 0;
    double t_off = 0;     // pulse only, > t_on
    double freq_hz = 0;   // sine only, > 0
    double phase = 0;
    double bias = 0;      // DC offset (comb bias voltage)

    /// Signal value at time t, bias included.
    double value(double t) const;
};

struct InputChannel {
    enum class Type { Force, CombVoltage };
    Type type = Type::Force;
    std::string target;
    Eigen::VectorXd g;       // state-derivative injection per unit force
    double dcdx = 0;         // comb channels
    double axis_sign = 1.0;  // comb orientation projected on the sim axis
};

struct ProbeDef {
    enum class Type { Linear, Capacitance, Current };
    Type type = Type::Linear;
    std::string name;
    Eigen::VectorXd row;  // displacement row (Linear/Capacitance) or velocity row (Current)
    double c0 = 0;
    double dcdx = 0;
    int volt_channel = -1;  // comb voltage channel feeding a Current probe
};

/// Linear ODE x' = A x + sum_k u_k(t) g_k with named probes. Lumped models
/// additionally keep their M and K blocks for energy accounting; the state
/// layout is then [displacements, velocities, macromodel states...].
struct SimModel {
    Eigen::MatrixXd A;
    std::vector<InputChannel> channels;
    std::vector<ProbeDef> probes;
    Eigen::MatrixXd M_lumped, K_lumped;
    std::vector<std::string> dof_names;  // mass instance per lumped DOF

    Eigen::Index state_count() const { return A.rows(); }
    const InputChannel* find_channel(const std::string& target) const;
    const ProbeDef* find_probe(const std::string& name) const;
};

struct MacroAttachment {
    ReducedModel model;
    std::string node;
    double k_couple = 0;  // 0 selects 1e4 x the port's static stiffness
};

struct SimOptions {
    Axis axis = Axis::X;
    double alpha = 0;
    double beta = 0;
};

/// System-level lumped model: one DOF per rigid mass along the chosen axis,
/// beam springs between mass/ground endpoints, anchors grounding nodes,
/// electrostatic comb force channels, and macromodels coupled at their
/// attachment node through a stiff interface spring (force in, displacement
/// out). States: 2 x masses + sum of macromodel orders.
SimModel build_sim_model(const Netlist& n, const ProcessStack& stack,
                         const std::vector<MacroAttachment>& macromodels,
                         const SimOptions& opts);

/// Wraps a state-space (or reduced bundle) for direct simulation: one
/// force input channel "force@in", probes y0..y{p-1}.
SimModel from_state_space(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::MatrixXd& c);
SimModel from_state_space(const StateSpace& ss);
SimModel from_reduced(const ReducedModel& rm);

struct SimResult {
    std::vector<double> time;
    std::vector<std::string> probe_names;
    std::vector<std::vector<double>> signals;  // per probe, aligned with time
    long steps = 0;
    double wall_seconds = 0;
};

/// Classical fixed-step RK4 from a zero (or given) initial state.
/// Deterministic; diverging states are reported with the time they first
/// turn non-finite.
SimResult transient(const SimModel& model, const std::vector<Source>& sources, double t_end,
                    double dt, const Eigen::VectorXd* x0 = nullptr);

/// H(j 2 pi f) of the model linearized about zero; comb channels use their
/// bias voltage, comb probes their bias-point sensitivities.
std::vector<std::complex<double>> frequency_response(const SimModel& model, const Source& input,
                                                     const std::string& probe,
                                                     const std::vector<double>& freqs_hz);

struct CompareMetrics {
    std::map<std::string, double> rel_l2;
    std::map<std::string, double> max_abs;
    double wall_ratio = 1.0;  // first run's wall time over the second's
    std::string summary() const;
};

/// Per-probe error metrics, the first result acting as the reference. Time
/// grids are joined by linear interpolation onto the coarser one.
CompareMetrics compare_results(const SimResult& a, const SimResult& b);

std::string to_csv(const SimResult& r);

// ---------------------------------------------------------------------------
// Run configuration (plain text key=value; see README for the schema)

struct SimRunConfig {
    SimModel model;
    std::vector<Source> sources;
    std::vector<std::string> probes;  // subset to record; empty = all
    double dt = 0;
    double t_end = 0;
    std::string ac_input;
    std::string ac_output;
    std::vector<double> ac_freqs_hz;
};

SimRunConfig parse_sim_config(const std::string& text, const std::string& base_dir);

SimResult run_transient_config(const SimRunConfig& cfg);
std::string run_ac_config(const SimRunConfig& cfg);  // returns CSV

}  // namespace mems
