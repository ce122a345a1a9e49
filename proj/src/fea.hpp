#pragma once

#include <Eigen/Dense>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "netlist.hpp"

namespace mems {

struct BeamElementDef {
    int node_a = 0;
    int node_b = 0;
    double width = 0;      // m, in-plane
    double thickness = 0;  // m, out-of-plane
    Material material;
};

struct PointMassDef {
    int node = 0;
    double mass = 0;
    double ixx = 0, iyy = 0, izz = 0;
};

struct RigidLinkDef {
    int master = 0;
    int slave = 0;
};

/// Desk-scale structural model: 3D Euler-Bernoulli beams, lumped rigid
/// masses with kinematic links, fully fixed anchor nodes. 6 DOF per node
/// (ux uy uz rx ry rz).
struct FeaModel {
    std::vector<Eigen::Vector3d> node_positions;
    std::vector<std::string> node_names;
    std::vector<BeamElementDef> elements;
    std::vector<PointMassDef> point_masses;
    std::vector<RigidLinkDef> rigid_links;
    std::set<std::pair<int, int>> fixed_dofs;  // (node, dof 0..5)

    int add_node(const Eigen::Vector3d& p, const std::string& name = "");
    int find_node(const std::string& name) const;  // -1 if absent
    void fix_all(int node);
};

/// Local 12x12 Euler-Bernoulli stiffness and consistent mass matrices.
/// Local x runs along the beam, y across the width, z through the thickness.
void beam_element_matrices(double length, double width, double thickness,
                           const Material& mat, Eigen::Matrix<double, 12, 12>& k_e,
                           Eigen::Matrix<double, 12, 12>& m_e);

/// Builds the FEA model of a netlist: every beam becomes `refine` elements,
/// every rigid mass a master node with lumped inertia plus rigid links to
/// its attachment nodes, every anchor fixes its nodes. Combs contribute no
/// stiffness. Node coordinates come from beam axes and anchor centers; a
/// mass's master node sits at its rectangle center and is addressable by the
/// instance name.
FeaModel build_fea_model(const Netlist& n, const ProcessStack& stack, int refine);

struct DofRef {
    std::string node;  // node name or mass instance name
    int dof = 0;       // 0..5
    double scale = 1.0;
};

/// Assembled, constrained system. dof_map maps retained matrix indices back
/// to (node, dof) pairs.
struct SystemMatrices {
    Eigen::MatrixXd M, K, Cd;
    Eigen::MatrixXd B;  // n x m input map
    Eigen::MatrixXd C;  // p x n output map
    std::vector<std::pair<int, int>> dof_map;
    std::vector<std::string> node_names;
    double alpha = 0, beta = 0;

    Eigen::Index n() const { return M.rows(); }
};

/// Global assembly with coordinate transforms, master-slave elimination of
/// rigid links, fixed-DOF removal and Rayleigh damping Cd = alpha*M + beta*K.
SystemMatrices assemble(const FeaModel& model, const std::vector<DofRef>& inputs,
                        const std::vector<DofRef>& outputs, double alpha = 0, double beta = 0);

struct Mode {
    double frequency_hz = 0;
    Eigen::VectorXd shape;  // M-orthonormal
};

/// Lowest n_modes of K*phi = w^2*M*phi, frequencies ascending.
std::vector<Mode> modal_analysis(const SystemMatrices& sys, int n_modes);

/// Solves K*u = f with one step of iterative refinement; the residual must
/// reach 1e-10 relative or the solve is reported singular.
Eigen::VectorXd static_solve(const SystemMatrices& sys, const Eigen::VectorXd& load);

/// Matrix Market export: coordinate files for M, K, Cd, array files for B
/// and C, plus `<prefix>.manifest` listing sizes and the dof map.
void export_system(const SystemMatrices& sys, const std::string& prefix);
SystemMatrices import_system(const std::string& prefix);

}  // namespace mems
