#include "fea.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>

#include "components.hpp"
#include "mmio.hpp"

namespace mems {

int FeaModel::add_node(const Eigen::Vector3d& p, const std::string& name) {
    node_positions.push_back(p);
    node_names.push_back(name);
    return static_cast<int>(node_positions.size()) - 1;
}

int FeaModel::find_node(const std::string& name) const {
    for (std::size_t i = 0; i < node_names.size(); ++i)
        if (node_names[i] == name) return static_cast<int>(i);
    return -1;
}

void FeaModel::fix_all(int node) {
    for (int d = 0; d < 6; ++d) fixed_dofs.insert({node, d});
}

void beam_element_matrices(double length, double width, double thickness,
                           const Material& mat, Eigen::Matrix<double, 12, 12>& k_e,
                           Eigen::Matrix<double, 12, 12>& m_e) {
    if (length <= 0 || width <= 0 || thickness <= 0)
        throw SemanticError("beam element with non-positive dimensions");
    const double L = length;
    const double E = mat.youngs_modulus;
    const double G = E / (2.0 * (1.0 + mat.poisson_ratio));
    const double rho = mat.density;
    const double A = width * thickness;
    const double Iz = thickness * width * width * width / 12.0;  // bending in-plane (local y)
    const double Iy = width * thickness * thickness * thickness / 12.0;
    const double Ip = Iy + Iz;
    // torsion constant of a rectangle, Roark's approximation
    const double a = std::max(width, thickness) / 2.0;
    const double b = std::min(width, thickness) / 2.0;
    const double J = a * b * b * b *
                     (16.0 / 3.0 - 3.36 * (b / a) * (1.0 - b * b * b * b / (12.0 * a * a * a * a)));

    k_e.setZero();
    m_e.setZero();

    auto sym_set = [&](Eigen::Matrix<double, 12, 12>& m, int i, int j, double v) {
        m(i, j) = v;
        m(j, i) = v;
    };

    // axial
    sym_set(k_e, 0, 0, E * A / L);
    sym_set(k_e, 6, 6, E * A / L);
    sym_set(k_e, 0, 6, -E * A / L);
    // torsion
    sym_set(k_e, 3, 3, G * J / L);
    sym_set(k_e, 9, 9, G * J / L);
    sym_set(k_e, 3, 9, -G * J / L);
    // bending about local z: displacement uy (1, 7), rotation rz (5, 11)
    {
        double c1 = 12.0 * E * Iz / (L * L * L);
        double c2 = 6.0 * E * Iz / (L * L);
        double c3 = 4.0 * E * Iz / L;
        double c4 = 2.0 * E * Iz / L;
        sym_set(k_e, 1, 1, c1);
        sym_set(k_e, 1, 5, c2);
        sym_set(k_e, 1, 7, -c1);
        sym_set(k_e, 1, 11, c2);
        sym_set(k_e, 5, 5, c3);
        sym_set(k_e, 5, 7, -c2);
        sym_set(k_e, 5, 11, c4);
        sym_set(k_e, 7, 7, c1);
        sym_set(k_e, 7, 11, -c2);
        sym_set(k_e, 11, 11, c3);
    }
    // bending about local y: displacement uz (2, 8), rotation ry (4, 10)
    {
        double c1 = 12.0 * E * Iy / (L * L * L);
        double c2 = 6.0 * E * Iy / (L * L);
        double c3 = 4.0 * E * Iy / L;
        double c4 = 2.0 * E * Iy / L;
        sym_set(k_e, 2, 2, c1);
        sym_set(k_e, 2, 4, -c2);
        sym_set(k_e, 2, 8, -c1);
        sym_set(k_e, 2, 10, -c2);
        sym_set(k_e, 4, 4, c3);
        sym_set(k_e, 4, 8, c2);
        sym_set(k_e, 4, 10, c4);
        sym_set(k_e, 8, 8, c1);
        sym_set(k_e, 8, 10, c2);
        sym_set(k_e, 10, 10, c3);
    }

    const double mAL = rho * A * L;
    // axial translation
    sym_set(m_e, 0, 0, mAL / 3.0);
    sym_set(m_e, 6, 6, mAL / 3.0);
    sym_set(m_e, 0, 6, mAL / 6.0);
    // torsion
    sym_set(m_e, 3, 3, rho * Ip * L / 3.0);
    sym_set(m_e, 9, 9, rho * Ip * L / 3.0);
    sym_set(m_e, 3, 9, rho * Ip * L / 6.0);
    // bending (consistent, translational inertia only)
    {
        double f = mAL;
        sym_set(m_e, 1, 1, f * 13.0 / 35.0);
        sym_set(m_e, 1, 5, f * 11.0 * L / 210.0);
        sym_set(m_e, 1, 7, f * 9.0 / 70.0);
        sym_set(m_e, 1, 11, f * -13.0 * L / 420.0);
        sym_set(m_e, 5, 5, f * L * L / 105.0);
        sym_set(m_e, 5, 7, f * 13.0 * L / 420.0);
        sym_set(m_e, 5, 11, f * -L * L / 140.0);
        sym_set(m_e, 7, 7, f * 13.0 / 35.0);
        sym_set(m_e, 7, 11, f * -11.0 * L / 210.0);
        sym_set(m_e, 11, 11, f * L * L / 105.0);

        sym_set(m_e, 2, 2, f * 13.0 / 35.0);
        sym_set(m_e, 2, 4, f * -11.0 * L / 210.0);
        sym_set(m_e, 2, 8, f * 9.0 / 70.0);
        sym_set(m_e, 2, 10, f * 13.0 * L / 420.0);
        sym_set(m_e, 4, 4, f * L * L / 105.0);
        sym_set(m_e, 4, 8, f * -13.0 * L / 420.0);
        sym_set(m_e, 4, 10, f * -L * L / 140.0);
        sym_set(m_e, 8, 8, f * 13.0 / 35.0);
        sym_set(m_e, 8, 10, f * 11.0 * L / 210.0);
        sym_set(m_e, 10, 10, f * L * L / 105.0);
    }
}

namespace {

Vec2 rotate_exact(Coord x, Coord y, int quarter_turns) {
    switch (((quarter_turns % 4) + 4) % 4) {
        case 0: return {x, y};
        case 1: return {-y, x};
        case 2: return {-x, -y};
        default: return {y, -x};
    }
}

Eigen::Vector3d node_position_m(Vec2 p_nm, double z_m) {
    return {nm_to_m(p_nm.x), nm_to_m(p_nm.y), z_m};
}

}  // namespace

FeaModel build_fea_model(const Netlist& n, const ProcessStack& stack, int refine) {
    if (refine < 1) throw SemanticError("refine must be >= 1");

    // combs carry no stiffness or mass at this level; only beams, masses and
    // anchors shape the structural model
    FeaModel model;

    auto mid_z = [&](const std::string& layer) {
        const ProcessLayer& l = stack.layer_or_throw(layer);
        return nm_to_m(l.z0) + nm_to_m(l.thickness) / 2.0;
    };

    // first-seen coordinate wins for a shared node name
    auto node_for = [&](const std::string& name, const Eigen::Vector3d& pos) {
        int id = model.find_node(name);
        if (id >= 0) return id;
        return model.add_node(pos, name);
    };

    auto beam_endpoints = [&](const ComponentInstance& c) -> std::pair<Vec2, Vec2> {
        double q = c.angle_deg / 90.0;
        Vec2 delta;
        if (q == std::round(q)) {
            delta = rotate_exact(c.l, 0, static_cast<int>(std::llround(q)));
        } else {
            double rad = c.angle_deg * (std::acos(-1.0) / 180.0);
            delta = {static_cast<Coord>(std::llround(std::cos(rad) * static_cast<double>(c.l))),
                     static_cast<Coord>(std::llround(std::sin(rad) * static_cast<double>(c.l)))};
        }
        Vec2 a = c.position;
        Vec2 b{c.position.x + delta.x, c.position.y + delta.y};
        return {a, b};
    };

    // register geometric nodes: beam ends, then anchor centers
    for (const ComponentInstance& c : n.instances) {
        if (c.kind == ComponentKind::Beam) {
            auto [a, b] = beam_endpoints(c);
            double z = mid_z(c.layer);
            node_for(c.nodes[0], node_position_m(a, z));
            node_for(c.nodes[1], node_position_m(b, z));
        }
    }
    for (const ComponentInstance& c : n.instances) {
        if (c.kind == ComponentKind::Anchor) {
            Vec2 center{c.position.x + c.w / 2, c.position.y + c.h / 2};
            double z = mid_z(c.layer);
            for (const std::string& node : c.nodes) {
                int id = node_for(node, node_position_m(center, z));
                model.fix_all(id);
            }
        }
    }

    // rigid masses: master node at the plate center, links to attachment
    // nodes that carry beam/anchor geometry
    for (const ComponentInstance& c : n.instances) {
        if (c.kind != ComponentKind::RigidMass) continue;
        Vec2 center{c.position.x + c.w / 2, c.position.y + c.h / 2};
        double z = mid_z(c.layer);
        int master = model.find_node(c.name);
        if (master >= 0) throw SemanticError("node name collides with mass instance '" + c.name + "'");
        master = model.add_node(node_position_m(center, z), c.name);

        const Material& mat = resolve_material(c, n, stack);
        LumpedParams lp = lumped_params(c, mat, stack);
        model.point_masses.push_back({master, lp.mass, lp.inertia_xx, lp.inertia_yy, lp.inertia_zz});

        for (const std::string& node : c.nodes) {
            int slave = model.find_node(node);
            if (slave < 0) continue;  // electrical-only attachment (e.g. a comb)
            model.rigid_links.push_back({master, slave});
        }
    }

    // beam elements, refined
    for (const ComponentInstance& c : n.instances) {
        if (c.kind != ComponentKind::Beam) continue;
        const Material& mat = resolve_material(c, n, stack);
        const ProcessLayer& layer = stack.layer_or_throw(c.layer);
        int na = model.find_node(c.nodes[0]);
        int nb = model.find_node(c.nodes[1]);
        Eigen::Vector3d pa = model.node_positions[na];
        Eigen::Vector3d pb = model.node_positions[nb];
        int prev = na;
        for (int k = 1; k <= refine; ++k) {
            int next;
            if (k == refine) {
                next = nb;
            } else {
                double t = static_cast<double>(k) / refine;
                next = model.add_node(pa + t * (pb - pa),
                                      c.name + ".k" + std::to_string(k));
            }
            model.elements.push_back({prev, next, nm_to_m(c.w), nm_to_m(layer.thickness), mat});
            prev = next;
        }
    }

    // a structure whose connected component has no anchored node would make
    // K singular beyond rigid-body modes
    const int n_nodes = static_cast<int>(model.node_positions.size());
    std::vector<int> parent(n_nodes);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    for (const BeamElementDef& e : model.elements) unite(e.node_a, e.node_b);
    for (const RigidLinkDef& l : model.rigid_links) unite(l.master, l.slave);
    std::set<int> anchored;
    for (const auto& [node, dof] : model.fixed_dofs) anchored.insert(find(node));
    for (int i = 0; i < n_nodes; ++i) {
        if (!anchored.count(find(i)))
            throw SemanticError("structure containing node '" + model.node_names[i] +
                                "' has no anchor; stiffness would be singular");
    }
    return model;
}

namespace {

Eigen::Matrix3d beam_rotation(const Eigen::Vector3d& axis_unit) {
    Eigen::Vector3d x = axis_unit;
    Eigen::Vector3d y, z;
    if (std::abs(x.dot(Eigen::Vector3d::UnitZ())) <= 0.999) {
        y = Eigen::Vector3d::UnitZ().cross(x).normalized();
        z = x.cross(y);
    } else {
        y = Eigen::Vector3d::UnitY();
        z = x.cross(y);
    }
    Eigen::Matrix3d r;
    r.row(0) = x;
    r.row(1) = y;
    r.row(2) = z;
    return r;
}

int dof_index(const FeaModel& model, const DofRef& ref) {
    int node = model.find_node(ref.node);
    if (node < 0) throw SemanticError("unknown node '" + ref.node + "' in DOF reference");
    if (ref.dof < 0 || ref.dof > 5) throw SemanticError("DOF index must be 0..5");
    return node * 6 + ref.dof;
}

}  // namespace

SystemMatrices assemble(const FeaModel& model, const std::vector<DofRef>& inputs,
                        const std::vector<DofRef>& outputs, double alpha, double beta) {
    const int n_nodes = static_cast<int>(model.node_positions.size());
    const int n_full = n_nodes * 6;
    Eigen::MatrixXd K_full = Eigen::MatrixXd::Zero(n_full, n_full);
    Eigen::MatrixXd M_full = Eigen::MatrixXd::Zero(n_full, n_full);

    Eigen::Matrix<double, 12, 12> k_e, m_e;
    for (const BeamElementDef& e : model.elements) {
        Eigen::Vector3d d = model.node_positions[e.node_b] - model.node_positions[e.node_a];
        double L = d.norm();
        beam_element_matrices(L, e.width, e.thickness, e.material, k_e, m_e);
        Eigen::Matrix3d r = beam_rotation(d / L);
        Eigen::Matrix<double, 12, 12> t = Eigen::Matrix<double, 12, 12>::Zero();
        for (int blk = 0; blk < 4; ++blk) t.block<3, 3>(blk * 3, blk * 3) = r;
        Eigen::Matrix<double, 12, 12> k_g = t.transpose() * k_e * t;
        Eigen::Matrix<double, 12, 12> m_g = t.transpose() * m_e * t;
        k_g = 0.5 * (k_g + k_g.transpose()).eval();
        m_g = 0.5 * (m_g + m_g.transpose()).eval();

        int base[2] = {e.node_a * 6, e.node_b * 6};
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                int gi = base[i / 6] + i % 6;
                int gj = base[j / 6] + j % 6;
                K_full(gi, gj) += k_g(i, j);
                M_full(gi, gj) += m_g(i, j);
            }
    }
    for (const PointMassDef& pm : model.point_masses) {
        int b = pm.node * 6;
        M_full(b + 0, b + 0) += pm.mass;
        M_full(b + 1, b + 1) += pm.mass;
        M_full(b + 2, b + 2) += pm.mass;
        M_full(b + 3, b + 3) += pm.ixx;
        M_full(b + 4, b + 4) += pm.iyy;
        M_full(b + 5, b + 5) += pm.izz;
    }

    // master-slave elimination of rigid links
    std::vector<int> slave_of(n_nodes, -1);
    for (const RigidLinkDef& l : model.rigid_links) {
        if (l.master == l.slave) throw SemanticError("rigid link from a node to itself");
        if (slave_of[l.slave] != -1) throw SemanticError("node slaved to two masters");
        slave_of[l.slave] = l.master;
    }
    for (const RigidLinkDef& l : model.rigid_links)
        if (slave_of[l.master] != -1)
            throw SemanticError("rigid-link chains are not supported (master is itself a slave)");

    std::vector<int> reduced_index(n_full, -1);
    int n_reduced = 0;
    for (int node = 0; node < n_nodes; ++node) {
        if (slave_of[node] != -1) continue;
        for (int d = 0; d < 6; ++d) reduced_index[node * 6 + d] = n_reduced++;
    }
    Eigen::MatrixXd T1 = Eigen::MatrixXd::Zero(n_full, n_reduced);
    for (int node = 0; node < n_nodes; ++node) {
        if (slave_of[node] == -1) {
            for (int d = 0; d < 6; ++d) T1(node * 6 + d, reduced_index[node * 6 + d]) = 1.0;
            continue;
        }
        int m = slave_of[node];
        Eigen::Vector3d r = model.node_positions[node] - model.node_positions[m];
        auto mi = [&](int d) { return reduced_index[m * 6 + d]; };
        int b = node * 6;
        // u_s = u_m + theta_m x r, theta_s = theta_m
        T1(b + 0, mi(0)) = 1.0;
        T1(b + 0, mi(4)) = r.z();
        T1(b + 0, mi(5)) = -r.y();
        T1(b + 1, mi(1)) = 1.0;
        T1(b + 1, mi(3)) = -r.z();
        T1(b + 1, mi(5)) = r.x();
        T1(b + 2, mi(2)) = 1.0;
        T1(b + 2, mi(3)) = r.y();
        T1(b + 2, mi(4)) = -r.x();
        for (int d = 3; d < 6; ++d) T1(b + d, mi(d)) = 1.0;
    }

    Eigen::MatrixXd K1 = T1.transpose() * K_full * T1;
    Eigen::MatrixXd M1 = T1.transpose() * M_full * T1;
    K1 = 0.5 * (K1 + K1.transpose()).eval();
    M1 = 0.5 * (M1 + M1.transpose()).eval();

    // remove fixed DOFs
    std::vector<bool> fixed(n_reduced, false);
    for (const auto& [node, dof] : model.fixed_dofs) {
        if (slave_of[node] != -1)
            throw SemanticError("fixed DOF on a rigid-link slave node is not supported");
        fixed[reduced_index[node * 6 + dof]] = true;
    }
    std::vector<int> keep;
    for (int i = 0; i < n_reduced; ++i)
        if (!fixed[i]) keep.push_back(i);
    const int n_kept = static_cast<int>(keep.size());

    SystemMatrices sys;
    sys.K.resize(n_kept, n_kept);
    sys.M.resize(n_kept, n_kept);
    for (int i = 0; i < n_kept; ++i)
        for (int j = 0; j < n_kept; ++j) {
            sys.K(i, j) = K1(keep[i], keep[j]);
            sys.M(i, j) = M1(keep[i], keep[j]);
        }
    sys.alpha = alpha;
    sys.beta = beta;
    sys.Cd = alpha * sys.M + beta * sys.K;

    // dof bookkeeping: retained index -> (node, dof)
    std::vector<std::pair<int, int>> reduced_to_node(n_reduced);
    for (int node = 0; node < n_nodes; ++node)
        if (slave_of[node] == -1)
            for (int d = 0; d < 6; ++d) reduced_to_node[reduced_index[node * 6 + d]] = {node, d};
    for (int i : keep) sys.dof_map.push_back(reduced_to_node[i]);
    sys.node_names = model.node_names;

    // input and output maps
    Eigen::MatrixXd B_full = Eigen::MatrixXd::Zero(n_full, std::max<std::size_t>(inputs.size(), 1));
    if (inputs.empty()) B_full.resize(n_full, 0);
    for (std::size_t c = 0; c < inputs.size(); ++c)
        B_full(dof_index(model, inputs[c]), static_cast<Eigen::Index>(c)) = inputs[c].scale;
    Eigen::MatrixXd C_full = Eigen::MatrixXd::Zero(std::max<std::size_t>(outputs.size(), 1), n_full);
    if (outputs.empty()) C_full.resize(0, n_full);
    for (std::size_t r = 0; r < outputs.size(); ++r)
        C_full(static_cast<Eigen::Index>(r), dof_index(model, outputs[r])) = outputs[r].scale;

    Eigen::MatrixXd B1 = T1.transpose() * B_full;
    Eigen::MatrixXd C1 = C_full * T1;
    sys.B.resize(n_kept, B1.cols());
    sys.C.resize(C1.rows(), n_kept);
    for (int i = 0; i < n_kept; ++i) {
        sys.B.row(i) = B1.row(keep[i]);
        sys.C.col(i) = C1.col(keep[i]);
    }

    // modeling-error guard: the constrained mass must be positive definite
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.M);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SemanticError("singular or indefinite mass matrix after elimination");

    return sys;
}

std::vector<Mode> modal_analysis(const SystemMatrices& sys, int n_modes) {
    if (n_modes < 1 || n_modes > sys.n())
        throw SemanticError("n_modes exceeds system size");
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.K, sys.M);
    if (es.info() != Eigen::Success)
        throw SemanticError("generalized eigensolver failed (mass not positive definite?)");
    std::vector<Mode> modes;
    modes.reserve(n_modes);
    for (int i = 0; i < n_modes; ++i) {
        double lambda = std::max(es.eigenvalues()(i), 0.0);
        modes.push_back({std::sqrt(lambda) / (2.0 * std::acos(-1.0)), es.eigenvectors().col(i)});
    }
    return modes;
}

Eigen::VectorXd static_solve(const SystemMatrices& sys, const Eigen::VectorXd& load) {
    if (load.size() != sys.n()) throw SemanticError("load vector size mismatch");
    double fn = load.norm();
    if (fn == 0.0) return Eigen::VectorXd::Zero(sys.n());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.K);
    Eigen::VectorXd u = ldlt.solve(load);
    u += ldlt.solve(load - sys.K * u);  // one refinement pass
    double rel = (sys.K * u - load).norm() / fn;
    if (ldlt.info() != Eigen::Success || !(rel < 1e-10))
        throw SemanticError("stiffness matrix is singular (residual " + format_double(rel) + ")");
    return u;
}

namespace {

const char* kDofNames[6] = {"ux", "uy", "uz", "rx", "ry", "rz"};

int dof_name_index(const std::string& s) {
    for (int i = 0; i < 6; ++i)
        if (s == kDofNames[i]) return i;
    throw ParseError("unknown DOF name '" + s + "'");
}

}  // namespace

void export_system(const SystemMatrices& sys, const std::string& prefix) {
    std::filesystem::path p(prefix);
    std::string base = p.filename().string();
    write_matrix_market_coordinate(prefix + ".M.mm", sys.M);
    write_matrix_market_coordinate(prefix + ".K.mm", sys.K);
    write_matrix_market_coordinate(prefix + ".Cd.mm", sys.Cd);
    write_matrix_market_array(prefix + ".B.mm", sys.B);
    write_matrix_market_array(prefix + ".C.mm", sys.C);

    std::ostringstream os;
    os << "memsflow-fea 1\n";
    os << "n " << sys.n() << "\n";
    os << "m " << sys.B.cols() << "\n";
    os << "p " << sys.C.rows() << "\n";
    os << "alpha " << format_double(sys.alpha) << "\n";
    os << "beta " << format_double(sys.beta) << "\n";
    os << "units si\n";
    os << "matrix M " << base << ".M.mm\n";
    os << "matrix K " << base << ".K.mm\n";
    os << "matrix Cd " << base << ".Cd.mm\n";
    os << "matrix B " << base << ".B.mm\n";
    os << "matrix C " << base << ".C.mm\n";
    for (std::size_t i = 0; i < sys.dof_map.size(); ++i) {
        auto [node, dof] = sys.dof_map[i];
        std::string name = node < static_cast<int>(sys.node_names.size()) &&
                                   !sys.node_names[node].empty()
                               ? sys.node_names[node]
                               : ("#" + std::to_string(node));
        os << "dof " << i << " " << name << " " << kDofNames[dof] << "\n";
    }
    write_text_file_atomic(prefix + ".manifest", os.str());
}

SystemMatrices import_system(const std::string& prefix) {
    std::filesystem::path dir = std::filesystem::path(prefix).parent_path();
    std::istringstream is(read_text_file(prefix + ".manifest"));
    std::string line;
    if (!std::getline(is, line) || line != "memsflow-fea 1")
        throw ParseError(prefix + ".manifest: bad manifest header");

    SystemMatrices sys;
    std::map<std::string, std::string> files;
    std::vector<std::pair<std::string, int>> dofs;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "matrix") {
            std::string which, file;
            ls >> which >> file;
            files[which] = (dir / file).string();
        } else if (key == "dof") {
            std::size_t idx;
            std::string node, dofname;
            ls >> idx >> node >> dofname;
            if (idx != dofs.size()) throw ParseError(prefix + ".manifest: dof lines out of order");
            dofs.emplace_back(node, dof_name_index(dofname));
        } else if (key == "alpha") {
            ls >> sys.alpha;
        } else if (key == "beta") {
            ls >> sys.beta;
        }
        // n, m, p, units are informational; sizes come from the matrices
    }
    for (const char* which : {"M", "K", "Cd", "B", "C"})
        if (!files.count(which))
            throw ParseError(prefix + ".manifest: missing matrix entry for " + std::string(which));
    sys.M = read_matrix_market(files["M"]);
    sys.K = read_matrix_market(files["K"]);
    sys.Cd = read_matrix_market(files["Cd"]);
    sys.B = read_matrix_market(files["B"]);
    sys.C = read_matrix_market(files["C"]);

    // rebuild the name table in first-appearance order
    std::map<std::string, int> ids;
    for (const auto& [node, dof] : dofs) {
        auto it = ids.find(node);
        int id;
        if (it == ids.end()) {
            id = static_cast<int>(sys.node_names.size());
            ids[node] = id;
            sys.node_names.push_back(node);
        } else {
            id = it->second;
        }
        sys.dof_map.emplace_back(id, dof);
    }
    return sys;
}

}  // namespace mems
