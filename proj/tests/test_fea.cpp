#include <Eigen/Eigenvalues>

#include <filesystem>
#include <limits>

#include "doctest.h"
#include "fea.hpp"
#include "fixtures.hpp"

using namespace mems;

namespace {

Material silicon() { return {"si", 160e9, 0.28, 2330}; }

// clamped-free cantilever along x, n elements
FeaModel cantilever(int n_elem, double L, double w, double t) {
    FeaModel m;
    int prev = m.add_node({0, 0, 0}, "root");
    m.fix_all(prev);
    for (int i = 1; i <= n_elem; ++i) {
        int node = m.add_node({L * i / n_elem, 0, 0}, "n" + std::to_string(i));
        m.elements.push_back({prev, node, w, t, silicon()});
        prev = node;
    }
    return m;
}

int count_near_zero(const Eigen::VectorXd& eigs, double rel_tol) {
    double scale = eigs.cwiseAbs().maxCoeff();
    int n = 0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (std::abs(eigs(i)) < rel_tol * scale) ++n;
    return n;
}

// rotational DOFs carry N*m/rad entries many orders below the N/m ones;
// scaling rotations by the beam length makes the rank test meaningful
Eigen::MatrixXd length_scaled(const Eigen::MatrixXd& k,
                              const std::vector<std::pair<int, int>>& dof_map, double L) {
    Eigen::VectorXd d(k.rows());
    for (Eigen::Index i = 0; i < k.rows(); ++i)
        d(i) = dof_map[static_cast<std::size_t>(i)].second >= 3 ? 1.0 / L : 1.0;
    return d.asDiagonal() * k * d.asDiagonal();
}

}  // namespace

TEST_CASE("beam element matrices are symmetric, mass positive definite") {
    Eigen::Matrix<double, 12, 12> k, m;
    beam_element_matrices(200e-6, 4e-6, 2e-6, silicon(), k, m);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("element stiffness has exactly six rigid-body modes") {
    Eigen::Matrix<double, 12, 12> k, m;
    beam_element_matrices(200e-6, 4e-6, 2e-6, silicon(), k, m);
    std::vector<std::pair<int, int>> dofs;
    for (int node = 0; node < 2; ++node)
        for (int d = 0; d < 6; ++d) dofs.emplace_back(node, d);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(length_scaled(k, dofs, 200e-6));
    CHECK(count_near_zero(es.eigenvalues(), 1e-6) == 6);
}

TEST_CASE("single-element cantilever tip deflection matches P L^3 / 3 E I") {
    double L = 200e-6, w = 4e-6, t = 2e-6, P = 1e-6;
    SystemMatrices sys = assemble(cantilever(1, L, w, t), {}, {});
    REQUIRE(sys.n() == 6);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
    // lateral (local y) tip load
    for (std::size_t i = 0; i < sys.dof_map.size(); ++i)
        if (sys.dof_map[i].second == 1) f(static_cast<Eigen::Index>(i)) = P;
    Eigen::VectorXd u = static_solve(sys, f);
    double E = silicon().youngs_modulus;
    double Iz = t * w * w * w / 12.0;
    double expected = P * L * L * L / (3.0 * E * Iz);
    double tip = 0;
    for (std::size_t i = 0; i < sys.dof_map.size(); ++i)
        if (sys.dof_map[i].second == 1) tip = u(static_cast<Eigen::Index>(i));
    CHECK(std::abs(tip - expected) / expected < 1e-9);
}

TEST_CASE("static solve is linear and zero maps to zero") {
    SystemMatrices sys = assemble(cantilever(4, 200e-6, 4e-6, 2e-6), {}, {});
    CHECK(static_solve(sys, Eigen::VectorXd::Zero(sys.n())).norm() == 0.0);
    Eigen::VectorXd f1 = Eigen::VectorXd::Zero(sys.n());
    Eigen::VectorXd f2 = Eigen::VectorXd::Zero(sys.n());
    f1(0) = 1e-6;
    f2(3) = 2e-7;
    Eigen::VectorXd u12 = static_solve(sys, f1 + f2);
    Eigen::VectorXd sum = static_solve(sys, f1) + static_solve(sys, f2);
    CHECK((u12 - sum).norm() / sum.norm() < 1e-10);
}

TEST_CASE("one-DOF modal analysis gives f = 1/(2 pi) for m = k = 1") {
    SystemMatrices sys;
    sys.M = Eigen::MatrixXd::Identity(1, 1);
    sys.K = Eigen::MatrixXd::Identity(1, 1);
    sys.Cd = Eigen::MatrixXd::Zero(1, 1);
    sys.B = Eigen::MatrixXd::Zero(1, 1);
    sys.C = Eigen::MatrixXd::Zero(1, 1);
    sys.dof_map = {{0, 0}};
    auto modes = modal_analysis(sys, 1);
    CHECK(modes[0].frequency_hz == doctest::Approx(1.0 / (2.0 * std::acos(-1.0))).epsilon(1e-14));
    CHECK_THROWS_AS(modal_analysis(sys, 2), SemanticError);
}

TEST_CASE("ten-element cantilever first mode is within 0.1% of beam theory") {
    double L = 200e-6, w = 4e-6, t = 2e-6;
    SystemMatrices sys = assemble(cantilever(10, L, w, t), {}, {});
    auto modes = modal_analysis(sys, 3);
    double E = silicon().youngs_modulus, rho = silicon().density;
    double A = w * t;
    // lowest bending mode uses the smaller section inertia
    double Imin = std::min(t * w * w * w, w * t * t * t) / 12.0;
    double beta = 1.8751040687119611;
    double f_analytic = beta * beta / (2.0 * std::acos(-1.0)) * std::sqrt(E * Imin / (rho * A)) / (L * L);
    CHECK(std::abs(modes[0].frequency_hz - f_analytic) / f_analytic < 1e-3);
}

TEST_CASE("mode shapes are M-orthonormal") {
    SystemMatrices sys = assemble(cantilever(6, 200e-6, 4e-6, 2e-6), {}, {});
    auto modes = modal_analysis(sys, 8);
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = 0; j < modes.size(); ++j) {
            double v = modes[i].shape.transpose() * sys.M * modes[j].shape;
            CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("free-free element has six near-zero stiffness eigenvalues") {
    FeaModel m;
    int a = m.add_node({0, 0, 0}, "a");
    int b = m.add_node({200e-6, 0, 0}, "b");
    m.elements.push_back({a, b, 4e-6, 2e-6, silicon()});
    SystemMatrices sys = assemble(m, {}, {});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(length_scaled(sys.K, sys.dof_map, 200e-6));
    CHECK(count_near_zero(es.eigenvalues(), 1e-6) == 6);
    CHECK(es.eigenvalues().minCoeff() > -1e-8 * es.eigenvalues().maxCoeff());
}

TEST_CASE("assembly is element-order invariant") {
    FeaModel m1 = cantilever(5, 150e-6, 3e-6, 2e-6);
    FeaModel m2 = m1;
    std::reverse(m2.elements.begin(), m2.elements.end());
    SystemMatrices s1 = assemble(m1, {}, {});
    SystemMatrices s2 = assemble(m2, {}, {});
    CHECK((s1.K - s2.K).norm() / s1.K.norm() < 1e-14);
    CHECK((s1.M - s2.M).norm() / s1.M.norm() < 1e-14);
}

TEST_CASE("assembled matrices are symmetric and K positive semidefinite") {
    SystemMatrices sys = assemble(cantilever(5, 150e-6, 3e-6, 2e-6), {}, {}, 0.1, 1e-7);
    CHECK((sys.K - sys.K.transpose()).norm() <= 1e-12 * sys.K.norm());
    CHECK((sys.M - sys.M.transpose()).norm() <= 1e-12 * sys.M.norm());
    CHECK((sys.Cd - (0.1 * sys.M + 1e-7 * sys.K)).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.K);
    CHECK(es.eigenvalues().minCoeff() > -1e-8 * es.eigenvalues().maxCoeff());

    SystemMatrices undamped = assemble(cantilever(2, 150e-6, 3e-6, 2e-6), {}, {});
    CHECK(undamped.Cd.norm() == 0.0);
}

TEST_CASE("first modal frequency does not increase under refinement") {
    double prev = std::numeric_limits<double>::infinity();
    double f_last = 0;
    for (int refine : {1, 2, 4, 8}) {
        SystemMatrices sys = assemble(cantilever(refine, 200e-6, 4e-6, 2e-6), {}, {});
        double f = modal_analysis(sys, 1)[0].frequency_hz;
        CHECK(f <= prev * (1.0 + 1e-12));
        prev = f;
        f_last = f;
    }
    double E = silicon().youngs_modulus, rho = silicon().density;
    double Imin = std::min(4e-6 * 8e-18, 2e-6 * 6.4e-17) / 12.0;
    double f_analytic = 1.8751040687119611 * 1.8751040687119611 / (2.0 * std::acos(-1.0)) *
                        std::sqrt(E * Imin / (rho * 8e-12)) / (200e-6 * 200e-6);
    CHECK(std::abs(f_last - f_analytic) / f_analytic < 1e-4);
}

TEST_CASE("rigid links preserve total translational mass") {
    // plate master with two slaved attachment points carrying a beam between them
    FeaModel linked;
    int master = linked.add_node({0, 0, 0}, "plate");
    int s1 = linked.add_node({-50e-6, 10e-6, 0}, "s1");
    int s2 = linked.add_node({50e-6, -10e-6, 0}, "s2");
    linked.elements.push_back({s1, s2, 4e-6, 2e-6, silicon()});
    linked.point_masses.push_back({master, 1e-9, 1e-18, 1e-18, 2e-18});
    linked.rigid_links.push_back({master, s1});
    linked.rigid_links.push_back({master, s2});
    SystemMatrices reduced = assemble(linked, {}, {});

    FeaModel free_model = linked;
    free_model.rigid_links.clear();
    SystemMatrices full = assemble(free_model, {}, {});

    auto translational_sum = [](const SystemMatrices& sys, int dof) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(sys.n());
        for (std::size_t i = 0; i < sys.dof_map.size(); ++i)
            if (sys.dof_map[i].second == dof) e(static_cast<Eigen::Index>(i)) = 1.0;
        return double(e.transpose() * sys.M * e);
    };
    for (int dof : {0, 1, 2}) {
        double before = translational_sum(full, dof);
        double after = translational_sum(reduced, dof);
        CHECK(std::abs(before - after) / before < 1e-12);
    }
}

TEST_CASE("rigid-link validity checks fire") {
    FeaModel m;
    int a = m.add_node({0, 0, 0}, "a");
    int b = m.add_node({1e-6, 0, 0}, "b");
    int c = m.add_node({2e-6, 0, 0}, "c");
    m.elements.push_back({a, b, 4e-6, 2e-6, silicon()});
    m.elements.push_back({b, c, 4e-6, 2e-6, silicon()});
    m.rigid_links.push_back({a, b});
    m.rigid_links.push_back({b, c});  // chained master
    CHECK_THROWS_AS(assemble(m, {}, {}), SemanticError);
}

TEST_CASE("build_fea_model counts nodes, elements and constraints") {
    ProcessStack stack = gyro_stack();
    Netlist n = parse_netlist(
        "process \"soi\"\n"
        "material si E=160e9 nu=0.28 rho=2330\n"
        "anchor a node=(g) w=20u h=20u anchor_layer=ANCHOR pos=(0u,0u) layer=STRUCT\n"
        "beam b node=(g,n1) l=100u w=4u pos=(10u,10u) layer=STRUCT\n"
        "mass m node=(n1) w=80u h=80u pos=(110u,0u) layer=STRUCT\n");
    FeaModel model = build_fea_model(n, stack, 1);
    CHECK(model.elements.size() == 1);
    CHECK(model.fixed_dofs.size() == 6);
    CHECK(model.rigid_links.size() == 1);
    CHECK(model.find_node("m") >= 0);  // mass master is addressable by name

    FeaModel refined = build_fea_model(n, stack, 4);
    CHECK(refined.elements.size() == 4);

    // a mass with four attached beams grows one master and four links
    Netlist quad = gyro_netlist();
    FeaModel gm = build_fea_model(quad, stack, 1);
    int links_m1 = 0;
    int master = gm.find_node("m1");
    for (const RigidLinkDef& l : gm.rigid_links)
        if (l.master == master) ++links_m1;
    CHECK(links_m1 == 4);
}

TEST_CASE("ten-folded suspension meshes into the expected element count") {
    ProcessStack stack = accel_stack();
    ExtractionReport er = layout_to_netlist(accel_layout(), stack, demo_rules());
    REQUIRE(er.unrecognized.empty());
    // ten segments plus nine links per fold chain
    CHECK(er.recognized.count_kind(ComponentKind::Beam) == 19);
    FeaModel m1 = build_fea_model(er.recognized, stack, 1);
    CHECK(m1.elements.size() == 19);
    FeaModel m2 = build_fea_model(er.recognized, stack, 2);
    CHECK(m2.elements.size() == 38);
}

TEST_CASE("a structure with no anchored component is rejected") {
    ProcessStack stack = gyro_stack();
    Netlist n = parse_netlist(
        "process \"soi\"\n"
        "material si E=160e9 nu=0.28 rho=2330\n"
        "beam b node=(n1,n2) l=100u w=4u pos=(10u,10u) layer=STRUCT\n"
        "mass m node=(n2) w=80u h=80u pos=(110u,0u) layer=STRUCT\n"
        "mass m2 node=(n1) w=80u h=80u pos=(-190u,0u) layer=STRUCT\n");
    CHECK_THROWS_WITH_AS(build_fea_model(n, stack, 1), doctest::Contains("no anchor"),
                         SemanticError);
}

TEST_CASE("system export and import round-trip exactly") {
    ProcessStack stack = gyro_stack();
    FeaModel model = build_fea_model(gyro_netlist(), stack, 1);
    SystemMatrices sys = assemble(model, {{"m1", 0, 1.0}}, {{"m1", 0, 1.0}}, 0.0, 1e-9);

    std::string prefix = (std::filesystem::temp_directory_path() / "mems_fea_rt").string();
    export_system(sys, prefix);
    SystemMatrices back = import_system(prefix);
    CHECK(back.M == sys.M);
    CHECK(back.K == sys.K);
    CHECK(back.Cd == sys.Cd);
    CHECK(back.B == sys.B);
    CHECK(back.C == sys.C);
    REQUIRE(back.dof_map.size() == sys.dof_map.size());
    for (std::size_t i = 0; i < sys.dof_map.size(); ++i) {
        auto [n1, d1] = sys.dof_map[i];
        auto [n2, d2] = back.dof_map[i];
        CHECK(d1 == d2);
        CHECK(sys.node_names[static_cast<std::size_t>(n1)] ==
              back.node_names[static_cast<std::size_t>(n2)]);
    }
}
