#include "mor.hpp"

#include <filesystem>
#include <map>
#include <sstream>

#include "mmio.hpp"

namespace mems {

StateSpace to_first_order(const SystemMatrices& sys) {
    const Eigen::Index n = sys.n();
    if (sys.B.cols() != 1)
        throw SemanticError("to_first_order expects a single input column (b is one vector)");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(sys.M(i, i) > 0)) throw SemanticError("mass matrix is not positive definite");

    // Equilibrate by diag(M)^(1/2) first: mixed translation/rotation units
    // can push cond(M) past 1e12, which would turn the M^-1 K block into
    // noise. The diagonal congruence leaves the transfer function, spectrum
    // and every low-order case (where diag(M) is the identity scale) intact.
    Eigen::VectorXd d = sys.M.diagonal().cwiseSqrt();
    Eigen::VectorXd dinv = d.cwiseInverse();
    Eigen::MatrixXd ms = dinv.asDiagonal() * sys.M * dinv.asDiagonal();
    Eigen::MatrixXd ks = dinv.asDiagonal() * sys.K * dinv.asDiagonal();
    Eigen::MatrixXd cs = dinv.asDiagonal() * sys.Cd * dinv.asDiagonal();

    Eigen::LDLT<Eigen::MatrixXd> mfac(ms);
    if (mfac.info() != Eigen::Success || !mfac.isPositive())
        throw SemanticError("mass matrix is not positive definite");

    Eigen::MatrixXd mk = mfac.solve(ks);
    Eigen::MatrixXd mc = mfac.solve(cs);
    // numerical contract: the factored solves must actually reproduce the blocks
    double scale_k = ks.norm();
    double scale_c = cs.norm();
    if ((ms * mk - ks).norm() > 1e-10 * (scale_k > 0 ? scale_k : 1.0))
        throw SemanticError("M-solve residual for the K block exceeds 1e-10");
    if (scale_c > 0 && (ms * mc - cs).norm() > 1e-10 * scale_c)
        throw SemanticError("M-solve residual for the Cd block exceeds 1e-10");

    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.A.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    ss.A.bottomLeftCorner(n, n) = -mk;
    ss.A.bottomRightCorner(n, n) = -mc;

    ss.b = Eigen::VectorXd::Zero(2 * n);
    ss.b.tail(n) = mfac.solve(Eigen::VectorXd(dinv.asDiagonal() * sys.B.col(0)));

    ss.c = Eigen::MatrixXd::Zero(sys.C.rows(), 2 * n);
    ss.c.leftCols(n) = sys.C * dinv.asDiagonal();
    return ss;
}

StateSpace to_first_order_modal(const SystemMatrices& sys) {
    const Eigen::Index n = sys.n();
    if (sys.B.cols() != 1)
        throw SemanticError("to_first_order_modal expects a single input column");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(sys.M(i, i) > 0)) throw SemanticError("mass matrix is not positive definite");

    // equilibrate, then diagonalize the pencil (K, M)
    Eigen::VectorXd d = sys.M.diagonal().cwiseSqrt();
    Eigen::VectorXd dinv = d.cwiseInverse();
    Eigen::MatrixXd ms = dinv.asDiagonal() * sys.M * dinv.asDiagonal();
    Eigen::MatrixXd ks = dinv.asDiagonal() * sys.K * dinv.asDiagonal();
    Eigen::MatrixXd cs = dinv.asDiagonal() * sys.Cd * dinv.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ks, ms);
    if (es.info() != Eigen::Success)
        throw SemanticError("modal realization failed (mass not positive definite?)");
    Eigen::VectorXd lambda = es.eigenvalues();
    if (!(lambda.minCoeff() > 0))
        throw SemanticError("modal realization requires positive-definite K (anchored structure)");
    const Eigen::MatrixXd& phi = es.eigenvectors();  // phi^T Ms phi = I
    Eigen::VectorXd omega = lambda.cwiseSqrt();

    Eigen::MatrixXd c_modal = phi.transpose() * cs * phi;
    Eigen::VectorXd b_modal = phi.transpose() * (dinv.asDiagonal() * sys.B.col(0));
    Eigen::MatrixXd out_modal = sys.C * (dinv.asDiagonal() * phi);

    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.A.topRightCorner(n, n) = omega.asDiagonal();
    ss.A.bottomLeftCorner(n, n) = -Eigen::MatrixXd(omega.asDiagonal());
    ss.A.bottomRightCorner(n, n) = -c_modal;
    ss.b = Eigen::VectorXd::Zero(2 * n);
    ss.b.tail(n) = b_modal;
    ss.c = Eigen::MatrixXd::Zero(sys.C.rows(), 2 * n);
    ss.c.leftCols(n) = out_modal * omega.cwiseInverse().asDiagonal();
    return ss;
}

ArnoldiBasis arnoldi(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_op,
                     const Eigen::VectorXd& b, int q, double deflation_tol) {
    if (q < 1) throw SemanticError("reduction order q must be >= 1");
    double bn = b.norm();
    if (bn == 0.0) throw SemanticError("Arnoldi starting vector is zero");
    const Eigen::Index n = b.size();

    // q beyond the reachable subspace simply ends in a happy breakdown
    Eigen::MatrixXd V(n, q);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(q + 1, q);
    V.col(0) = b / bn;

    int k = q;
    bool breakdown = false;
    Eigen::VectorXd v_next;
    for (int j = 0; j < q; ++j) {
        Eigen::VectorXd w = apply_op(V.col(j));
        double aw_norm = w.norm();
        // modified Gram-Schmidt, then one full reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                double h = V.col(i).dot(w);
                w -= h * V.col(i);
                H(i, j) += h;
            }
        }
        double wn = w.norm();
        H(j + 1, j) = wn;
        if (wn <= deflation_tol * aw_norm || aw_norm == 0.0) {
            k = j + 1;
            breakdown = true;
            break;
        }
        if (j + 1 < q) {
            V.col(j + 1) = w / wn;
        } else {
            v_next = w / wn;
        }
    }

    ArnoldiBasis basis;
    basis.k = k;
    basis.breakdown = breakdown;
    basis.V = V.leftCols(k);
    basis.H = breakdown ? Eigen::MatrixXd(H.topLeftCorner(k, k))
                        : Eigen::MatrixXd(H.topLeftCorner(k + 1, k));
    basis.v_next = v_next;
    return basis;
}

namespace {

ReducedModel project(const StateSpace& ss, const ArnoldiBasis& basis, ReductionMode mode,
                     double s0) {
    ReducedModel rm;
    rm.V = basis.V;
    rm.A_r = basis.V.transpose() * ss.A * basis.V;
    rm.b_r = basis.V.transpose() * ss.b;
    rm.c_r = ss.c * basis.V;
    rm.mode = mode;
    rm.s0 = s0;
    rm.breakdown = basis.breakdown;
    return rm;
}

}  // namespace

ReducedModel reduce(const StateSpace& ss, int q, ReductionMode mode, double s0) {
    if (q > ss.n()) throw SemanticError("reduction order q exceeds state dimension");
    if (mode == ReductionMode::Direct) {
        auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return ss.A * x; };
        return project(ss, arnoldi(apply, ss.b, q), mode, s0);
    }
    Eigen::MatrixXd shifted = ss.A - s0 * Eigen::MatrixXd::Identity(ss.n(), ss.n());
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    Eigen::VectorXd v0 = lu.solve(ss.b);
    v0 += lu.solve(ss.b - shifted * v0);
    // backward-error test: survives wide scale disparity, fails on true
    // singularity
    double denom = shifted.norm() * v0.norm() + ss.b.norm();
    double rel = (shifted * v0 - ss.b).norm() / (denom > 0 ? denom : 1.0);
    if (!(rel < 1e-10))
        throw SemanticError("shifted matrix (A - s0 I) is singular at s0 = " + format_double(s0));
    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y = lu.solve(x);
        y += lu.solve(x - shifted * y);
        return y;
    };
    return project(ss, arnoldi(apply, v0, q), mode, s0);
}

ReducedModel identity_model(const StateSpace& ss) {
    ReducedModel rm;
    rm.V = Eigen::MatrixXd::Identity(ss.n(), ss.n());
    rm.A_r = ss.A;
    rm.b_r = ss.b;
    rm.c_r = ss.c;
    rm.mode = ReductionMode::Direct;
    rm.s0 = 0;
    return rm;
}

std::vector<Eigen::VectorXcd> transfer_function(const Eigen::MatrixXd& A,
                                                const Eigen::VectorXd& b,
                                                const Eigen::MatrixXd& c,
                                                const std::vector<std::complex<double>>& s) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
    Eigen::VectorXcd bc = b.cast<std::complex<double>>();
    Eigen::MatrixXcd cc = c.cast<std::complex<double>>();
    std::vector<Eigen::VectorXcd> out;
    out.reserve(s.size());
    for (const std::complex<double>& sk : s) {
        Eigen::MatrixXcd m = sk * Eigen::MatrixXcd::Identity(n, n) - Ac;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        Eigen::VectorXcd x = lu.solve(bc);
        x += lu.solve(bc - m * x);
        double denom = m.norm() * x.norm() + bc.norm();
        double rel = (m * x - bc).norm() / (denom > 0 ? denom : 1.0);
        if (!(rel < 1e-10))
            throw SemanticError("(sI - A) is singular at s = " + format_double(sk.real()) + "+" +
                                format_double(sk.imag()) + "i");
        out.push_back(cc * x);
    }
    return out;
}

std::vector<Eigen::VectorXcd> transfer_function(const StateSpace& ss,
                                                const std::vector<std::complex<double>>& s) {
    return transfer_function(ss.A, ss.b, ss.c, s);
}

std::vector<Eigen::VectorXcd> transfer_function(const ReducedModel& rm,
                                                const std::vector<std::complex<double>>& s) {
    return transfer_function(rm.A_r, rm.b_r, rm.c_r, s);
}

void export_reduced(const ReducedModel& rm, const SystemMatrices* source,
                    const std::string& prefix) {
    std::string base = std::filesystem::path(prefix).filename().string();
    write_matrix_market_array(prefix + ".A.mm", rm.A_r);
    write_matrix_market_array(prefix + ".b.mm", rm.b_r);
    write_matrix_market_array(prefix + ".c.mm", rm.c_r);

    std::ostringstream os;
    os << "memsflow-mor 1\n";
    os << "q " << rm.q() << "\n";
    os << "mode " << (rm.mode == ReductionMode::Direct ? "direct" : "shift_invert") << "\n";
    os << "s0 " << format_double(rm.s0) << "\n";
    os << "p " << rm.c_r.rows() << "\n";
    os << "breakdown " << (rm.breakdown ? 1 : 0) << "\n";
    os << "matrix A " << base << ".A.mm\n";
    os << "matrix b " << base << ".b.mm\n";
    os << "matrix c " << base << ".c.mm\n";
    if (source) {
        os << "source_n " << source->n() << "\n";
        static const char* dof_names[6] = {"ux", "uy", "uz", "rx", "ry", "rz"};
        for (std::size_t i = 0; i < source->dof_map.size(); ++i) {
            auto [node, dof] = source->dof_map[i];
            std::string name = node < static_cast<int>(source->node_names.size()) &&
                                       !source->node_names[node].empty()
                                   ? source->node_names[node]
                                   : ("#" + std::to_string(node));
            os << "dof " << i << " " << name << " " << dof_names[dof] << "\n";
        }
    }
    write_text_file_atomic(prefix + ".manifest", os.str());
}

ReducedModel import_reduced(const std::string& prefix) {
    std::filesystem::path dir = std::filesystem::path(prefix).parent_path();
    std::istringstream is(read_text_file(prefix + ".manifest"));
    std::string line;
    if (!std::getline(is, line) || line != "memsflow-mor 1")
        throw ParseError(prefix + ".manifest: bad manifest header");

    ReducedModel rm;
    std::map<std::string, std::string> files;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "matrix") {
            std::string which, file;
            ls >> which >> file;
            files[which] = (dir / file).string();
        } else if (key == "mode") {
            std::string mode;
            ls >> mode;
            if (mode == "direct") rm.mode = ReductionMode::Direct;
            else if (mode == "shift_invert") rm.mode = ReductionMode::ShiftInvert;
            else throw ParseError(prefix + ".manifest: unknown mode '" + mode + "'");
        } else if (key == "s0") {
            ls >> rm.s0;
        } else if (key == "breakdown") {
            int v = 0;
            ls >> v;
            rm.breakdown = v != 0;
        }
    }
    for (const char* which : {"A", "b", "c"})
        if (!files.count(which))
            throw ParseError(prefix + ".manifest: missing matrix entry for " + std::string(which));
    rm.A_r = read_matrix_market(files["A"]);
    Eigen::MatrixXd b = read_matrix_market(files["b"]);
    if (b.cols() != 1) throw ParseError(prefix + ": b must be a column vector");
    rm.b_r = b.col(0);
    rm.c_r = read_matrix_market(files["c"]);
    rm.V.resize(0, 0);  // the basis itself is not part of the bundle
    return rm;
}

}  // namespace mems
