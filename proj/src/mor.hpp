#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "fea.hpp"

namespace mems {

/// First-order realization x' = A x + b u, y = C x.
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::MatrixXd c;  // p x N
    Eigen::Index n() const { return A.rows(); }
};

/// Second-order mechanics to first order with state (u, u'):
///   A = [[0, I], [-M^-1 K, -M^-1 Cd]]
/// realized through factored solves, never an explicit inverse; the block
/// residual must reach 1e-10. Requires a single input column.
StateSpace to_first_order(const SystemMatrices& sys);

/// Same transfer function in modal coordinates, state (L^1/2 q, q') with
/// K phi = M phi L. Use this one for stiff assemblies: |A| equals the top
/// angular frequency instead of its square, and with Rayleigh damping the
/// realization is dissipative, so any orthonormal Galerkin reduction of it
/// stays stable. Requires positive-definite K (an anchored structure).
StateSpace to_first_order_modal(const SystemMatrices& sys);

struct ArnoldiBasis {
    Eigen::MatrixXd V;       // N x k, orthonormal columns
    Eigen::MatrixXd H;       // (k+1) x k, or k x k after happy breakdown
    Eigen::VectorXd v_next;  // the (k+1)-th vector closing A V = [V v_next] H
    int k = 0;
    bool breakdown = false;
};

/// Krylov basis of span{v0, A v0, ..., A^(q-1) v0} with v0 = b/|b|.
/// Each step orthogonalizes A v_j by modified Gram-Schmidt with one full
/// reorthogonalization pass. A residual below deflation_tol * |A v_j|
/// is a happy breakdown: the basis spans an invariant subspace and a
/// smaller exact model is returned (so q may exceed the reachable order).
ArnoldiBasis arnoldi(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply_op,
                     const Eigen::VectorXd& b, int q, double deflation_tol = 1e-12);

enum class ReductionMode { Direct, ShiftInvert };

struct ReducedModel {
    Eigen::MatrixXd A_r;
    Eigen::VectorXd b_r;
    Eigen::MatrixXd c_r;  // p x q
    Eigen::MatrixXd V;    // N x q basis used
    ReductionMode mode = ReductionMode::Direct;
    double s0 = 0;
    bool breakdown = false;
    Eigen::Index q() const { return A_r.rows(); }
};

/// Projection A_r = V^T A V, b_r = V^T b, c_r = c V onto the Krylov basis.
/// Direct mode matches the first k Markov parameters c A^j b; shift-invert
/// mode runs the iteration on (A - s0 I)^-1 (factored once) from the
/// starting vector (A - s0 I)^-1 b and matches the first k moments about s0.
ReducedModel reduce(const StateSpace& ss, int q, ReductionMode mode, double s0 = 0);

/// Produces the full-order model as a ReducedModel with V = I (the q = N
/// identity "reduction"); embeds unreduced systems where macromodels go.
ReducedModel identity_model(const StateSpace& ss);

/// H(s) = c (sI - A)^-1 b evaluated by complex linear solves, one entry per
/// output row.
std::vector<Eigen::VectorXcd> transfer_function(const Eigen::MatrixXd& A,
                                                const Eigen::VectorXd& b,
                                                const Eigen::MatrixXd& c,
                                                const std::vector<std::complex<double>>& s);
std::vector<Eigen::VectorXcd> transfer_function(const StateSpace& ss,
                                                const std::vector<std::complex<double>>& s);
std::vector<Eigen::VectorXcd> transfer_function(const ReducedModel& rm,
                                                const std::vector<std::complex<double>>& s);

/// Reduced-model bundle: Matrix Market array files for A_r, b_r, c_r and a
/// manifest recording q, mode, s0 and the source dof map.
void export_reduced(const ReducedModel& rm, const SystemMatrices* source,
                    const std::string& prefix);
ReducedModel import_reduced(const std::string& prefix);

}  // namespace mems
