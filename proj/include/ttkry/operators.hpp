#pragma once

#include "ttkry/tt_round.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// Uniform 1D grid with n interior points on [-1,1]; h = 2/(n+1) is the
/// actual mesh width between neighboring nodes and is what every stencil
/// divides by, keeping the discretization consistent with the node
/// coordinates (the benchmark iteration counts pin this choice).
struct Grid1D {
    Index n;
    double h;

    explicit Grid1D(Index n_) : n(n_), h(2.0 / static_cast<double>(n_ + 1)) {
        if (n < 2) throw std::invalid_argument("Grid1D: need n >= 2");
    }

    /// Interior node coordinates on [-1,1].
    std::vector<double> nodes() const;
    /// Cell-face (midpoint) coordinates on [-1,1]; n+1 values.
    std::vector<double> faces() const;
};

/// Second-difference stencil (-1, 2, -1)/h^2 with Dirichlet truncation
/// (the positive-definite discrete Laplacian).
Matrix laplace_1d(const Grid1D& g);

/// Central first-difference stencil (-0.5, 0, 0.5)/h.
Matrix grad_1d(const Grid1D& g);

/// 3D convection-diffusion operator over shape (n, n, n): alpha times the
/// Kronecker-sum Laplacian plus the recirculating wind
/// 2y(1-x^2) d/dx - 2x(1-y^2) d/dy, coefficients sampled at the nodes.
/// Rounded at 1e-12; TT ranks bounded by 4.
TTMatrix conv_diff_3d(Index n, double alpha);

/// Right-hand side from lifting the boundary condition u = 1 on the y = 1
/// face (ghost-node elimination); at most rank 2 by construction.
TTTensor conv_diff_rhs(Index n, double alpha);

/// Exponential-sum quadrature for the inverse of the d-dimensional
/// Kronecker-sum Laplacian: sum over k in [-M, M] of c_k (x)_p exp(-t_k L),
/// t_k = exp(k pi/sqrt(M)), c_k = t_k pi/sqrt(M). The 1D exponentials are
/// evaluated via the analytic sine eigenbasis. Result is rounded at 1e-12
/// and approximates the inverse as a positive operator.
TTMatrix inv_laplace_expsum(Index n, Index d, Index m_quad);

/// Affine diffusion coefficient a(x, y) = 1 + sum_j y_j sin(pi j x)/(2(j+1)^2)
/// sampled at the x faces and a uniform parameter grid on [-1, 1] including
/// the endpoints; shape (nx+1, ny, ..., ny) with d parameter modes. Rounded
/// at 1e-12, ranks <= d+1.
TTTensor kl_coefficient(Index nx, Index ny, Index d);

/// Conservative finite-difference stiffness of the affine coefficient:
/// Gamma(a_0) (x) I ... + sum_j Gamma(sqrt(l_j) a_j) (x) diag(y_j in slot j).
/// d = 0 degenerates to the plain 1D Laplacian. Formal TT rank <= d+1.
TTMatrix kl_stiffness(Index nx, Index ny, Index d);

/// Stiffness operator of an arbitrary coefficient given as a TT tensor over
/// (nx+1 faces, parameter grids): mode one maps face samples through the
/// conservative stencil, parameter modes act diagonally.
TTMatrix stiffness_from_coefficient(const TTTensor& coeff, double h);

struct NewtonResult {
    TTTensor value;
    bool converged = false;
    Index iterations = 0;
    double residual = 0.0;  // ||a . x - 1|| / ||1||
};

/// Pointwise reciprocal by Newton iteration x <- x . (2 - a . x) from
/// x0 = ones, each update truncated per spec. Requires min a > 0 and the
/// start inside the basin; throws on divergence (residual growing three
/// times in a row), flags non-convergence at maxit.
NewtonResult newton_reciprocal(const TTTensor& a, const TruncationSpec& spec,
                               Index maxit = 50);

/// Two-sided inverse-Laplacian preconditioner for the parametric problem:
/// v -> T(Dinv T(Gamma(1/a) T(Dinv v))), every stage rounded at the caller's
/// tolerance. Dinv is the exponential-sum inverse in the x slot tensored
/// with parameter identities.
struct P2Preconditioner {
    TTMatrix inv_laplace;   // rank-1 across parameter modes
    TTMatrix gamma_recip;   // stiffness of the Newton reciprocal
    NewtonResult newton;    // reciprocal diagnostics
    Index rmax = std::numeric_limits<Index>::max();

    TTTensor apply(const TTTensor& v, double tol) const;
};

P2Preconditioner p2_preconditioner(Index nx, Index ny, Index d,
                                   const TruncationSpec& spec, Index m_quad = 36);

}  // namespace ttkry
