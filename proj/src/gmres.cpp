#include "ttkry/gmres.hpp"

#include <stdexcept>

namespace ttkry {

double relax_schedule(double eps, double computed_resid_rel, const SolverConfig& cfg) {
    if (!(computed_resid_rel > 0.0))
        throw std::invalid_argument("relax_schedule: computed residual must be positive");
    if (!cfg.relaxation) return eps;
    return std::min(cfg.delta_cap, eps / computed_resid_rel);
}

LsqSolution hessenberg_lsq(const HessenbergLS& ls) {
    const Index rows = ls.hbar.rows();
    const Index cols = ls.hbar.cols();
    if (cols < 1 || rows != cols + 1)
        throw std::invalid_argument("hessenberg_lsq: matrix must be (j+1) x j");
    Vector rhs = Vector::Zero(rows);
    rhs(0) = ls.beta;

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ls.hbar);
    LsqSolution out;
    out.y = cod.solve(rhs);
    out.rank_deficient = cod.rank() < cols;
    out.computed_resid = (rhs - ls.hbar * out.y).norm();
    return out;
}

}  // namespace ttkry
