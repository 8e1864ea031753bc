#pragma once

#include "ttkry/dense_tensor.hpp"
#include "ttkry/gmres.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry::oracle {

/// Square dense matrix over the flattened index space, together with the
/// shapes it acts between. Brute-force reference only; sizes are guarded.
struct DenseOperator {
    Matrix mat;
    Shape row_shape;
    Shape col_shape;

    Vector apply(const Vector& v) const { return mat * v; }
};

/// Exact dense matricization of a TT operator, consistent with the
/// first-index-fastest linearization. Throws when the flattened dimension
/// exceeds the guard.
DenseOperator dense_from_tt(const TTMatrix& a, Index guard_dim = 4096);

/// Dense Kronecker product of the given factors where factor 1 owns the
/// fastest index, matching the library linearization (so this is the dense
/// counterpart of a rank-one TT operator with the same factors).
Matrix kron_product(const std::vector<Matrix>& factors);

/// vec(full(t)) as a dense vector.
Vector dense_vector(const TTTensor& t, Index guard = 10'000'000);

/// Textbook restarted GMRES in exact dense arithmetic, written independently
/// of the generic driver; reference for residual histories.
std::pair<Vector, ConvergenceRecord> dense_gmres(const DenseOperator& a, const Vector& b,
                                                 const Vector& x0, const SolverConfig& cfg);

struct BestRankError {
    double lower_bound = 0.0;  // max over unfoldings of the discarded SVD tail
    double achieved = 0.0;     // error of the sequential-SVD decomposition at the caps
};

/// Reference for rank-capped approximation quality: for each unfolding the
/// Frobenius tail beyond the requested rank (their max is a valid lower
/// bound on the best TT error), plus the achieved sequential-SVD error.
BestRankError best_rank_error(const DenseTensor& x, std::span<const Index> ranks,
                              Index guard = 10'000'000);

}  // namespace ttkry::oracle
