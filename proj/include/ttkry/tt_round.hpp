#pragma once

#include <limits>
#include <span>

#include "ttkry/tt_arith.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry {

/// How the relative tolerance is split across the d-1 truncation steps.
enum class LocalPolicy {
    split_sqrt,  // eps / sqrt(d-1): tight budget for orthogonal increments
    split_d      // eps / d: matches the worst-case linear accumulation
};

/// Parameters of every truncation call.
struct TruncationSpec {
    double eps = 1e-12;
    Index rmax = std::numeric_limits<Index>::max();
    LocalPolicy local_policy = LocalPolicy::split_sqrt;
};

/// Truncation to quasi-minimal ranks: right-to-left QR orthogonalization
/// followed by a left-to-right SVD truncation sweep. Guarantees
/// ||result - t||_F <= eps * ||t||_F when rmax does not bind; ranks never
/// increase. A zero tensor returns the canonical rank-one zero immediately.
TTTensor round(const TTTensor& t, const TruncationSpec& spec);

/// Operator truncation; row and column indices of each core are fused and
/// the tensor sweep applied.
TTMatrix round_matrix(const TTMatrix& a, const TruncationSpec& spec);

/// One summand of a linear combination.
struct ScaledTensor {
    double coeff;
    const TTTensor* tensor;
};

/// round() applied to the exact linear combination sum_i coeff_i * t_i.
/// Equivalent to rounding the formal block sum, but the intermediate
/// representation is reduced from both ends before any core mixing, so
/// memory stays linear in the number of summands.
TTTensor rounded_sum(std::span<const ScaledTensor> terms, const TruncationSpec& spec);

/// round(matvec(a, x), spec).
TTTensor rounded_matvec(const TTMatrix& a, const TTTensor& x, const TruncationSpec& spec);

/// Sequentially rounded preconditioned product round(m * round(a * v)).
TTTensor preconditioned_matvec(const TTMatrix& m, const TTMatrix& a, const TTTensor& v,
                               const TruncationSpec& spec);

}  // namespace ttkry
