#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ttkry/dense_tensor.hpp"

namespace ttkry {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixMap = Eigen::Map<Matrix>;
using ConstMatrixMap = Eigen::Map<const Matrix>;

/// Hard cap on any TT rank produced by an operation. Operations that would
/// exceed it throw instead of exhausting memory.
Index rank_guard();
void set_rank_guard(Index cap);

/// Order-3 core of a TT tensor, extent r_left x n x r_right, stored
/// contiguously with the first index fastest. Both standard unfoldings are
/// plain reinterpretations of the same buffer.
struct Core3 {
    Index r_left = 0, n = 0, r_right = 0;
    std::vector<double> data;

    Core3() = default;
    Core3(Index rl, Index nn, Index rr)
        : r_left(rl), n(nn), r_right(rr),
          data(static_cast<std::size_t>(rl * nn * rr), 0.0) {}

    double& operator()(Index a, Index i, Index b) {
        return data[static_cast<std::size_t>(a + r_left * (i + n * b))];
    }
    double operator()(Index a, Index i, Index b) const {
        return data[static_cast<std::size_t>(a + r_left * (i + n * b))];
    }

    /// (r_left*n) x r_right view.
    MatrixMap left_unfold() { return MatrixMap(data.data(), r_left * n, r_right); }
    ConstMatrixMap left_unfold() const {
        return ConstMatrixMap(data.data(), r_left * n, r_right);
    }
    /// r_left x (n*r_right) view.
    MatrixMap right_unfold() { return MatrixMap(data.data(), r_left, n * r_right); }
    ConstMatrixMap right_unfold() const {
        return ConstMatrixMap(data.data(), r_left, n * r_right);
    }
    /// r_left x r_right slice for a fixed mode index i.
    Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> slice(Index i) const {
        return {data.data() + r_left * i, r_left, r_right,
                Eigen::OuterStride<>(r_left * n)};
    }
};

/// Order-4 core of a TT operator, extent r_left x m x n x r_right (row mode
/// m, column mode n), first index fastest.
struct Core4 {
    Index r_left = 0, m = 0, n = 0, r_right = 0;
    std::vector<double> data;

    Core4() = default;
    Core4(Index rl, Index mm, Index nn, Index rr)
        : r_left(rl), m(mm), n(nn), r_right(rr),
          data(static_cast<std::size_t>(rl * mm * nn * rr), 0.0) {}

    double& operator()(Index a, Index i, Index j, Index b) {
        return data[static_cast<std::size_t>(a + r_left * (i + m * (j + n * b)))];
    }
    double operator()(Index a, Index i, Index j, Index b) const {
        return data[static_cast<std::size_t>(a + r_left * (i + m * (j + n * b)))];
    }
};

/// Tensor in TT form: element(i_1..i_d) = G_1(i_1) ... G_d(i_d) with
/// boundary ranks r_0 = r_d = 1.
struct TTTensor {
    std::vector<Core3> cores;

    TTTensor() = default;
    explicit TTTensor(std::vector<Core3> c) : cores(std::move(c)) {}

    Index dim() const { return static_cast<Index>(cores.size()); }
    Shape shape() const;
    /// r_0..r_d.
    std::vector<Index> ranks() const;
    Index max_rank() const;
    const Core3& core(Index k) const { return cores[static_cast<std::size_t>(k)]; }
    Core3& core(Index k) { return cores[static_cast<std::size_t>(k)]; }
};

/// Linear operator in TT form; core k carries a row index of size m_k and a
/// column index of size n_k.
struct TTMatrix {
    std::vector<Core4> cores;

    TTMatrix() = default;
    explicit TTMatrix(std::vector<Core4> c) : cores(std::move(c)) {}

    Index dim() const { return static_cast<Index>(cores.size()); }
    Shape row_shape() const;
    Shape col_shape() const;
    std::vector<Index> ranks() const;
    Index max_rank() const;
    const Core4& core(Index k) const { return cores[static_cast<std::size_t>(k)]; }
    Core4& core(Index k) { return cores[static_cast<std::size_t>(k)]; }
};

/// Diagnostic invariant check; never throws. Returns std::nullopt when all
/// type invariants hold, otherwise a description naming the first violated
/// invariant and the core index.
std::optional<std::string> validate(const TTTensor& t);
std::optional<std::string> validate(const TTMatrix& a);

/// Single entry G_1(i_1)...G_d(i_d), evaluated as a chain of vector-matrix
/// products. Throws std::out_of_range for a bad index.
double element(const TTTensor& t, std::span<const Index> idx);

/// Dense reconstruction. Guarded: throws if the tensor has more than
/// max_elements entries (default 1e7).
DenseTensor full(const TTTensor& t, Index max_elements = 10'000'000);

/// Canonical rank-one zero tensor.
TTTensor tt_zeros(const Shape& shape);
/// Rank-one all-ones tensor.
TTTensor tt_ones(const Shape& shape);
/// Rank-one tensor from the outer product of d vectors.
TTTensor tt_rank_one(const std::vector<std::vector<double>>& factors);
/// TT tensor with i.i.d. N(0,1) core entries and the given interior ranks
/// (clipped to the maximal meaningful rank of each unfolding).
TTTensor tt_random(const Shape& shape, Index rank, std::mt19937_64& rng);
TTTensor tt_random(const Shape& shape, const std::vector<Index>& interior_ranks,
                   std::mt19937_64& rng);

/// Rank-one identity operator.
TTMatrix tt_identity(const Shape& shape);

/// One Kronecker-product term: coefficient * F_1 (x) ... (x) F_d. Factor k
/// acts on mode k; consistent with the first-index-fastest linearization,
/// the dense matricization has row multi-index (i_1..i_d) with i_1 fastest.
struct KronTerm {
    double coefficient = 1.0;
    std::vector<Matrix> factors;
};

/// Operator equal to the sum of Kronecker-product terms. Formal TT ranks
/// equal the number of terms; no rounding is applied here.
TTMatrix tt_matrix_from_kron(const std::vector<KronTerm>& terms);

}  // namespace ttkry
