#include "ttkry/tt_arith.hpp"

#include <cmath>
#include <stdexcept>

namespace ttkry {

namespace {

void require_same_shape(const TTTensor& a, const TTTensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                    a.shape().to_string() + " vs " + b.shape().to_string());
}

void check_result_ranks(Index r, const char* op) {
    if (r > rank_guard())
        throw std::runtime_error(std::string(op) + ": resulting rank " + std::to_string(r) +
                                 " exceeds rank guard " + std::to_string(rank_guard()));
}

}  // namespace

TTTensor add(const TTTensor& a, const TTTensor& b) {
    require_same_shape(a, b, "add");
    const Index d = a.dim();
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        const Core3& ca = a.core(k);
        const Core3& cb = b.core(k);
        const Index rl = (k == 0) ? 1 : ca.r_left + cb.r_left;
        const Index rr = (k == d - 1) ? 1 : ca.r_right + cb.r_right;
        check_result_ranks(std::max(rl, rr), "add");
        Core3 c(rl, ca.n, rr);
        const Index ob_l = (k == 0) ? 0 : ca.r_left;   // row offset of b's block
        const Index ob_r = (k == d - 1) ? 0 : ca.r_right;
        for (Index i = 0; i < ca.n; ++i) {
            for (Index bb = 0; bb < ca.r_right; ++bb)
                for (Index aa = 0; aa < ca.r_left; ++aa) c(aa, i, bb) += ca(aa, i, bb);
            for (Index bb = 0; bb < cb.r_right; ++bb)
                for (Index aa = 0; aa < cb.r_left; ++aa)
                    c(ob_l + aa, i, ob_r + bb) += cb(aa, i, bb);
        }
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor scale(const TTTensor& a, double c) {
    TTTensor out = a;
    for (auto& x : out.cores.front().data) x *= c;
    return out;
}

TTTensor sub(const TTTensor& a, const TTTensor& b) { return add(a, scale(b, -1.0)); }

double dot(const TTTensor& a, const TTTensor& b) {
    require_same_shape(a, b, "dot");
    const Index d = a.dim();
    // Interface matrix W of extent r_a x r_b, contracted left to right.
    Matrix w = Matrix::Ones(1, 1);
    for (Index k = 0; k < d; ++k) {
        const Core3& ca = a.core(k);
        const Core3& cb = b.core(k);
        // T = W^T * right_unfold(a): (r_b x n*r_a'); the column-major merge
        // of (r_b, n) then gives ((r_b*n) x r_a') for free.
        Matrix t = w.transpose() * ca.right_unfold();
        MatrixMap t2(t.data(), cb.r_left * ca.n, ca.r_right);
        w = t2.transpose() * cb.left_unfold();  // (r_a' x r_b')
    }
    return w(0, 0);
}

double norm(const TTTensor& a) {
    const double s = dot(a, a);
    return std::sqrt(std::max(s, 0.0));
}

TTTensor hadamard(const TTTensor& a, const TTTensor& b) {
    require_same_shape(a, b, "hadamard");
    const Index d = a.dim();
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        const Core3& ca = a.core(k);
        const Core3& cb = b.core(k);
        const Index rl = ca.r_left * cb.r_left;
        const Index rr = ca.r_right * cb.r_right;
        check_result_ranks(std::max(rl, rr), "hadamard");
        Core3 c(rl, ca.n, rr);
        // Combined rank index: a's rank fastest.
        for (Index i = 0; i < ca.n; ++i)
            for (Index b2 = 0; b2 < cb.r_right; ++b2)
                for (Index b1 = 0; b1 < ca.r_right; ++b1)
                    for (Index a2 = 0; a2 < cb.r_left; ++a2)
                        for (Index a1 = 0; a1 < ca.r_left; ++a1)
                            c(a1 + ca.r_left * a2, i, b1 + ca.r_right * b2) =
                                ca(a1, i, b1) * cb(a2, i, b2);
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor matvec(const TTMatrix& a, const TTTensor& x) {
    if (a.col_shape() != x.shape())
        throw std::invalid_argument("matvec: column shape " + a.col_shape().to_string() +
                                    " does not match vector shape " + x.shape().to_string());
    const Index d = a.dim();
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        const Core4& ca = a.core(k);
        const Core3& cx = x.core(k);
        const Index rl = ca.r_left * cx.r_left;
        const Index rr = ca.r_right * cx.r_right;
        check_result_ranks(std::max(rl, rr), "matvec");
        Core3 c(rl, ca.m, rr);
        // Y[(aA,ax), i, (bA,bx)] = sum_j A[aA,i,j,bA] * X[ax,j,bx], with the
        // operator rank fastest in each combined index. One GEMM over j:
        // T[(aA,i,bA), (ax,bx)] = sum_j Aperm[(aA,i,bA), j] * Xperm[j, (ax,bx)],
        // followed by an index shuffle into the core layout.
        Matrix aperm(ca.r_left * ca.m * ca.r_right, ca.n);
        for (Index b = 0; b < ca.r_right; ++b)
            for (Index j = 0; j < ca.n; ++j)
                for (Index i = 0; i < ca.m; ++i)
                    for (Index a2 = 0; a2 < ca.r_left; ++a2)
                        aperm(a2 + ca.r_left * (i + ca.m * b), j) = ca(a2, i, j, b);
        Matrix xperm(ca.n, cx.r_left * cx.r_right);
        for (Index b = 0; b < cx.r_right; ++b)
            for (Index j = 0; j < cx.n; ++j)
                for (Index a2 = 0; a2 < cx.r_left; ++a2)
                    xperm(j, a2 + cx.r_left * b) = cx(a2, j, b);
        Matrix t = aperm * xperm;
        for (Index bx = 0; bx < cx.r_right; ++bx)
            for (Index ba = 0; ba < ca.r_right; ++ba)
                for (Index i = 0; i < ca.m; ++i)
                    for (Index ax = 0; ax < cx.r_left; ++ax)
                        for (Index aa = 0; aa < ca.r_left; ++aa)
                            c(aa + ca.r_left * ax, i, ba + ca.r_right * bx) =
                                t(aa + ca.r_left * (i + ca.m * ba), ax + cx.r_left * bx);
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

}  // namespace ttkry
