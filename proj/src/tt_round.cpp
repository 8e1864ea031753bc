#include "ttkry/tt_round.hpp"

#include <cmath>
#include <stdexcept>

#include "internal_linalg.hpp"

namespace ttkry {

namespace {

double local_threshold(double eps, double norm, Index d, LocalPolicy policy) {
    if (d < 2) return 0.0;
    const double split = (policy == LocalPolicy::split_sqrt)
                             ? std::sqrt(static_cast<double>(d - 1))
                             : static_cast<double>(d);
    return eps * norm / split;
}

/// In-place right-to-left orthogonalization; afterwards all cores except the
/// first have orthonormal rows in the right unfolding and the Frobenius norm
/// of the tensor equals the norm of the first core.
void orthogonalize_rl(std::vector<Core3>& cores) {
    for (std::size_t k = cores.size() - 1; k > 0; --k) {
        Core3& c = cores[k];
        auto lq = internal::thin_lq(c.right_unfold());
        const Index q = lq.q.rows();
        Core3 repl(q, c.n, c.r_right);
        MatrixMap(repl.data.data(), q, c.n * c.r_right) = lq.q;
        Core3& prev = cores[k - 1];
        Matrix folded = prev.left_unfold() * lq.l;  // (r_left*n) x q
        Core3 newprev(prev.r_left, prev.n, q);
        MatrixMap(newprev.data.data(), prev.r_left * prev.n, q) = folded;
        cores[k] = std::move(repl);
        cores[k - 1] = std::move(newprev);
    }
}

/// Left-to-right truncation sweep on a right-orthogonalized chain.
void truncate_lr(std::vector<Core3>& cores, double delta, Index rmax) {
    for (std::size_t k = 0; k + 1 < cores.size(); ++k) {
        Core3& c = cores[k];
        auto svd = internal::truncated_svd(c.left_unfold(), delta, rmax);
        Core3 repl(c.r_left, c.n, svd.rank);
        MatrixMap(repl.data.data(), c.r_left * c.n, svd.rank) = svd.u;
        Matrix carry = svd.s.asDiagonal() * svd.vt;  // rank x r_right_old
        Core3& next = cores[k + 1];
        Core3 newnext(svd.rank, next.n, next.r_right);
        MatrixMap(newnext.data.data(), svd.rank, next.n * next.r_right) =
            carry * next.right_unfold();
        cores[k] = std::move(repl);
        cores[k + 1] = std::move(newnext);
    }
}

}  // namespace

TTTensor round(const TTTensor& t, const TruncationSpec& spec) {
    if (auto err = validate(t)) throw std::invalid_argument("round: " + *err);
    if (spec.eps < 0) throw std::invalid_argument("round: eps must be >= 0");
    if (spec.rmax < 1) throw std::invalid_argument("round: rmax must be >= 1");
    const Index d = t.dim();
    if (d == 1) return t;

    std::vector<Core3> cores = t.cores;
    orthogonalize_rl(cores);
    const double nrm =
        ConstMatrixMap(cores[0].data.data(), 1, static_cast<Index>(cores[0].data.size()))
            .norm();
    if (nrm == 0.0) return tt_zeros(t.shape());
    truncate_lr(cores, local_threshold(spec.eps, nrm, d, spec.local_policy), spec.rmax);
    return TTTensor(std::move(cores));
}

TTMatrix round_matrix(const TTMatrix& a, const TruncationSpec& spec) {
    if (auto err = validate(a)) throw std::invalid_argument("round_matrix: " + *err);
    // Fuse row and column indices of each core and round as a tensor; the
    // buffers are reinterpreted, not copied per entry.
    std::vector<Core3> fused;
    fused.reserve(a.cores.size());
    for (const Core4& c : a.cores) {
        Core3 f(c.r_left, c.m * c.n, c.r_right);
        f.data = c.data;
        fused.push_back(std::move(f));
    }
    TTTensor rounded = round(TTTensor(std::move(fused)), spec);
    std::vector<Core4> out;
    out.reserve(rounded.cores.size());
    for (Index k = 0; k < rounded.dim(); ++k) {
        const Core3& f = rounded.core(k);
        Core4 c(f.r_left, a.core(k).m, a.core(k).n, f.r_right);
        c.data = f.data;
        out.push_back(std::move(c));
    }
    return TTMatrix(std::move(out));
}

namespace {

constexpr std::size_t kSumMemoryCap = 2ull << 30;  // bytes per materialized core

struct SumState {
    std::vector<const TTTensor*> terms;
    std::vector<double> coeffs;
    Index d = 0;
};

}  // namespace

TTTensor rounded_sum(std::span<const ScaledTensor> terms, const TruncationSpec& spec) {
    if (terms.empty()) throw std::invalid_argument("rounded_sum: no terms");
    for (const auto& t : terms) {
        if (!t.tensor) throw std::invalid_argument("rounded_sum: null term");
        if (t.tensor->shape() != terms.front().tensor->shape())
            throw std::invalid_argument("rounded_sum: shape mismatch");
    }
    if (terms.size() == 1) return round(scale(*terms[0].tensor, terms[0].coeff), spec);

    const Index d = terms.front().tensor->dim();
    const Index nterms = static_cast<Index>(terms.size());

    if (d == 1) {
        const Index n = terms.front().tensor->core(0).n;
        Core3 c(1, n, 1);
        for (const auto& t : terms)
            for (Index i = 0; i < n; ++i) c(0, i, 0) += t.coeff * t.tensor->core(0)(0, i, 0);
        return TTTensor({std::move(c)});
    }

    auto rank_at = [&](Index bond) {  // sum over terms of rank r_bond
        Index s = 0;
        for (const auto& t : terms) s += t.tensor->ranks()[static_cast<std::size_t>(bond)];
        return s;
    };

    // --- Right reduction: shared right-orthonormal cores while the stacked
    // interface strictly shrinks.
    std::vector<Core3> shared_right;                 // modes right_start..d-1
    std::vector<Matrix> lcar(terms.size());          // per-term carry r_k x q_k
    for (std::size_t i = 0; i < terms.size(); ++i) lcar[i] = Matrix::Ones(1, 1);
    Index q = 1;
    Index right_start = d;
    for (Index k = d - 1; k >= 1; --k) {
        const Index n = terms.front().tensor->core(k).n;
        const Index sum_left = rank_at(k);
        if (sum_left <= n * q) break;
        Matrix stacked(sum_left, n * q);
        Index row = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const Core3& c = terms[i].tensor->core(k);
            Matrix folded = c.left_unfold() * lcar[i];  // (r_left*n) x q
            stacked.middleRows(row, c.r_left) =
                MatrixMap(folded.data(), c.r_left, n * q);
            row += c.r_left;
        }
        auto lq = internal::thin_lq(stacked);
        const Index qn = lq.q.rows();
        Core3 shared(qn, n, q);
        MatrixMap(shared.data.data(), qn, n * q) = lq.q;
        shared_right.push_back(std::move(shared));
        row = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const Index r = terms[i].tensor->core(k).r_left;
            lcar[i] = lq.l.middleRows(row, r);
            row += r;
        }
        q = qn;
        right_start = k;
    }

    // --- Left reduction: shared left-orthonormal cores, coefficients folded
    // into the joint carry.
    std::vector<Core3> shared_left;  // modes 0..left_stop-1
    Matrix rcar(1, nterms);          // t_k x (sum of term ranks at bond k)
    for (Index i = 0; i < nterms; ++i)
        rcar(0, i) = terms[static_cast<std::size_t>(i)].coeff;
    Index tleft = 1;
    Index left_stop = 0;
    // The mode adjacent to the right-shared region always stays for the
    // bridge (it needs the right carries folded in).
    for (Index k = 0; k + 1 < right_start; ++k) {
        const Index n = terms.front().tensor->core(k).n;
        const Index sum_right = rank_at(k + 1);
        if (tleft * n >= sum_right) break;
        Matrix stacked(tleft * n, sum_right);
        Index col = 0;
        Index rowoff = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const Core3& c = terms[i].tensor->core(k);
            Matrix folded = rcar.middleCols(rowoff, c.r_left) * c.right_unfold();
            stacked.middleCols(col, c.r_right) =
                MatrixMap(folded.data(), tleft * n, c.r_right);
            col += c.r_right;
            rowoff += c.r_left;
        }
        auto qr = internal::thin_qr(stacked);
        const Index tn = qr.q.cols();
        Core3 shared(tleft, n, tn);
        MatrixMap(shared.data.data(), tleft * n, tn) = qr.q;
        shared_left.push_back(std::move(shared));
        rcar = qr.r;
        tleft = tn;
        left_stop = k + 1;
    }

    // --- Bridge the two reduced halves; left_stop < right_start always, so
    // there is at least one bridge mode.
    std::vector<Core3> cores = std::move(shared_left);
    {
        for (Index k = left_stop; k < right_start; ++k) {
            const Index n = terms.front().tensor->core(k).n;
            const bool first = (k == left_stop);
            const bool last = (k == right_start - 1);
            if (first && last) {
                // Single middle mode: fold both carries, sum over terms.
                Core3 mid(tleft, n, q);
                MatrixMap acc(mid.data.data(), tleft * n, q);
                Index rowoff = 0;
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    const Core3& c = terms[i].tensor->core(k);
                    Matrix tmp = rcar.middleCols(rowoff, c.r_left) * c.right_unfold();
                    acc += MatrixMap(tmp.data(), tleft * n, c.r_right) * lcar[i];
                    rowoff += c.r_left;
                }
                cores.push_back(std::move(mid));
            } else if (first) {
                const Index sum_right = rank_at(k + 1);
                Core3 mid(tleft, n, sum_right);
                MatrixMap m(mid.data.data(), tleft * n, sum_right);
                Index col = 0, rowoff = 0;
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    const Core3& c = terms[i].tensor->core(k);
                    Matrix tmp = rcar.middleCols(rowoff, c.r_left) * c.right_unfold();
                    m.middleCols(col, c.r_right) = MatrixMap(tmp.data(), tleft * n, c.r_right);
                    col += c.r_right;
                    rowoff += c.r_left;
                }
                cores.push_back(std::move(mid));
            } else if (last) {
                const Index sum_left = rank_at(k);
                Core3 mid(sum_left, n, q);
                Index row = 0;
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    const Core3& c = terms[i].tensor->core(k);
                    Matrix folded = c.left_unfold() * lcar[i];
                    MatrixMap fm(folded.data(), c.r_left, n * q);
                    for (Index jj = 0; jj < n * q; ++jj)
                        for (Index aa = 0; aa < c.r_left; ++aa)
                            mid.data[static_cast<std::size_t>(row + aa + sum_left * jj)] =
                                fm(aa, jj);
                    row += c.r_left;
                }
                cores.push_back(std::move(mid));
            } else {
                // Strictly interior middle mode: block-diagonal materialization.
                const Index sum_left = rank_at(k);
                const Index sum_right = rank_at(k + 1);
                if (static_cast<std::size_t>(sum_left) * static_cast<std::size_t>(sum_right) *
                        static_cast<std::size_t>(n) * sizeof(double) >
                    kSumMemoryCap)
                    throw std::runtime_error(
                        "rounded_sum: exact sum too large to materialize; truncate "
                        "incrementally instead");
                Core3 mid(sum_left, n, sum_right);
                Index row = 0, col = 0;
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    const Core3& c = terms[i].tensor->core(k);
                    for (Index b = 0; b < c.r_right; ++b)
                        for (Index j = 0; j < n; ++j)
                            for (Index a = 0; a < c.r_left; ++a)
                                mid(row + a, j, col + b) = c(a, j, b);
                    row += c.r_left;
                    col += c.r_right;
                }
                cores.push_back(std::move(mid));
            }
        }
    }
    // shared_right was built from mode d-1 inwards.
    for (auto it = shared_right.rbegin(); it != shared_right.rend(); ++it)
        cores.push_back(std::move(*it));

    TTTensor sum(std::move(cores));
    return round(sum, spec);
}

TTTensor rounded_matvec(const TTMatrix& a, const TTTensor& x, const TruncationSpec& spec) {
    return round(matvec(a, x), spec);
}

TTTensor preconditioned_matvec(const TTMatrix& m, const TTMatrix& a, const TTTensor& v,
                               const TruncationSpec& spec) {
    return rounded_matvec(m, rounded_matvec(a, v, spec), spec);
}

}  // namespace ttkry
