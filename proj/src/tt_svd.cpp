#include "ttkry/tt_svd.hpp"

#include <cmath>
#include <stdexcept>

#include "internal_linalg.hpp"

namespace ttkry {

namespace {

Index int_log(Index n, Index base) {
    Index p = 0;
    Index v = 1;
    while (v < n) {
        v *= base;
        ++p;
    }
    if (v != n) return -1;
    return p;
}

}  // namespace

TTTensor tt_svd(const DenseTensor& x, double eps, Index rmax) {
    if (rmax < 1) throw std::invalid_argument("tt_svd: rmax must be >= 1");
    const Index nbonds = std::max<Index>(x.shape.dim() - 1, 0);
    std::vector<Index> caps(static_cast<std::size_t>(nbonds), rmax);
    return tt_svd(x, eps, caps);
}

TTTensor tt_svd(const DenseTensor& x, double eps, std::span<const Index> rmax_per_bond) {
    check_shape(x.shape);
    if (eps < 0) throw std::invalid_argument("tt_svd: eps must be >= 0");
    for (Index r : rmax_per_bond)
        if (r < 1) throw std::invalid_argument("tt_svd: rmax must be >= 1");
    for (double v : x.values)
        if (!std::isfinite(v)) throw std::invalid_argument("tt_svd: non-finite input");

    const Index d = x.shape.dim();
    if (static_cast<Index>(rmax_per_bond.size()) != d - 1)
        throw std::invalid_argument("tt_svd: need d-1 rank caps");
    const double nrm = x.frobenius_norm();
    if (nrm == 0.0) return tt_zeros(x.shape);
    if (d == 1) {
        Core3 c(1, x.shape[0], 1);
        c.data = x.values;
        return TTTensor({std::move(c)});
    }

    const double delta = eps * nrm / std::sqrt(static_cast<double>(d - 1));

    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    Matrix work = ConstMatrixMap(x.values.data(), x.shape[0],
                                 x.shape.num_elements() / x.shape[0]);
    Index r_prev = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        const Index nk = x.shape[k];
        MatrixMap m(work.data(), r_prev * nk, work.size() / (r_prev * nk));
        auto svd = internal::truncated_svd(m, delta, rmax_per_bond[static_cast<std::size_t>(k)]);
        Core3 c(r_prev, nk, svd.rank);
        MatrixMap(c.data.data(), r_prev * nk, svd.rank) = svd.u;
        cores.push_back(std::move(c));
        work = svd.s.asDiagonal() * svd.vt;
        r_prev = svd.rank;
    }
    Core3 last(r_prev, x.shape[d - 1], 1);
    MatrixMap(last.data.data(), r_prev, x.shape[d - 1]) = work;
    cores.push_back(std::move(last));
    return TTTensor(std::move(cores));
}

TTTensor quantize(const TTTensor& t, Index base) {
    return quantize_modes(t, base, std::vector<bool>(static_cast<std::size_t>(t.dim()), true));
}

TTTensor quantize_modes(const TTTensor& t, Index base, const std::vector<bool>& select) {
    if (base < 2) throw std::invalid_argument("quantize: base must be >= 2");
    if (static_cast<Index>(select.size()) != t.dim())
        throw std::invalid_argument("quantize: selection length mismatch");
    if (auto err = validate(t)) throw std::invalid_argument("quantize: " + *err);

    std::vector<Core3> cores;
    for (Index k = 0; k < t.dim(); ++k) {
        const Core3& c = t.core(k);
        if (!select[static_cast<std::size_t>(k)]) {
            cores.push_back(c);
            continue;
        }
        const Index p = int_log(c.n, base);
        if (p < 0)
            throw std::invalid_argument("quantize: mode size " + std::to_string(c.n) +
                                        " at mode " + std::to_string(k) +
                                        " is not a power of " + std::to_string(base));
        if (p <= 1) {
            cores.push_back(c);
            continue;
        }
        // Exact sequential split of the core block (r x base^p x r') into p
        // digit cores; the column-major layout makes the least-significant
        // digit the leading one automatically.
        Matrix work = c.left_unfold();  // (r * n) x r'
        Index rows_left = c.r_left;
        Index cols_right = c.n * c.r_right;
        for (Index l = 0; l + 1 < p; ++l) {
            MatrixMap m(work.data(), rows_left * base, work.size() / (rows_left * base));
            auto qr = internal::thin_qr(m);
            const Index rank = qr.q.cols();
            Core3 digit(rows_left, base, rank);
            MatrixMap(digit.data.data(), rows_left * base, rank) = qr.q;
            cores.push_back(std::move(digit));
            work = qr.r;
            rows_left = rank;
            cols_right /= base;
        }
        Core3 lastd(rows_left, base, c.r_right);
        MatrixMap(lastd.data.data(), rows_left * base, c.r_right) =
            MatrixMap(work.data(), rows_left * base, c.r_right);
        cores.push_back(std::move(lastd));
    }
    return TTTensor(std::move(cores));
}

std::vector<Index> quantize_grouping(const Shape& shape, Index base) {
    std::vector<Index> grouping;
    grouping.reserve(static_cast<std::size_t>(shape.dim()));
    for (Index k = 0; k < shape.dim(); ++k) {
        const Index p = int_log(shape[k], base);
        if (p < 0)
            throw std::invalid_argument("quantize_grouping: mode size not a power of base");
        grouping.push_back(std::max<Index>(p, 1));
    }
    return grouping;
}

TTTensor dequantize(const TTTensor& t, const std::vector<Index>& grouping, Index base) {
    if (base < 2) throw std::invalid_argument("dequantize: base must be >= 2");
    Index total = 0;
    for (Index g : grouping) {
        if (g < 1) throw std::invalid_argument("dequantize: digit count must be >= 1");
        total += g;
    }
    if (total != t.dim())
        throw std::invalid_argument("dequantize: grouping covers " + std::to_string(total) +
                                    " modes, tensor has " + std::to_string(t.dim()));

    std::vector<Core3> cores;
    cores.reserve(grouping.size());
    Index pos = 0;
    for (Index g : grouping) {
        // Groups of one pass through untouched (partially quantized trains
        // keep their original modes); merged groups must consist of digits.
        if (g > 1)
            for (Index l = 0; l < g; ++l)
                if (t.core(pos + l).n != base)
                    throw std::invalid_argument(
                        "dequantize: mode " + std::to_string(pos + l) + " has size " +
                        std::to_string(t.core(pos + l).n) + ", expected " +
                        std::to_string(base));
        // Contract the g digit cores of this group; column-major keeps the
        // least-significant digit fastest, matching the merged index.
        Matrix acc = t.core(pos).left_unfold();
        Index rows = t.core(pos).r_left * t.core(pos).n;
        for (Index l = 1; l < g; ++l) {
            const Core3& c = t.core(pos + l);
            Matrix next = MatrixMap(acc.data(), rows, acc.size() / rows) * c.right_unfold();
            rows *= c.n;
            acc = std::move(next);
        }
        const Index rl = t.core(pos).r_left;
        const Index rr = t.core(pos + g - 1).r_right;
        Index merged = 1;
        for (Index l = 0; l < g; ++l) merged *= t.core(pos + l).n;
        Core3 c(rl, merged, rr);
        MatrixMap(c.data.data(), rl * merged, rr) = MatrixMap(acc.data(), rl * merged, rr);
        cores.push_back(std::move(c));
        pos += g;
    }
    return TTTensor(std::move(cores));
}

TTMatrix quantize_matrix_mode(const TTMatrix& a, Index mode, Index base) {
    if (base < 2) throw std::invalid_argument("quantize_matrix_mode: base must be >= 2");
    if (mode < 0 || mode >= a.dim())
        throw std::invalid_argument("quantize_matrix_mode: mode out of range");
    const Core4& c = a.core(mode);
    if (c.m != c.n)
        throw std::invalid_argument("quantize_matrix_mode: mode is not square");
    const Index p = int_log(c.n, base);
    if (p < 0)
        throw std::invalid_argument("quantize_matrix_mode: mode size not a power of base");

    std::vector<Core4> cores;
    for (Index k = 0; k < mode; ++k) cores.push_back(a.core(k));

    if (p <= 1) {
        cores.push_back(c);
    } else {
        // Permute (rl, i, j, rr) into (rl, (i0 j0), (i1 j1), ..., rr) with
        // digits least-significant first and the row digit fastest per level.
        const Index b2 = base * base;
        std::vector<double> perm(c.data.size());
        for (Index rr = 0; rr < c.r_right; ++rr)
            for (Index j = 0; j < c.n; ++j)
                for (Index i = 0; i < c.m; ++i) {
                    Index levels = 0;
                    Index stride = 1;
                    Index ii = i, jj = j;
                    for (Index l = 0; l < p; ++l) {
                        levels += (ii % base + base * (jj % base)) * stride;
                        stride *= b2;
                        ii /= base;
                        jj /= base;
                    }
                    for (Index rl = 0; rl < c.r_left; ++rl)
                        perm[static_cast<std::size_t>(
                            rl + c.r_left * (levels + stride * rr))] = c(rl, i, j, rr);
                }
        Matrix work = ConstMatrixMap(perm.data(), c.r_left * b2,
                                     static_cast<Index>(perm.size()) / (c.r_left * b2));
        Index rows_left = c.r_left;
        for (Index l = 0; l + 1 < p; ++l) {
            MatrixMap m(work.data(), rows_left * b2, work.size() / (rows_left * b2));
            auto qr = internal::thin_qr(m);
            const Index rank = qr.q.cols();
            Core4 digit(rows_left, base, base, rank);
            MatrixMap(digit.data.data(), rows_left * b2, rank) = qr.q;
            cores.push_back(std::move(digit));
            work = qr.r;
            rows_left = rank;
        }
        Core4 lastd(rows_left, base, base, c.r_right);
        MatrixMap(lastd.data.data(), rows_left * b2, c.r_right) =
            MatrixMap(work.data(), rows_left * b2, c.r_right);
        cores.push_back(std::move(lastd));
    }

    for (Index k = mode + 1; k < a.dim(); ++k) cores.push_back(a.core(k));
    return TTMatrix(std::move(cores));
}

}  // namespace ttkry
