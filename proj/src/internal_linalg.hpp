#pragma once

#include <Eigen/Dense>

#include "ttkry/tt_tensor.hpp"

namespace ttkry::internal {

struct ThinQR {
    Matrix q;  // m x k, orthonormal columns
    Matrix r;  // k x n
};

/// Thin Householder QR, k = min(m, n).
inline ThinQR thin_qr(const Eigen::Ref<const Matrix>& a) {
    const Index k = std::min(a.rows(), a.cols());
    Eigen::HouseholderQR<Matrix> qr(a);
    ThinQR out;
    out.q = qr.householderQ() * Matrix::Identity(a.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return out;
}

struct ThinLQ {
    Matrix l;  // m x k
    Matrix q;  // k x n, orthonormal rows
};

/// Thin LQ via QR of the transpose, k = min(m, n).
inline ThinLQ thin_lq(const Eigen::Ref<const Matrix>& a) {
    ThinQR qr = thin_qr(a.transpose());
    return {qr.r.transpose(), qr.q.transpose()};
}

struct TruncatedSvd {
    Matrix u;    // m x rank
    Vector s;    // rank
    Matrix vt;   // rank x n
    Index rank;
    double tail;  // Frobenius norm of the discarded part
};

/// Relative floor that removes numerically-zero singular values even when
/// the caller requests a lossless decomposition.
inline constexpr double kSingularFloor = 1e-14;

/// Full SVD followed by rank selection: the smallest rank whose discarded
/// tail has Frobenius norm <= abs_threshold (at least 1), plus up to `boost`
/// extra singular vectors, capped at rmax.
inline TruncatedSvd truncated_svd(const Eigen::Ref<const Matrix>& m, double abs_threshold,
                                  Index rmax, Index boost = 0) {
    const Index kmax = std::min(m.rows(), m.cols());
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    abs_threshold = std::max(abs_threshold, kSingularFloor * s.norm());

    // Walk the spectrum from the tail; keep the smallest rank meeting the
    // threshold (<= keeps fewer on exact equality).
    Index rank = kmax;
    double acc = 0.0;
    while (rank > 1) {
        const double sv = s(rank - 1);
        const double next = acc + sv * sv;
        if (std::sqrt(next) > abs_threshold) break;
        acc = next;
        --rank;
    }
    rank = std::min(kmax, rank + std::max<Index>(boost, 0));
    rank = std::max<Index>(1, std::min(rank, rmax));

    double tail2 = 0.0;
    for (Index i = rank; i < kmax; ++i) tail2 += s(i) * s(i);

    TruncatedSvd out;
    out.u = svd.matrixU().leftCols(rank);
    out.s = s.head(rank);
    out.vt = svd.matrixV().leftCols(rank).transpose();
    out.rank = rank;
    out.tail = std::sqrt(tail2);
    return out;
}

}  // namespace ttkry::internal
