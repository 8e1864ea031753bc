#include "ttkry/oracle.hpp"

#include <stdexcept>

#include "ttkry/tt_svd.hpp"

namespace ttkry::oracle {

DenseOperator dense_from_tt(const TTMatrix& a, Index guard_dim) {
    if (auto err = validate(a)) throw std::invalid_argument("dense_from_tt: " + *err);
    const Shape rows = a.row_shape();
    const Shape cols = a.col_shape();
    const Index nr = rows.num_elements();
    const Index nc = cols.num_elements();
    if (nr > guard_dim || nc > guard_dim)
        throw std::invalid_argument("dense_from_tt: flattened dimension " +
                                    std::to_string(std::max(nr, nc)) + " exceeds guard " +
                                    std::to_string(guard_dim));

    // Contract cores left to right over the fused (row, col) index pairs,
    // then scatter the interleaved pairs into matrix entries.
    Matrix b = ConstMatrixMap(a.core(0).data.data(), a.core(0).m * a.core(0).n,
                              a.core(0).r_right);
    for (Index k = 1; k < a.dim(); ++k) {
        const Core4& c = a.core(k);
        ConstMatrixMap ru(c.data.data(), c.r_left, c.m * c.n * c.r_right);
        Matrix m = b * ru;
        b = MatrixMap(m.data(), m.rows() * c.m * c.n, c.r_right);
    }

    DenseOperator out;
    out.row_shape = rows;
    out.col_shape = cols;
    out.mat = Matrix::Zero(nr, nc);
    const Index d = a.dim();
    std::vector<Index> mi(static_cast<std::size_t>(d)), ni(static_cast<std::size_t>(d));
    const Index total = b.rows();
    for (Index flat = 0; flat < total; ++flat) {
        Index rest = flat;
        for (Index k = 0; k < d; ++k) {
            const Index mk = a.core(k).m;
            const Index nk = a.core(k).n;
            mi[static_cast<std::size_t>(k)] = rest % mk;
            rest /= mk;
            ni[static_cast<std::size_t>(k)] = rest % nk;
            rest /= nk;
        }
        Index ri = 0, ci = 0, sr = 1, sc = 1;
        for (Index k = 0; k < d; ++k) {
            ri += mi[static_cast<std::size_t>(k)] * sr;
            sr *= a.core(k).m;
            ci += ni[static_cast<std::size_t>(k)] * sc;
            sc *= a.core(k).n;
        }
        out.mat(ri, ci) = b(flat, 0);
    }
    return out;
}

Matrix kron_product(const std::vector<Matrix>& factors) {
    if (factors.empty()) throw std::invalid_argument("kron_product: no factors");
    Matrix k = factors.front();
    for (std::size_t f = 1; f < factors.size(); ++f) {
        const Matrix& g = factors[f];
        Matrix next(k.rows() * g.rows(), k.cols() * g.cols());
        // New factor owns the slower index.
        for (Index i = 0; i < g.rows(); ++i)
            for (Index j = 0; j < g.cols(); ++j)
                next.block(i * k.rows(), j * k.cols(), k.rows(), k.cols()) = g(i, j) * k;
        k = std::move(next);
    }
    return k;
}

Vector dense_vector(const TTTensor& t, Index guard) {
    DenseTensor f = full(t, guard);
    return Eigen::Map<const Vector>(f.values.data(), f.size());
}

std::pair<Vector, ConvergenceRecord> dense_gmres(const DenseOperator& a, const Vector& b,
                                                 const Vector& x0, const SolverConfig& cfg) {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        throw std::invalid_argument("dense_gmres: need 0 < eps < 1");
    const Index n = a.mat.rows();
    if (b.size() != n || x0.size() != n)
        throw std::invalid_argument("dense_gmres: size mismatch");
    const double bnorm = b.norm();
    if (bnorm == 0.0) throw std::invalid_argument("dense_gmres: b must be nonzero");

    ConvergenceRecord rec;
    Vector x = x0;
    double computed_rel = std::numeric_limits<double>::quiet_NaN();
    Index global_iter = 0;

    for (Index cycle = 0; cycle <= cfg.max_restarts; ++cycle) {
        Vector r0 = b - a.mat * x;
        const double beta = r0.norm();
        if (!rec.restarts.empty() && std::isnan(rec.restarts.back().resid_true_rel))
            rec.restarts.back().resid_true_rel = beta / bnorm;
        if (beta / bnorm <= cfg.eps && cycle > 0) {
            rec.converged = true;
            break;
        }
        if (beta == 0.0) {
            rec.converged = true;
            break;
        }

        std::vector<Vector> v;
        v.push_back(r0 / beta);
        Matrix h = Matrix::Zero(cfg.restart_m + 1, cfg.restart_m);
        Vector y;
        Index j = 0;
        bool brk = false;
        while (j < cfg.restart_m) {
            Vector w = a.mat * v[static_cast<std::size_t>(j)];
            const double wsrc = w.norm();
            for (Index i = 0; i <= j; ++i) {
                h(i, j) = w.dot(v[static_cast<std::size_t>(i)]);
                w -= h(i, j) * v[static_cast<std::size_t>(i)];
            }
            h(j + 1, j) = w.norm();
            ++j;
            ++global_iter;

            Matrix hj = h.topLeftCorner(j + 1, j);
            Vector rhs = Vector::Zero(j + 1);
            rhs(0) = beta;
            y = hj.householderQr().solve(rhs);
            const double resid = (rhs - hj * y).norm();
            computed_rel = resid / bnorm;

            IterationRow row;
            row.iter = global_iter;
            row.resid_computed_rel = computed_rel;
            row.delta = 0.0;
            rec.iterations.push_back(row);

            if (h(j, j - 1) <= cfg.breakdown_tol * wsrc) {
                brk = true;
                rec.breakdown = true;
                break;
            }
            v.push_back(w / h(j, j - 1));
            if (computed_rel <= cfg.eps) break;
        }
        (void)brk;
        for (Index i = 0; i < j; ++i) x += y(i) * v[static_cast<std::size_t>(i)];

        RestartRow rr;
        rr.cycle = cycle;
        rr.iterations = j;
        rr.last_iter = global_iter;
        {
            Eigen::JacobiSVD<Matrix> svd(h.topLeftCorner(j + 1, j));
            rr.sigma_min_hbar = svd.singularValues().minCoeff();
        }
        rec.restarts.push_back(rr);
        if (computed_rel <= cfg.eps) {
            rec.converged = true;
            break;
        }
    }

    rec.total_iterations = global_iter;
    rec.final_resid_computed_rel = computed_rel;
    rec.final_resid_true_rel = (b - a.mat * x).norm() / bnorm;
    if (!rec.restarts.empty() && std::isnan(rec.restarts.back().resid_true_rel))
        rec.restarts.back().resid_true_rel = rec.final_resid_true_rel;
    return {std::move(x), std::move(rec)};
}

BestRankError best_rank_error(const DenseTensor& x, std::span<const Index> ranks,
                              Index guard) {
    check_shape(x.shape);
    const Index d = x.shape.dim();
    if (static_cast<Index>(ranks.size()) != d - 1)
        throw std::invalid_argument("best_rank_error: need d-1 rank caps");
    if (x.shape.num_elements() > guard)
        throw std::invalid_argument("best_rank_error: size guard exceeded");

    BestRankError out;
    Index rows = 1;
    for (Index k = 0; k + 1 < d; ++k) {
        rows *= x.shape[k];
        ConstMatrixMap m(x.values.data(), rows, x.shape.num_elements() / rows);
        Eigen::BDCSVD<Matrix> svd(m);
        const Vector& s = svd.singularValues();
        double tail2 = 0.0;
        for (Index i = ranks[static_cast<std::size_t>(k)]; i < s.size(); ++i)
            tail2 += s(i) * s(i);
        out.lower_bound = std::max(out.lower_bound, std::sqrt(tail2));
    }

    TTTensor approx = tt_svd(x, 0.0, ranks);
    DenseTensor rec = full(approx, guard);
    double err2 = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double dlt = rec[i] - x[i];
        err2 += dlt * dlt;
    }
    out.achieved = std::sqrt(err2);
    return out;
}

}  // namespace ttkry::oracle
