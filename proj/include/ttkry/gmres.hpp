#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "ttkry/tt_round.hpp"
#include "ttkry/tt_tensor.hpp"

namespace ttkry {

struct SolverConfig {
    double eps = 1e-6;              // target relative residual
    Index restart_m = 80;           // cycle length
    Index max_restarts = 10;        // extra cycles after the first
    Index rmax = std::numeric_limits<Index>::max();
    bool relaxation = true;
    double delta_cap = 0.5;         // largest per-step truncation tolerance
    double cond_estimate = 1.0;     // user estimate of cond(A) for the gap bound
    double breakdown_tol = 1e-12;
    bool second_mgs_pass = false;
    bool per_addition_truncation = false;
    double delta_forced = 0.0;      // > 0 pins every truncation tolerance
};

/// Per-step truncation tolerance: with relaxation the per-step accuracy is
/// loosened inversely to the current computed relative residual, capped at
/// delta_cap; without it the tolerance stays at eps.
double relax_schedule(double eps, double computed_resid_rel, const SolverConfig& cfg);

struct IterationRow {
    Index iter = 0;                   // global iteration index, 1-based
    double resid_computed_rel = 0.0;  // ||r~_j|| / ||b||
    double delta = 0.0;               // truncation tolerance used
    Index rank_krylov_max = 0;        // max TT rank of the new Krylov vector
    double wall_ms = 0.0;
};

struct RestartRow {
    Index cycle = 0;
    double resid_true_rel = std::numeric_limits<double>::quiet_NaN();
    Index rank_solution_max = 0;
    double sigma_min_hbar = 0.0;  // smallest singular value of the cycle's Hbar
    Index iterations = 0;         // iterations spent in this cycle
    Index last_iter = 0;          // global index of the cycle's final iteration
};

struct ConvergenceRecord {
    std::vector<IterationRow> iterations;
    std::vector<RestartRow> restarts;
    bool converged = false;
    bool breakdown = false;
    bool rank_saturated = false;
    Index total_iterations = 0;
    double final_resid_computed_rel = std::numeric_limits<double>::quiet_NaN();
    double final_resid_true_rel = std::numeric_limits<double>::quiet_NaN();
    double gap_bound = 0.0;  // restart_m * cond_estimate * eps
};

/// Reduced least-squares problem min_y ||beta e_1 - Hbar y||.
struct HessenbergLS {
    Matrix hbar;  // (j+1) x j upper Hessenberg, subdiagonal >= 0
    double beta = 0.0;
};

struct LsqSolution {
    Vector y;
    double computed_resid = 0.0;
    bool rank_deficient = false;
};

/// Solves the reduced problem by a dense orthogonal decomposition; on rank
/// deficiency returns the minimal-norm solution and sets the flag.
LsqSolution hessenberg_lsq(const HessenbergLS& ls);

/// Krylov vector space over TT tensors; truncations are TT roundings.
struct TTKrylovSpace {
    using Vec = TTTensor;
    TruncationSpec base;  // rmax and local policy; eps is set per call

    double dot(const Vec& a, const Vec& b) const { return ttkry::dot(a, b); }
    double norm(const Vec& a) const { return ttkry::norm(a); }
    Vec scale(const Vec& a, double c) const { return ttkry::scale(a, c); }
    Vec axpy(double alpha, const Vec& x, const Vec& y) const {
        return add(y, ttkry::scale(x, alpha));
    }
    Vec truncate(const Vec& v, double tol) const {
        TruncationSpec s = base;
        s.eps = tol;
        return round(v, s);
    }
    Vec lincomb(const std::vector<std::pair<double, const Vec*>>& terms, double tol) const {
        std::vector<ScaledTensor> st;
        st.reserve(terms.size());
        for (const auto& [c, v] : terms) st.push_back({c, v});
        TruncationSpec s = base;
        s.eps = tol;
        return rounded_sum(st, s);
    }
    Index max_rank(const Vec& v) const { return v.max_rank(); }
};

/// Krylov vector space over plain dense vectors; truncation is a no-op, so
/// the same driver runs in exact arithmetic.
struct DenseKrylovSpace {
    using Vec = Vector;

    double dot(const Vec& a, const Vec& b) const { return a.dot(b); }
    double norm(const Vec& a) const { return a.norm(); }
    Vec scale(const Vec& a, double c) const { return c * a; }
    Vec axpy(double alpha, const Vec& x, const Vec& y) const { return y + alpha * x; }
    Vec truncate(const Vec& v, double) const { return v; }
    Vec lincomb(const std::vector<std::pair<double, const Vec*>>& terms, double) const {
        Vec out = terms.front().first * (*terms.front().second);
        for (std::size_t i = 1; i < terms.size(); ++i)
            out += terms[i].first * (*terms[i].second);
        return out;
    }
    Index max_rank(const Vec&) const { return 0; }
};

template <class Space>
struct ArnoldiStep {
    typename Space::Vec w;   // truncated, not yet normalized
    Vector h;                // h_{1,j} .. h_{j+1,j}
    double source_norm = 0;  // norm of the truncated operator product
    bool breakdown = false;
};

/// One step of the inexact Arnoldi process: w = T_delta(A v_j), modified
/// Gram-Schmidt against the basis, one compression of w at delta, then the
/// normalization constant. The projection coefficients are the MGS values,
/// evaluated through the basis Gram matrix so the subtraction happens once.
/// Breakdown is signalled when the new direction collapses relative to the
/// operator product.
template <class Space, class Apply>
ArnoldiStep<Space> arnoldi_step(const Space& S, Apply&& apply,
                                const std::vector<typename Space::Vec>& V,
                                const Matrix& gram, double delta,
                                const SolverConfig& cfg) {
    using Vec = typename Space::Vec;
    const Index j = static_cast<Index>(V.size());
    ArnoldiStep<Space> out;
    Vec w0 = apply(V.back(), delta);
    out.source_norm = S.norm(w0);
    out.h = Vector::Zero(j + 1);

    auto project = [&](const Vec& src, Vector& h) {
        Vector g(j);
        for (Index i = 0; i < j; ++i) g(i) = S.dot(src, V[static_cast<std::size_t>(i)]);
        for (Index i = 0; i < j; ++i) {
            double v = g(i);
            for (Index l = 0; l < i; ++l) v -= h(l) * gram(l, i);
            h(i) = v;
        }
    };
    auto subtract = [&](const Vec& src, const Vector& h) {
        if (cfg.per_addition_truncation) {
            Vec w = src;
            for (Index i = 0; i < j; ++i)
                w = S.truncate(S.axpy(-h(i), V[static_cast<std::size_t>(i)], w), delta);
            return w;
        }
        std::vector<std::pair<double, const Vec*>> terms;
        terms.reserve(static_cast<std::size_t>(j) + 1);
        terms.push_back({1.0, &src});
        for (Index i = 0; i < j; ++i)
            terms.push_back({-h(i), &V[static_cast<std::size_t>(i)]});
        return S.lincomb(terms, delta);
    };

    Vector h1(j);
    project(w0, h1);
    out.h.head(j) = h1;
    Vec w = subtract(w0, h1);
    if (cfg.second_mgs_pass) {
        Vector h2(j);
        project(w, h2);
        out.h.head(j) += h2;
        w = subtract(w, h2);
    }
    const double hlast = S.norm(w);
    out.h(j) = hlast;
    out.breakdown = (hlast <= cfg.breakdown_tol * out.source_norm);
    out.w = std::move(w);
    return out;
}

/// Restarted inexact GMRES with relaxed truncation tolerances. `apply` maps
/// (vector, tolerance) to the rounded operator product. The initial residual
/// of every cycle is truncated at eps; the per-iteration tolerance follows
/// relax_schedule; the solution correction is summed exactly and compressed
/// once at eps (unless per-addition truncation is selected).
template <class Space, class Apply>
std::pair<typename Space::Vec, ConvergenceRecord> relaxed_gmres(
    const Space& S, Apply&& apply, const typename Space::Vec& b,
    const typename Space::Vec& x0, const SolverConfig& cfg) {
    using Vec = typename Space::Vec;
    using clock = std::chrono::steady_clock;

    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        throw std::invalid_argument("relaxed_gmres: need 0 < eps < 1");
    if (cfg.delta_cap < cfg.eps)
        throw std::invalid_argument("relaxed_gmres: delta_cap must be >= eps");
    if (cfg.restart_m < 1)
        throw std::invalid_argument("relaxed_gmres: restart_m must be >= 1");

    ConvergenceRecord rec;
    rec.gap_bound = static_cast<double>(cfg.restart_m) * cfg.cond_estimate * cfg.eps;

    const double bnorm = S.norm(b);
    if (bnorm == 0.0) throw std::invalid_argument("relaxed_gmres: b must be nonzero");
    const double eps_tol = cfg.delta_forced > 0.0 ? cfg.delta_forced : cfg.eps;

    auto residual_at = [&](const Vec& x) {
        if (S.norm(x) == 0.0) return S.truncate(b, eps_tol);
        Vec ax = apply(x, eps_tol);
        std::vector<std::pair<double, const Vec*>> terms{{1.0, &b}, {-1.0, &ax}};
        return S.lincomb(terms, eps_tol);
    };

    Vec x = x0;
    double computed_rel = std::numeric_limits<double>::quiet_NaN();
    Index global_iter = 0;

    for (Index cycle = 0; cycle <= cfg.max_restarts; ++cycle) {
        Vec r0 = residual_at(x);
        const double beta = S.norm(r0);
        if (!rec.restarts.empty() && std::isnan(rec.restarts.back().resid_true_rel))
            rec.restarts.back().resid_true_rel = beta / bnorm;
        if (beta == 0.0) {
            rec.converged = true;
            rec.final_resid_true_rel = 0.0;
            rec.final_resid_computed_rel = 0.0;
            break;
        }

        std::vector<Vec> basis;
        basis.push_back(S.scale(r0, 1.0 / beta));
        Matrix gram = Matrix::Ones(1, 1);
        Matrix hbar;  // (j+1) x j, grown column by column
        double resid_rel_beta = 1.0;
        bool cycle_breakdown = false;
        Vector y;

        Index j = 0;
        while (j < cfg.restart_m) {
            const auto t0 = clock::now();
            const double delta = cfg.delta_forced > 0.0
                                     ? cfg.delta_forced
                                     : relax_schedule(cfg.eps, resid_rel_beta, cfg);
            auto step = arnoldi_step(S, apply, basis, gram, delta, cfg);
            ++j;

            Matrix grown = Matrix::Zero(j + 1, j);
            if (j > 1) grown.topLeftCorner(j, j - 1) = hbar;
            grown.col(j - 1) = step.h;
            hbar = std::move(grown);

            auto ls = hessenberg_lsq({hbar, beta});
            y = ls.y;
            resid_rel_beta = ls.computed_resid / beta;
            computed_rel = ls.computed_resid / bnorm;
            ++global_iter;

            IterationRow row;
            row.iter = global_iter;
            row.resid_computed_rel = computed_rel;
            row.delta = delta;
            row.rank_krylov_max = S.max_rank(step.w);
            row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            rec.iterations.push_back(row);
            if (cfg.rmax != std::numeric_limits<Index>::max() &&
                row.rank_krylov_max >= cfg.rmax)
                rec.rank_saturated = true;

            if (step.breakdown) {
                cycle_breakdown = true;
                rec.breakdown = true;
                break;
            }
            basis.push_back(S.scale(step.w, 1.0 / step.h(j)));
            Matrix g2 = Matrix::Ones(j + 1, j + 1);
            g2.topLeftCorner(j, j) = gram;
            for (Index i = 0; i < j; ++i) {
                const double d =
                    S.dot(basis[static_cast<std::size_t>(i)], basis.back());
                g2(i, j) = d;
                g2(j, i) = d;
            }
            gram = std::move(g2);

            if (computed_rel <= cfg.eps) break;
        }

        // Correction: exact summation over the basis, one compression at eps.
        {
            const Index cols = hbar.cols();
            if (cfg.per_addition_truncation) {
                for (Index i = 0; i < cols; ++i)
                    x = S.truncate(S.axpy(y(i), basis[static_cast<std::size_t>(i)], x),
                                   eps_tol);
            } else {
                std::vector<std::pair<double, const Vec*>> terms;
                terms.push_back({1.0, &x});
                for (Index i = 0; i < cols; ++i)
                    terms.push_back({y(i), &basis[static_cast<std::size_t>(i)]});
                x = S.lincomb(terms, eps_tol);
            }
        }

        RestartRow rr;
        rr.cycle = cycle;
        rr.rank_solution_max = S.max_rank(x);
        rr.iterations = j;
        rr.last_iter = global_iter;
        {
            Eigen::JacobiSVD<Matrix> svd(hbar);
            rr.sigma_min_hbar = svd.singularValues().minCoeff();
        }
        rec.restarts.push_back(rr);

        if (computed_rel <= cfg.eps) {
            rec.converged = true;
            break;
        }
        (void)cycle_breakdown;  // breakdown without convergence restarts
    }

    rec.total_iterations = global_iter;
    rec.final_resid_computed_rel = computed_rel;
    if (std::isnan(rec.final_resid_true_rel)) {
        Vec rfin = residual_at(x);
        rec.final_resid_true_rel = S.norm(rfin) / bnorm;
        if (!rec.restarts.empty() && std::isnan(rec.restarts.back().resid_true_rel))
            rec.restarts.back().resid_true_rel = rec.final_resid_true_rel;
    }
    return {std::move(x), std::move(rec)};
}

}  // namespace ttkry
