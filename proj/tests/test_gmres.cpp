#include <doctest.h>

#include "test_helpers.hpp"
#include "ttkry/gmres.hpp"
#include "ttkry/oracle.hpp"
#include "ttkry/tt_svd.hpp"

using namespace ttkry;

TEST_CASE("relax_schedule follows the inverse-residual rule") {
    SolverConfig cfg{.eps = 1e-5, .relaxation = true, .delta_cap = 0.5};
    CHECK(relax_schedule(1e-5, 1.0, cfg) == doctest::Approx(1e-5));
    CHECK(relax_schedule(1e-5, 1e-3, cfg) == doctest::Approx(1e-2));
    CHECK(relax_schedule(1e-5, 1e-6, cfg) == doctest::Approx(0.5));
    cfg.relaxation = false;
    CHECK(relax_schedule(1e-5, 1e-3, cfg) == doctest::Approx(1e-5));
    CHECK_THROWS_AS(relax_schedule(1e-5, 0.0, cfg), std::invalid_argument);
}

TEST_CASE("hessenberg_lsq basics") {
    SUBCASE("exact single column") {
        Matrix h(2, 1);
        h << 2.0, 0.0;
        auto sol = hessenberg_lsq({h, 2.0});
        CHECK(sol.y(0) == doctest::Approx(1.0));
        CHECK(sol.computed_resid == doctest::Approx(0.0));
        CHECK_FALSE(sol.rank_deficient);
    }
    SUBCASE("random tall system vs normal equations") {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> dist;
        Matrix h = Matrix::Zero(5, 4);
        for (Index j = 0; j < 4; ++j)
            for (Index i = 0; i <= j + 1; ++i) h(i, j) = dist(rng);
        const double beta = 1.7;
        auto sol = hessenberg_lsq({h, beta});
        Vector rhs = Vector::Zero(5);
        rhs(0) = beta;
        Vector want = (h.transpose() * h).ldlt().solve(h.transpose() * rhs);
        CHECK((sol.y - want).norm() <= 1e-10 * want.norm());
        CHECK(sol.computed_resid == doctest::Approx((rhs - h * want).norm()).epsilon(1e-9));
    }
    SUBCASE("breakdown column gives zero residual") {
        Matrix h(3, 2);
        h << 1.0, 0.5,
             0.8, 0.3,
             0.0, 0.0;  // h_{3,2} = 0
        auto sol = hessenberg_lsq({h, 1.0});
        CHECK(sol.computed_resid <= 1e-14);
    }
}

TEST_CASE("dense-space relaxed_gmres on the identity converges in one step") {
    DenseKrylovSpace S;
    auto apply = [](const Vector& v, double) { return v; };
    Vector b = Vector::Random(12);
    auto [x, rec] = relaxed_gmres(S, apply, b, Vector::Zero(12), {.eps = 1e-10});
    CHECK(rec.converged);
    CHECK(rec.total_iterations == 1);
    CHECK(rec.breakdown);  // Theorem-1 style closure
    CHECK((x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("dense-space relaxed_gmres matches the textbook oracle history") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> dist;
    Matrix g(50, 50);
    for (Index i = 0; i < 50; ++i)
        for (Index j = 0; j < 50; ++j) g(i, j) = dist(rng);
    Matrix a = Matrix::Identity(50, 50) + 0.08 * g;  // well conditioned
    Vector b = Vector::Random(50);

    SolverConfig cfg{.eps = 1e-10, .restart_m = 60, .max_restarts = 1};
    cfg.relaxation = false;
    DenseKrylovSpace S;
    auto apply = [&](const Vector& v, double) -> Vector { return a * v; };
    auto [x, rec] = relaxed_gmres(S, apply, b, Vector::Zero(50), cfg);

    oracle::DenseOperator op{a, Shape{50}, Shape{50}};
    auto [xo, reco] = oracle::dense_gmres(op, b, Vector::Zero(50), cfg);

    CHECK(rec.converged);
    CHECK(reco.converged);
    REQUIRE(rec.iterations.size() == reco.iterations.size());
    for (std::size_t i = 0; i < rec.iterations.size(); ++i)
        CHECK(std::abs(rec.iterations[i].resid_computed_rel -
                       reco.iterations[i].resid_computed_rel) <= 1e-8);
    CHECK((x - xo).norm() <= 1e-8 * xo.norm());
}

TEST_CASE("arnoldi reduction identity holds in dense mode") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    Matrix a(20, 20);
    for (Index i = 0; i < 20; ++i)
        for (Index j = 0; j < 20; ++j) a(i, j) = dist(rng);
    Vector b = Vector::Random(20);

    DenseKrylovSpace S;
    auto apply = [&](const Vector& v, double) -> Vector { return a * v; };
    std::vector<Vector> basis{b / b.norm()};
    Matrix gram = Matrix::Ones(1, 1);
    Matrix hbar;
    SolverConfig cfg;
    const Index m = 8;
    for (Index j = 1; j <= m; ++j) {
        auto step = arnoldi_step(S, apply, basis, gram, 0.0, cfg);
        Matrix grown = Matrix::Zero(j + 1, j);
        if (j > 1) grown.topLeftCorner(j, j - 1) = hbar;
        grown.col(j - 1) = step.h;
        hbar = std::move(grown);
        REQUIRE_FALSE(step.breakdown);
        basis.push_back(step.w / step.h(j));
        Matrix g2 = Matrix::Ones(j + 1, j + 1);
        g2.topLeftCorner(j, j) = gram;
        for (Index i = 0; i < j; ++i) {
            const double d = basis[static_cast<std::size_t>(i)].dot(basis.back());
            g2(i, j) = d;
            g2(j, i) = d;
        }
        gram = std::move(g2);
    }
    // A V_m = V_{m+1} Hbar_m
    Matrix vm(20, m), vm1(20, m + 1);
    for (Index j = 0; j < m; ++j) vm.col(j) = basis[static_cast<std::size_t>(j)];
    for (Index j = 0; j <= m; ++j) vm1.col(j) = basis[static_cast<std::size_t>(j)];
    CHECK((a * vm - vm1 * hbar).norm() <= 1e-12 * (a * vm).norm());
    // Orthonormality at machine precision
    CHECK((vm1.transpose() * vm1 - Matrix::Identity(m + 1, m + 1)).cwiseAbs().maxCoeff() <=
          1e-10);
}

TEST_CASE("two distinct eigenvalues close the Krylov space after two steps") {
    Matrix a = Matrix::Identity(16, 16);
    for (Index i = 8; i < 16; ++i) a(i, i) = 4.0;
    Vector b = Vector::Ones(16);
    DenseKrylovSpace S;
    auto apply = [&](const Vector& v, double) -> Vector { return a * v; };
    std::vector<Vector> basis{b / b.norm()};
    Matrix gram = Matrix::Ones(1, 1);
    SolverConfig cfg;
    auto s1 = arnoldi_step(S, apply, basis, gram, 0.0, cfg);
    REQUIRE_FALSE(s1.breakdown);
    basis.push_back(s1.w / s1.h(1));
    Matrix g2 = Matrix::Ones(2, 2);
    g2(0, 1) = g2(1, 0) = basis[0].dot(basis[1]);
    auto s2 = arnoldi_step(S, apply, basis, g2, 0.0, cfg);
    CHECK(s2.h(2) <= 1e-12);  // h_{3,2}
    CHECK(s2.breakdown);
}

TEST_CASE("identity operator breaks down at the first Arnoldi step") {
    DenseKrylovSpace S;
    auto apply = [](const Vector& v, double) { return v; };
    Vector b = Vector::Random(10);
    std::vector<Vector> basis{b / b.norm()};
    Matrix gram = Matrix::Ones(1, 1);
    SolverConfig cfg;
    auto step = arnoldi_step(S, apply, basis, gram, 0.0, cfg);
    CHECK(step.breakdown);
    CHECK(step.h(0) == doctest::Approx(1.0));
}

TEST_CASE("TT-space relaxed_gmres on the identity") {
    std::mt19937_64 rng(4);
    TTTensor b = tt_random(Shape{4, 4, 4}, 2, rng);
    TTKrylovSpace S;
    auto apply = [&](const TTTensor& v, double tol) {
        return rounded_matvec(tt_identity(Shape{4, 4, 4}), v, {.eps = tol});
    };
    auto [x, rec] = relaxed_gmres(S, apply, b, tt_zeros(Shape{4, 4, 4}), {.eps = 1e-8});
    CHECK(rec.converged);
    CHECK(rec.total_iterations == 1);
    CHECK((oracle::dense_vector(x) - oracle::dense_vector(b)).norm() <=
          1e-7 * oracle::dense_vector(b).norm());
}

TEST_CASE("TT mode with forced tight truncation matches dense mode") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist;
    Matrix id = Matrix::Identity(4, 4);
    auto rnd = [&] {
        Matrix m(4, 4);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) m(i, j) = 0.15 * dist(rng);
        return m;
    };
    TTMatrix a = tt_matrix_from_kron({{1.0, {id, id, id}},
                                      {1.0, {rnd(), id, id}},
                                      {1.0, {id, rnd(), id}},
                                      {1.0, {id, id, rnd()}}});
    TTTensor b = tt_random(Shape{4, 4, 4}, 2, rng);

    SolverConfig cfg{.eps = 1e-8, .restart_m = 40, .max_restarts = 0};
    cfg.delta_forced = 1e-14;

    TTKrylovSpace S;
    auto apply = [&](const TTTensor& v, double tol) {
        return rounded_matvec(a, v, {.eps = tol});
    };
    auto [x, rec] = relaxed_gmres(S, apply, b, tt_zeros(Shape{4, 4, 4}), cfg);

    auto dop = oracle::dense_from_tt(a, 64);
    Vector bd = oracle::dense_vector(b);
    auto [xd, recd] = oracle::dense_gmres(dop, bd, Vector::Zero(64), cfg);

    CHECK(rec.converged);
    REQUIRE(rec.iterations.size() == recd.iterations.size());
    for (std::size_t i = 0; i < rec.iterations.size(); ++i)
        CHECK(std::abs(rec.iterations[i].resid_computed_rel -
                       recd.iterations[i].resid_computed_rel) <= 1e-8);
}

TEST_CASE("computed residual is monotone within a cycle and the gap is bounded") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> dist;
    Matrix id = Matrix::Identity(6, 6);
    auto rnd = [&] {
        Matrix m(6, 6);
        for (Index i = 0; i < 6; ++i)
            for (Index j = 0; j < 6; ++j) m(i, j) = 0.1 * dist(rng);
        return m;
    };
    TTMatrix a = tt_matrix_from_kron(
        {{1.0, {id, id, id}}, {1.0, {rnd(), id, id}}, {1.0, {id, rnd(), id}}});
    TTTensor b = tt_random(Shape{6, 6, 6}, 2, rng);

    SolverConfig cfg{.eps = 1e-6, .restart_m = 30, .max_restarts = 1};
    TTKrylovSpace S;
    auto apply = [&](const TTTensor& v, double tol) {
        return rounded_matvec(a, v, {.eps = tol});
    };
    auto [x, rec] = relaxed_gmres(S, apply, b, tt_zeros(Shape{6, 6, 6}), cfg);
    CHECK(rec.converged);

    Index cycle_start = 0;
    for (const auto& rr : rec.restarts) {
        double prev = std::numeric_limits<double>::infinity();
        for (Index i = cycle_start; i < rr.last_iter; ++i) {
            const double v = rec.iterations[static_cast<std::size_t>(i)].resid_computed_rel;
            CHECK(v <= prev * (1 + 1e-12));
            prev = v;
        }
        cycle_start = rr.last_iter;
    }

    // Gap between true and computed residual at exit, against the recorded bound.
    auto dop = oracle::dense_from_tt(a, 216);
    Vector xd = oracle::dense_vector(x);
    Vector bd = oracle::dense_vector(b);
    const double true_rel = (bd - dop.mat * xd).norm() / bd.norm();
    CHECK(std::abs(true_rel - rec.final_resid_computed_rel) <=
          rec.gap_bound * std::max(1.0, dop.mat.norm()));
}
