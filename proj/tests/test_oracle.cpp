#include <doctest.h>

#include "test_helpers.hpp"
#include "ttkry/oracle.hpp"
#include "ttkry/tt_round.hpp"
#include "ttkry/tt_svd.hpp"

using namespace ttkry;
using ttkry::testing::random_dense;

TEST_CASE("dense_from_tt of the identity is the identity matrix") {
    auto op = oracle::dense_from_tt(tt_identity(Shape{3, 4}));
    CHECK((op.mat - Matrix::Identity(12, 12)).norm() == 0.0);
}

TEST_CASE("dense_from_tt matches the Kronecker-sum construction") {
    Matrix id = Matrix::Identity(4, 4);
    Matrix l = Matrix::Zero(4, 4);
    for (Index i = 0; i < 4; ++i) {
        l(i, i) = 2;
        if (i > 0) l(i, i - 1) = -1;
        if (i + 1 < 4) l(i, i + 1) = -1;
    }
    TTMatrix a = tt_matrix_from_kron(
        {{1.0, {l, id, id}}, {1.0, {id, l, id}}, {1.0, {id, id, l}}});
    Matrix want = oracle::kron_product({l, id, id}) + oracle::kron_product({id, l, id}) +
                  oracle::kron_product({id, id, l});
    CHECK((oracle::dense_from_tt(a).mat - want).norm() <= 1e-13 * want.norm());
}

TEST_CASE("dense_from_tt guard") {
    CHECK_THROWS(oracle::dense_from_tt(tt_identity(Shape{100, 100})));
}

TEST_CASE("rounding the operator does not change its matricization") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    Matrix id = Matrix::Identity(3, 3);
    Matrix g(3, 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) g(i, j) = dist(rng);
    TTMatrix a = tt_matrix_from_kron({{1.0, {g, id, id}}, {1.0, {id, g, id}}});
    TTMatrix r = round_matrix(a, {.eps = 1e-13});
    const Matrix da = oracle::dense_from_tt(a).mat;
    const Matrix dr = oracle::dense_from_tt(r).mat;
    CHECK((da - dr).norm() <= 1e-12 * da.norm());
}

TEST_CASE("dense_gmres solves the identity system in one iteration") {
    oracle::DenseOperator op{Matrix::Identity(10, 10), Shape{10}, Shape{10}};
    Vector b = Vector::Random(10);
    auto [x, rec] = oracle::dense_gmres(op, b, Vector::Zero(10), {.eps = 1e-12});
    CHECK(rec.total_iterations == 1);
    CHECK((x - b).norm() <= 1e-12 * b.norm());
}

TEST_CASE("dense_gmres reaches the target on a random SPD system") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist;
    Matrix g(50, 50);
    for (Index i = 0; i < 50; ++i)
        for (Index j = 0; j < 50; ++j) g(i, j) = dist(rng);
    Matrix a = g * g.transpose() + 50.0 * Matrix::Identity(50, 50);
    oracle::DenseOperator op{a, Shape{50}, Shape{50}};
    Vector b = Vector::Random(50);
    SolverConfig cfg{.eps = 1e-10, .restart_m = 60, .max_restarts = 2};
    auto [x, rec] = oracle::dense_gmres(op, b, Vector::Zero(50), cfg);
    CHECK(rec.converged);
    CHECK((a * x - b).norm() / b.norm() <= 1e-10);
    Vector direct = a.partialPivLu().solve(b);
    CHECK((x - direct).norm() / direct.norm() <= 1e-8);
}

TEST_CASE("dense_gmres converges in two iterations for a two-eigenvalue matrix") {
    Matrix a = Matrix::Identity(20, 20);
    for (Index i = 10; i < 20; ++i) a(i, i) = 3.0;
    oracle::DenseOperator op{a, Shape{20}, Shape{20}};
    Vector b = Vector::Ones(20);
    auto [x, rec] = oracle::dense_gmres(op, b, Vector::Zero(20), {.eps = 1e-12, .restart_m = 10});
    CHECK(rec.total_iterations == 2);
    CHECK(rec.converged);
}

TEST_CASE("best_rank_error is zero at sufficient caps") {
    std::mt19937_64 rng(7);
    TTTensor t = tt_random(Shape{4, 4, 4}, 2, rng);
    DenseTensor x = full(t);
    std::vector<Index> caps{2, 2};
    auto r = oracle::best_rank_error(x, caps);
    CHECK(r.lower_bound <= 1e-12 * x.frobenius_norm());
    CHECK(r.achieved <= 1e-12 * x.frobenius_norm());
}

TEST_CASE("best_rank_error lower bound cross-checked by a second SVD route") {
    std::mt19937_64 rng(9);
    DenseTensor x = random_dense(Shape{4, 4, 4}, rng);
    std::vector<Index> caps{1, 1};
    auto r = oracle::best_rank_error(x, caps);

    // Independent route: eigenvalues of the Gram matrix of each unfolding.
    double lb = 0.0;
    Index rows = 1;
    for (Index k = 0; k + 1 < x.shape.dim(); ++k) {
        rows *= x.shape[k];
        ConstMatrixMap m(x.values.data(), rows, x.size() / rows);
        Matrix gram = m * m.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
        Vector ev = es.eigenvalues();  // ascending
        double tail2 = 0.0;
        for (Index i = 0; i + caps[static_cast<std::size_t>(k)] < ev.size(); ++i)
            tail2 += std::max(ev(i), 0.0);
        lb = std::max(lb, std::sqrt(tail2));
    }
    CHECK(r.lower_bound == doctest::Approx(lb).epsilon(1e-9));
    CHECK(r.achieved >= r.lower_bound * (1 - 1e-12));
}

TEST_CASE("best_rank_error decreases as caps grow") {
    std::mt19937_64 rng(11);
    DenseTensor x = random_dense(Shape{4, 4, 4}, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (Index cap = 1; cap <= 4; ++cap) {
        std::vector<Index> caps{cap, cap};
        auto r = oracle::best_rank_error(x, caps);
        CHECK(r.lower_bound <= prev * (1 + 1e-12));
        prev = r.lower_bound;
    }
}
