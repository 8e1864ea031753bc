#include <doctest.h>

#include "test_helpers.hpp"
#include "ttkry/oracle.hpp"
#include "ttkry/tt_round.hpp"
#include "ttkry/tt_svd.hpp"

using namespace ttkry;
using ttkry::testing::random_dense;
using ttkry::testing::rel_err;

TEST_CASE("round keeps a rank-1 tensor unchanged") {
    TTTensor t = tt_ones(Shape{3, 3, 3});
    TTTensor r = round(t, {.eps = 1e-8});
    CHECK(r.ranks() == t.ranks());
    CHECK(rel_err(full(r), full(t)) <= 1e-14);
}

TEST_CASE("round collapses add(a,a) back to the original ranks") {
    std::mt19937_64 rng(1);
    TTTensor a = tt_random(Shape{3, 4, 3, 3}, 3, rng);
    TTTensor s = add(a, a);
    TTTensor r = round(s, {.eps = 1e-12});
    CHECK(r.ranks() == round(a, {.eps = 1e-12}).ranks());
    DenseTensor want = full(a);
    for (auto& v : want.values) v *= 2.0;
    CHECK(rel_err(full(r), want) <= 1e-12);
}

TEST_CASE("round meets the relative error bound") {
    std::mt19937_64 rng(2);
    TTTensor t = tt_random(Shape{5, 5, 5, 5}, 6, rng);
    DenseTensor ft = full(t);
    TTTensor r = round(t, {.eps = 1e-3});
    CHECK(rel_err(full(r), ft) <= 1e-3);
    for (std::size_t k = 0; k < r.cores.size(); ++k) {
        CHECK(r.cores[k].r_left <= t.cores[k].r_left);
        CHECK(r.cores[k].r_right <= t.cores[k].r_right);
    }
}

TEST_CASE("round is idempotent") {
    std::mt19937_64 rng(3);
    TTTensor t = tt_random(Shape{4, 4, 4, 4}, 5, rng);
    TruncationSpec spec{.eps = 1e-2};
    TTTensor once = round(t, spec);
    TTTensor twice = round(once, spec);
    CHECK(once.ranks() == twice.ranks());
    CHECK(rel_err(full(twice), full(once)) <= 1e-13);
}

TEST_CASE("round of the zero tensor returns the canonical zero") {
    std::mt19937_64 rng(4);
    TTTensor a = tt_random(Shape{3, 3, 3}, 3, rng);
    TTTensor z = scale(add(a, a), 0.0);  // exact zeros at formal rank 6
    TTTensor r = round(z, {.eps = 1e-10});
    CHECK(r.ranks() == std::vector<Index>{1, 1, 1, 1});
    CHECK(norm(r) == 0.0);
    // A numerically (not exactly) zero difference keeps only roundoff mass.
    TTTensor noisy = round(sub(a, a), {.eps = 1e-10});
    CHECK(norm(noisy) <= 1e-12 * norm(a));
}

TEST_CASE("round respects a rank cap and quasi-optimality") {
    std::mt19937_64 rng(5);
    TTTensor t = tt_random(Shape{5, 5, 5}, 5, rng);
    DenseTensor ft = full(t);
    TTTensor capped = round(t, {.eps = 0.0, .rmax = 2});
    for (Index r : capped.ranks()) CHECK(r <= 2);
    std::vector<Index> caps{2, 2};
    auto ref = oracle::best_rank_error(ft, caps);
    double err = 0;
    {
        DenseTensor fr = full(capped);
        double e2 = 0;
        for (Index i = 0; i < ft.size(); ++i) e2 += (fr[i] - ft[i]) * (fr[i] - ft[i]);
        err = std::sqrt(e2);
    }
    CHECK(err <= std::sqrt(2.0) * ref.lower_bound * (1 + 1e-10) + 1e-14);
}

TEST_CASE("split-d policy also meets the bound") {
    std::mt19937_64 rng(6);
    TTTensor t = tt_random(Shape{4, 4, 4, 4}, 5, rng);
    DenseTensor ft = full(t);
    TTTensor r = round(t, {.eps = 1e-2, .local_policy = LocalPolicy::split_d});
    CHECK(rel_err(full(r), ft) <= 1e-2);
}

TEST_CASE("rounded_sum equals rounding the exact block sum") {
    std::mt19937_64 rng(7);
    Shape shape{4, 3, 5, 3};
    std::vector<TTTensor> ts;
    for (int i = 0; i < 5; ++i) ts.push_back(tt_random(shape, 1 + (i % 3), rng));
    std::vector<double> coeffs{0.7, -1.3, 2.0, 0.04, -0.6};

    DenseTensor want(shape);
    for (int i = 0; i < 5; ++i) {
        DenseTensor f = full(ts[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < want.size(); ++j)
            want[j] += coeffs[static_cast<std::size_t>(i)] * f[j];
    }

    std::vector<ScaledTensor> terms;
    for (int i = 0; i < 5; ++i)
        terms.push_back({coeffs[static_cast<std::size_t>(i)], &ts[static_cast<std::size_t>(i)]});

    SUBCASE("tight tolerance reproduces the dense sum") {
        TTTensor s = rounded_sum(terms, {.eps = 1e-13});
        CHECK(rel_err(full(s), want) <= 1e-12);
        CHECK_FALSE(validate(s).has_value());
    }
    SUBCASE("loose tolerance stays within the bound") {
        TTTensor s = rounded_sum(terms, {.eps = 1e-3});
        CHECK(rel_err(full(s), want) <= 1e-3);
    }
    SUBCASE("matches naive chained adds then round") {
        TTTensor acc = scale(ts[0], coeffs[0]);
        for (int i = 1; i < 5; ++i)
            acc = add(acc, scale(ts[static_cast<std::size_t>(i)],
                                 coeffs[static_cast<std::size_t>(i)]));
        TTTensor viaChain = round(acc, {.eps = 1e-13});
        TTTensor viaSum = rounded_sum(terms, {.eps = 1e-13});
        CHECK(rel_err(full(viaSum), full(viaChain)) <= 1e-12);
        CHECK(viaSum.ranks() == viaChain.ranks());
    }
}

TEST_CASE("rounded_sum handles single terms, d=1, and d=2") {
    std::mt19937_64 rng(8);
    TTTensor a1 = tt_random(Shape{7}, 1, rng);
    TTTensor b1 = tt_random(Shape{7}, 1, rng);
    std::vector<ScaledTensor> t1{{2.0, &a1}, {-1.0, &b1}};
    DenseTensor w1(Shape{7});
    for (Index i = 0; i < 7; ++i) w1[i] = 2 * full(a1)[i] - full(b1)[i];
    CHECK(rel_err(full(rounded_sum(t1, {.eps = 0.0})), w1) <= 1e-14);

    TTTensor a2 = tt_random(Shape{5, 6}, 3, rng);
    TTTensor b2 = tt_random(Shape{5, 6}, 2, rng);
    std::vector<ScaledTensor> t2{{1.0, &a2}, {1.0, &b2}};
    DenseTensor w2(Shape{5, 6});
    {
        DenseTensor fa = full(a2), fb = full(b2);
        for (Index i = 0; i < w2.size(); ++i) w2[i] = fa[i] + fb[i];
    }
    CHECK(rel_err(full(rounded_sum(t2, {.eps = 1e-13})), w2) <= 1e-12);

    std::vector<ScaledTensor> single{{3.0, &a2}};
    DenseTensor w3 = full(a2);
    for (auto& v : w3.values) v *= 3.0;
    CHECK(rel_err(full(rounded_sum(single, {.eps = 1e-13})), w3) <= 1e-12);
}

TEST_CASE("rounded_matvec stays within tolerance of the dense product") {
    std::mt19937_64 rng(9);
    Matrix id = Matrix::Identity(4, 4);
    Matrix l(4, 4);
    std::normal_distribution<double> dist;
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) l(i, j) = dist(rng);
    TTMatrix a = tt_matrix_from_kron(
        {{1.0, {l, id, id}}, {1.0, {id, l, id}}, {1.0, {id, id, l}}});
    TTTensor x = tt_random(Shape{4, 4, 4}, 3, rng);
    Vector want = oracle::dense_from_tt(a).mat * oracle::dense_vector(x);

    SUBCASE("identity operator reduces to round") {
        TTMatrix idop = tt_identity(Shape{4, 4, 4});
        TTTensor y = rounded_matvec(idop, x, {.eps = 1e-8});
        CHECK((oracle::dense_vector(y) - oracle::dense_vector(x)).norm() <=
              1e-8 * oracle::dense_vector(x).norm());
    }
    SUBCASE("tight tolerance") {
        TTTensor y = rounded_matvec(a, x, {.eps = 1e-6});
        CHECK((oracle::dense_vector(y) - want).norm() <= 1e-6 * want.norm());
    }
    SUBCASE("coarse tolerance with rank cap reports within bound") {
        TTTensor y = rounded_matvec(a, x, {.eps = 0.5, .rmax = 2});
        CHECK((oracle::dense_vector(y) - want).norm() <= 0.5 * want.norm());
        for (Index r : y.ranks()) CHECK(r <= 2);
    }
}

TEST_CASE("preconditioned_matvec with identity preconditioner equals rounded_matvec") {
    std::mt19937_64 rng(10);
    Matrix id = Matrix::Identity(3, 3);
    Matrix l(3, 3);
    std::normal_distribution<double> dist;
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) l(i, j) = dist(rng);
    TTMatrix a = tt_matrix_from_kron({{1.0, {l, id}}, {1.0, {id, l}}});
    TTMatrix m = tt_identity(Shape{3, 3});
    TTTensor v = tt_random(Shape{3, 3}, 2, rng);
    TruncationSpec spec{.eps = 1e-9};
    TTTensor lhs = preconditioned_matvec(m, a, v, spec);
    TTTensor rhs = rounded_matvec(a, v, spec);
    CHECK(rel_err(full(lhs), full(rhs)) <= 1e-8);
}

TEST_CASE("preconditioned_matvec tight tolerance matches the dense composition") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist;
    auto rnd = [&](Index n) {
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) m(i, j) = dist(rng);
        return m;
    };
    Matrix id = Matrix::Identity(3, 3);
    TTMatrix a = tt_matrix_from_kron({{1.0, {rnd(3), id, id}}, {1.0, {id, rnd(3), id}}});
    TTMatrix m = tt_matrix_from_kron({{1.0, {rnd(3), id, id}}, {0.3, {id, id, rnd(3)}}});
    TTTensor v = tt_random(Shape{3, 3, 3}, 2, rng);
    Vector want = oracle::dense_from_tt(m).mat * (oracle::dense_from_tt(a).mat *
                                                  oracle::dense_vector(v));
    TTTensor got = preconditioned_matvec(m, a, v, {.eps = 1e-12});
    CHECK((oracle::dense_vector(got) - want).norm() <= 1e-10 * want.norm());
}

TEST_CASE("round_matrix preserves the operator within tolerance") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> dist;
    Matrix id = Matrix::Identity(3, 3);
    Matrix l(3, 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) l(i, j) = dist(rng);
    // Duplicated terms: formal rank 4, true rank 2.
    TTMatrix a = tt_matrix_from_kron({{1.0, {l, id, id}},
                                      {1.0, {id, l, id}},
                                      {0.5, {l, id, id}},
                                      {0.25, {id, l, id}}});
    TTMatrix r = round_matrix(a, {.eps = 1e-12});
    CHECK(r.max_rank() <= 2);
    Matrix want = oracle::dense_from_tt(a).mat;
    Matrix got = oracle::dense_from_tt(r).mat;
    CHECK((got - want).norm() <= 1e-11 * want.norm());
}
