#include <doctest.h>

#include "test_helpers.hpp"
#include "ttkry/oracle.hpp"
#include "ttkry/tt_arith.hpp"
#include "ttkry/tt_svd.hpp"

using namespace ttkry;
using ttkry::testing::random_dense;
using ttkry::testing::rel_err;

TEST_CASE("tt_svd meets the requested relative tolerance") {
    std::mt19937_64 rng(41);
    DenseTensor x = random_dense(Shape{5, 4, 5, 4}, rng);
    for (double eps : {1e-1, 1e-3, 1e-8}) {
        TTTensor t = tt_svd(x, eps);
        CHECK(rel_err(full(t), x) <= eps);
    }
}

TEST_CASE("tt_svd per-bond caps are honored") {
    std::mt19937_64 rng(43);
    DenseTensor x = random_dense(Shape{4, 4, 4}, rng);
    std::vector<Index> caps{2, 3};
    TTTensor t = tt_svd(x, 0.0, caps);
    auto r = t.ranks();
    CHECK(r[1] <= 2);
    CHECK(r[2] <= 3);
}

TEST_CASE("tt_svd of a 1-d tensor is the vector itself") {
    std::mt19937_64 rng(47);
    DenseTensor x = random_dense(Shape{9}, rng);
    TTTensor t = tt_svd(x, 1e-3);
    CHECK(t.dim() == 1);
    CHECK(rel_err(full(t), x) == 0.0);
}

TEST_CASE("quantize splits selected modes only") {
    std::mt19937_64 rng(53);
    TTTensor t = tt_svd(random_dense(Shape{8, 3, 4}, rng), 0.0);
    TTTensor q = quantize_modes(t, 2, {true, false, true});
    CHECK(q.shape() == Shape{2, 2, 2, 3, 2, 2});
    std::vector<Index> grouping{3, 1, 2};
    TTTensor back = dequantize(q, grouping, 2);
    CHECK(back.shape() == Shape{8, 3, 4});
    CHECK(rel_err(full(back), full(t)) <= 1e-13);
}

TEST_CASE("quantize_matrix_mode preserves the operator action") {
    std::mt19937_64 rng(59);
    std::normal_distribution<double> dist;
    Matrix m(8, 8);
    for (Index i = 0; i < 8; ++i)
        for (Index j = 0; j < 8; ++j) m(i, j) = dist(rng);
    Matrix id = Matrix::Identity(3, 3);
    TTMatrix a = tt_matrix_from_kron({{1.0, {m, id}}});
    TTMatrix q = quantize_matrix_mode(a, 0, 2);
    CHECK(q.dim() == 4);  // three binary operator modes + the untouched one

    TTTensor x = tt_random(Shape{8, 3}, 2, rng);
    TTTensor qx = quantize_modes(x, 2, {true, false});
    TTTensor qy = matvec(q, qx);
    TTTensor y = dequantize(qy, std::vector<Index>{3, 1}, 2);
    Vector want = oracle::dense_from_tt(a).mat * oracle::dense_vector(x);
    Vector got = oracle::dense_vector(y);
    CHECK((got - want).norm() <= 1e-12 * want.norm());
}

TEST_CASE("element and full stay consistent across random shapes") {
    std::mt19937_64 rng(61);
    for (int rep = 0; rep < 5; ++rep) {
        std::uniform_int_distribution<int> dd(2, 5), nn(2, 6), rr(1, 8);
        const int d = dd(rng);
        std::vector<Index> sizes;
        for (int k = 0; k < d; ++k) sizes.push_back(nn(rng));
        TTTensor t = tt_random(Shape(sizes), rr(rng), rng);
        DenseTensor f = full(t);
        double scale = 0;
        for (double v : f.values) scale = std::max(scale, std::abs(v));
        std::uniform_int_distribution<Index> pick(0, f.size() - 1);
        for (int probe = 0; probe < 20; ++probe) {
            const Index lin = pick(rng);
            auto idx = unflatten_index(f.shape, lin);
            CHECK(std::abs(element(t, idx) - f[lin]) <= 1e-12 * scale);
        }
    }
}
