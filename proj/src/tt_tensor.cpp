#include "ttkry/tt_tensor.hpp"

#include <atomic>
#include <stdexcept>

namespace ttkry {

namespace {
std::atomic<Index> g_rank_guard{8192};
}

Index rank_guard() { return g_rank_guard.load(); }

void set_rank_guard(Index cap) {
    if (cap < 1) throw std::invalid_argument("rank guard must be >= 1");
    g_rank_guard.store(cap);
}

Shape TTTensor::shape() const {
    std::vector<Index> sizes;
    sizes.reserve(cores.size());
    for (const auto& c : cores) sizes.push_back(c.n);
    return Shape(std::move(sizes));
}

std::vector<Index> TTTensor::ranks() const {
    std::vector<Index> r;
    r.reserve(cores.size() + 1);
    if (cores.empty()) return r;
    r.push_back(cores.front().r_left);
    for (const auto& c : cores) r.push_back(c.r_right);
    return r;
}

Index TTTensor::max_rank() const {
    Index m = 1;
    for (const auto& c : cores) m = std::max({m, c.r_left, c.r_right});
    return m;
}

Shape TTMatrix::row_shape() const {
    std::vector<Index> sizes;
    sizes.reserve(cores.size());
    for (const auto& c : cores) sizes.push_back(c.m);
    return Shape(std::move(sizes));
}

Shape TTMatrix::col_shape() const {
    std::vector<Index> sizes;
    sizes.reserve(cores.size());
    for (const auto& c : cores) sizes.push_back(c.n);
    return Shape(std::move(sizes));
}

std::vector<Index> TTMatrix::ranks() const {
    std::vector<Index> r;
    r.reserve(cores.size() + 1);
    if (cores.empty()) return r;
    r.push_back(cores.front().r_left);
    for (const auto& c : cores) r.push_back(c.r_right);
    return r;
}

Index TTMatrix::max_rank() const {
    Index m = 1;
    for (const auto& c : cores) m = std::max({m, c.r_left, c.r_right});
    return m;
}

namespace {

template <class CoreT>
std::optional<std::string> validate_chain(const std::vector<CoreT>& cores) {
    if (cores.empty()) return "empty core list";
    if (cores.front().r_left != 1)
        return "boundary rank: r_0 = " + std::to_string(cores.front().r_left) +
               " (must be 1)";
    if (cores.back().r_right != 1)
        return "boundary rank: r_d = " + std::to_string(cores.back().r_right) +
               " (must be 1)";
    for (std::size_t k = 0; k < cores.size(); ++k) {
        const auto& c = cores[k];
        if (c.r_left < 1 || c.r_right < 1)
            return "rank < 1 at core " + std::to_string(k + 1);
        if (k + 1 < cores.size() && c.r_right != cores[k + 1].r_left)
            return "rank chain at k=" + std::to_string(k + 1) + ": right rank " +
                   std::to_string(c.r_right) + " vs left rank " +
                   std::to_string(cores[k + 1].r_left);
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> validate(const TTTensor& t) {
    auto err = validate_chain(t.cores);
    if (err) return err;
    for (std::size_t k = 0; k < t.cores.size(); ++k) {
        const auto& c = t.cores[k];
        if (c.n < 1) return "mode size < 1 at core " + std::to_string(k + 1);
        if (static_cast<Index>(c.data.size()) != c.r_left * c.n * c.r_right)
            return "core data size mismatch at core " + std::to_string(k + 1);
    }
    return std::nullopt;
}

std::optional<std::string> validate(const TTMatrix& a) {
    auto err = validate_chain(a.cores);
    if (err) return err;
    for (std::size_t k = 0; k < a.cores.size(); ++k) {
        const auto& c = a.cores[k];
        if (c.m < 1 || c.n < 1)
            return "mode size < 1 at core " + std::to_string(k + 1);
        if (static_cast<Index>(c.data.size()) != c.r_left * c.m * c.n * c.r_right)
            return "core data size mismatch at core " + std::to_string(k + 1);
    }
    return std::nullopt;
}

double element(const TTTensor& t, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != t.dim())
        throw std::out_of_range("element: index length does not match dimension");
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (Index k = 0; k < t.dim(); ++k) {
        const Core3& c = t.core(k);
        const Index i = idx[static_cast<std::size_t>(k)];
        if (i < 0 || i >= c.n)
            throw std::out_of_range("element: index out of range at mode " +
                                    std::to_string(k));
        v = v * c.slice(i);
    }
    return v(0);
}

DenseTensor full(const TTTensor& t, Index max_elements) {
    if (auto err = validate(t))
        throw std::invalid_argument("full: invalid TT tensor: " + *err);
    const Shape shape = t.shape();
    const Index total = shape.num_elements();
    if (total > max_elements)
        throw std::invalid_argument("full: tensor has " + std::to_string(total) +
                                    " entries, guard is " + std::to_string(max_elements));
    // Accumulate B_k of extent (n_1*...*n_k) x r_k; with the first-index-
    // fastest layout each step is one GEMM followed by a free reshape.
    Matrix b = ConstMatrixMap(t.core(0).data.data(), t.core(0).n, t.core(0).r_right);
    for (Index k = 1; k < t.dim(); ++k) {
        const Core3& c = t.core(k);
        Matrix m = b * c.right_unfold();  // (N x r_{k-1}) * (r_{k-1} x n_k*r_k)
        b = MatrixMap(m.data(), m.rows() * c.n, c.r_right);
    }
    DenseTensor out(shape);
    Eigen::Map<Vector>(out.values.data(), total) = b.col(0).head(total);
    return out;
}

TTTensor tt_zeros(const Shape& shape) {
    check_shape(shape);
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(shape.dim()));
    for (Index k = 0; k < shape.dim(); ++k) cores.emplace_back(1, shape[k], 1);
    return TTTensor(std::move(cores));
}

TTTensor tt_ones(const Shape& shape) {
    TTTensor t = tt_zeros(shape);
    for (auto& c : t.cores) std::fill(c.data.begin(), c.data.end(), 1.0);
    return t;
}

TTTensor tt_rank_one(const std::vector<std::vector<double>>& factors) {
    if (factors.empty()) throw std::invalid_argument("tt_rank_one: no factors");
    std::vector<Core3> cores;
    cores.reserve(factors.size());
    for (const auto& f : factors) {
        if (f.empty()) throw std::invalid_argument("tt_rank_one: empty factor");
        Core3 c(1, static_cast<Index>(f.size()), 1);
        c.data = f;
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor tt_random(const Shape& shape, Index rank, std::mt19937_64& rng) {
    std::vector<Index> interior(static_cast<std::size_t>(std::max<Index>(shape.dim() - 1, 0)),
                                rank);
    return tt_random(shape, interior, rng);
}

TTTensor tt_random(const Shape& shape, const std::vector<Index>& interior_ranks,
                   std::mt19937_64& rng) {
    check_shape(shape);
    const Index d = shape.dim();
    if (static_cast<Index>(interior_ranks.size()) != d - 1)
        throw std::invalid_argument("tt_random: need d-1 interior ranks");
    // Clip each rank to the maximal rank of the corresponding unfolding.
    std::vector<Index> r(static_cast<std::size_t>(d) + 1, 1);
    for (Index k = 1; k < d; ++k) {
        Index left = 1, right = 1;
        for (Index j = 0; j < k; ++j) left = std::min<Index>(left * shape[j], 1 << 30);
        for (Index j = k; j < d; ++j) right = std::min<Index>(right * shape[j], 1 << 30);
        r[static_cast<std::size_t>(k)] =
            std::max<Index>(1, std::min({interior_ranks[static_cast<std::size_t>(k - 1)],
                                         left, right}));
    }
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Core3> cores;
    cores.reserve(static_cast<std::size_t>(d));
    for (Index k = 0; k < d; ++k) {
        Core3 c(r[static_cast<std::size_t>(k)], shape[k], r[static_cast<std::size_t>(k) + 1]);
        for (auto& x : c.data) x = dist(rng);
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTMatrix tt_identity(const Shape& shape) {
    check_shape(shape);
    std::vector<Core4> cores;
    cores.reserve(static_cast<std::size_t>(shape.dim()));
    for (Index k = 0; k < shape.dim(); ++k) {
        Core4 c(1, shape[k], shape[k], 1);
        for (Index i = 0; i < shape[k]; ++i) c(0, i, i, 0) = 1.0;
        cores.push_back(std::move(c));
    }
    return TTMatrix(std::move(cores));
}

TTMatrix tt_matrix_from_kron(const std::vector<KronTerm>& terms) {
    if (terms.empty()) throw std::invalid_argument("tt_matrix_from_kron: no terms");
    const std::size_t d = terms.front().factors.size();
    if (d == 0) throw std::invalid_argument("tt_matrix_from_kron: no factors");
    const Index nterms = static_cast<Index>(terms.size());
    for (const auto& t : terms) {
        if (t.factors.size() != d)
            throw std::invalid_argument("tt_matrix_from_kron: factor count mismatch");
        for (std::size_t k = 0; k < d; ++k) {
            if (t.factors[k].rows() != terms.front().factors[k].rows() ||
                t.factors[k].cols() != terms.front().factors[k].cols())
                throw std::invalid_argument(
                    "tt_matrix_from_kron: factor shape mismatch at mode " +
                    std::to_string(k));
        }
    }
    if (nterms > rank_guard())
        throw std::runtime_error("tt_matrix_from_kron: term count exceeds rank guard");

    std::vector<Core4> cores;
    cores.reserve(d);
    for (std::size_t k = 0; k < d; ++k) {
        const Index m = terms.front().factors[k].rows();
        const Index n = terms.front().factors[k].cols();
        const Index rl = (k == 0) ? 1 : nterms;
        const Index rr = (k + 1 == d) ? 1 : nterms;
        Core4 c(rl, m, n, rr);
        for (Index t = 0; t < nterms; ++t) {
            const Matrix& f = terms[static_cast<std::size_t>(t)].factors[k];
            const double coeff =
                (k == 0) ? terms[static_cast<std::size_t>(t)].coefficient : 1.0;
            const Index a = (k == 0) ? 0 : t;
            const Index b = (k + 1 == d) ? 0 : t;
            for (Index j = 0; j < n; ++j)
                for (Index i = 0; i < m; ++i) c(a, i, j, b) += coeff * f(i, j);
        }
        cores.push_back(std::move(c));
    }
    return TTMatrix(std::move(cores));
}

}  // namespace ttkry
