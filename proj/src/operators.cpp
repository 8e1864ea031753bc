#include "ttkry/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ttkry/tt_arith.hpp"

namespace ttkry {

namespace {

constexpr double kPi = std::numbers::pi;

Matrix diag_of(const std::vector<double>& v) {
    Matrix m = Matrix::Zero(static_cast<Index>(v.size()), static_cast<Index>(v.size()));
    for (Index i = 0; i < m.rows(); ++i) m(i, i) = v[static_cast<std::size_t>(i)];
    return m;
}

std::vector<double> parameter_grid(Index ny) {
    if (ny < 2) throw std::invalid_argument("parameter grid needs ny >= 2");
    std::vector<double> y(static_cast<std::size_t>(ny));
    for (Index q = 0; q < ny; ++q)
        y[static_cast<std::size_t>(q)] =
            -1.0 + 2.0 * static_cast<double>(q) / static_cast<double>(ny - 1);
    return y;
}

double kl_amplitude(Index j) {  // sqrt(lambda_j)
    const double jj = static_cast<double>(j + 1);
    return 1.0 / (2.0 * jj * jj);
}

/// 1D conservative stiffness from n+1 face samples of the coefficient.
Matrix stiffness_1d_from_faces(const Eigen::Ref<const Vector>& faces, double h) {
    const Index n = faces.size() - 1;
    Matrix a = Matrix::Zero(n, n);
    const double s = 1.0 / (h * h);
    for (Index i = 0; i < n; ++i) {
        a(i, i) = (faces(i) + faces(i + 1)) * s;
        if (i > 0) a(i, i - 1) = -faces(i) * s;
        if (i + 1 < n) a(i, i + 1) = -faces(i + 1) * s;
    }
    return a;
}

}  // namespace

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        x[static_cast<std::size_t>(i)] =
            -1.0 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return x;
}

std::vector<double> Grid1D::faces() const {
    std::vector<double> f(static_cast<std::size_t>(n) + 1);
    for (Index i = 0; i <= n; ++i)
        f[static_cast<std::size_t>(i)] =
            -1.0 + static_cast<double>(2 * i + 1) / static_cast<double>(n + 1);
    return f;
}

Matrix laplace_1d(const Grid1D& g) {
    Matrix m = Matrix::Zero(g.n, g.n);
    const double s = 1.0 / (g.h * g.h);
    for (Index i = 0; i < g.n; ++i) {
        m(i, i) = 2.0 * s;
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < g.n) m(i, i + 1) = -s;
    }
    return m;
}

Matrix grad_1d(const Grid1D& g) {
    Matrix m = Matrix::Zero(g.n, g.n);
    const double s = 0.5 / g.h;
    for (Index i = 0; i < g.n; ++i) {
        if (i > 0) m(i, i - 1) = -s;
        if (i + 1 < g.n) m(i, i + 1) = s;
    }
    return m;
}

TTMatrix conv_diff_3d(Index n, double alpha) {
    if (alpha <= 0) throw std::invalid_argument("conv_diff_3d: alpha must be positive");
    const Grid1D g(n);
    const Matrix l1 = laplace_1d(g);
    const Matrix g1 = grad_1d(g);
    const Matrix id = Matrix::Identity(n, n);
    const auto x = g.nodes();

    std::vector<double> one_minus_x2(x.size()), two_x(x.size()), minus_two_x(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        one_minus_x2[i] = 1.0 - x[i] * x[i];
        two_x[i] = 2.0 * x[i];
        minus_two_x[i] = -2.0 * x[i];
    }

    std::vector<KronTerm> terms;
    terms.push_back({alpha, {l1, id, id}});
    terms.push_back({alpha, {id, l1, id}});
    terms.push_back({alpha, {id, id, l1}});
    terms.push_back({1.0, {diag_of(one_minus_x2) * g1, diag_of(two_x), id}});
    terms.push_back({1.0, {diag_of(minus_two_x), diag_of(one_minus_x2) * g1, id}});

    return round_matrix(tt_matrix_from_kron(terms), {.eps = 1e-12});
}

TTTensor conv_diff_rhs(Index n, double alpha) {
    if (alpha <= 0) throw std::invalid_argument("conv_diff_rhs: alpha must be positive");
    const Grid1D g(n);
    const auto x = g.nodes();
    const double y_top = x[static_cast<std::size_t>(n - 1)];  // last interior node

    // Ghost-node elimination on the y = 1 face: the eliminated neighbor
    // couples through -alpha/h^2 (diffusion) and -2 x_i (1-y_top^2) * 0.5/h
    // (convection), both moved to the right-hand side with u = 1.
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    std::vector<double> delta_top(static_cast<std::size_t>(n), 0.0);
    delta_top[static_cast<std::size_t>(n - 1)] = 1.0;

    std::vector<double> diffusion(static_cast<std::size_t>(n),
                                  alpha / (g.h * g.h));
    std::vector<double> convection(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < x.size(); ++i)
        convection[i] = 2.0 * x[i] * (1.0 - y_top * y_top) * 0.5 / g.h;

    TTTensor b = add(tt_rank_one({diffusion, delta_top, ones}),
                     tt_rank_one({convection, delta_top, ones}));
    return b;
}

TTMatrix inv_laplace_expsum(Index n, Index d, Index m_quad) {
    if (m_quad < 1) throw std::invalid_argument("inv_laplace_expsum: need M >= 1");
    if (d < 1) throw std::invalid_argument("inv_laplace_expsum: need d >= 1");
    const Grid1D g(n);

    // Analytic eigendecomposition of the 1D stencil: sine vectors and
    // eigenvalues (2/h^2)(1 - cos(k pi / (n+1))).
    Matrix s(n, n);
    Vector lambda(n);
    const double theta = kPi / static_cast<double>(n + 1);
    const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
    for (Index k = 0; k < n; ++k) {
        lambda(k) = 2.0 / (g.h * g.h) * (1.0 - std::cos(theta * static_cast<double>(k + 1)));
        for (Index i = 0; i < n; ++i)
            s(i, k) = scale * std::sin(theta * static_cast<double>((i + 1) * (k + 1)));
    }

    const double eta = kPi / std::sqrt(static_cast<double>(m_quad));
    std::vector<KronTerm> terms;
    terms.reserve(static_cast<std::size_t>(2 * m_quad + 1));
    for (Index k = -m_quad; k <= m_quad; ++k) {
        const double tk = std::exp(eta * static_cast<double>(k));
        Vector damp(n);
        for (Index i = 0; i < n; ++i) damp(i) = std::exp(-tk * lambda(i));
        Matrix ek = s * damp.asDiagonal() * s.transpose();
        KronTerm term;
        term.coefficient = eta * tk;
        term.factors.assign(static_cast<std::size_t>(d), ek);
        terms.push_back(std::move(term));
    }
    return round_matrix(tt_matrix_from_kron(terms), {.eps = 1e-12});
}

TTTensor kl_coefficient(Index nx, Index ny, Index d) {
    if (d < 1) throw std::invalid_argument("kl_coefficient: need d >= 1");
    const Grid1D g(nx);
    const auto faces = g.faces();
    const auto y = parameter_grid(ny);

    // Rigorous ellipticity bound: 1 - sum_j sqrt(lambda_j) > 1/2 for every
    // d, but guard against any future amplitude change.
    double bound = 1.0;
    for (Index j = 1; j <= d; ++j) bound -= kl_amplitude(j);
    if (bound <= 0.0)
        throw std::invalid_argument("kl_coefficient: ellipticity violated");

    const std::vector<double> ones_x(faces.size(), 1.0);
    const std::vector<double> ones_y(y.size(), 1.0);

    TTTensor acc;
    {
        std::vector<std::vector<double>> factors(static_cast<std::size_t>(d) + 1, ones_y);
        factors[0] = ones_x;
        acc = tt_rank_one(factors);
    }
    for (Index j = 1; j <= d; ++j) {
        std::vector<double> mode(faces.size());
        const double amp = kl_amplitude(j);
        for (std::size_t i = 0; i < faces.size(); ++i)
            mode[i] = amp * std::sin(kPi * static_cast<double>(j) * faces[i]);
        std::vector<std::vector<double>> factors(static_cast<std::size_t>(d) + 1, ones_y);
        factors[0] = mode;
        factors[static_cast<std::size_t>(j)] = y;
        acc = add(acc, tt_rank_one(factors));
    }
    return round(acc, {.eps = 1e-12});
}

TTMatrix kl_stiffness(Index nx, Index ny, Index d) {
    const Grid1D g(nx);
    const auto faces = g.faces();
    const Index nfaces = static_cast<Index>(faces.size());

    Vector ones_faces = Vector::Ones(nfaces);
    if (d == 0) {
        KronTerm t{1.0, {stiffness_1d_from_faces(ones_faces, g.h)}};
        return tt_matrix_from_kron({t});
    }
    const auto y = parameter_grid(ny);
    const Matrix idy = Matrix::Identity(ny, ny);

    std::vector<KronTerm> terms;
    {
        KronTerm t;
        t.coefficient = 1.0;
        t.factors.assign(static_cast<std::size_t>(d) + 1, idy);
        t.factors[0] = stiffness_1d_from_faces(ones_faces, g.h);
        terms.push_back(std::move(t));
    }
    for (Index j = 1; j <= d; ++j) {
        Vector mode(nfaces);
        const double amp = kl_amplitude(j);
        for (Index i = 0; i < nfaces; ++i)
            mode(i) = amp * std::sin(kPi * static_cast<double>(j) *
                                     faces[static_cast<std::size_t>(i)]);
        KronTerm t;
        t.coefficient = 1.0;
        t.factors.assign(static_cast<std::size_t>(d) + 1, idy);
        t.factors[0] = stiffness_1d_from_faces(mode, g.h);
        t.factors[static_cast<std::size_t>(j)] = diag_of(y);
        terms.push_back(std::move(t));
    }
    return round_matrix(tt_matrix_from_kron(terms), {.eps = 1e-12});
}

TTMatrix stiffness_from_coefficient(const TTTensor& coeff, double h) {
    if (auto err = validate(coeff))
        throw std::invalid_argument("stiffness_from_coefficient: " + *err);
    const Index nfaces = coeff.core(0).n;
    const Index n = nfaces - 1;
    if (n < 2) throw std::invalid_argument("stiffness_from_coefficient: too few faces");

    std::vector<Core4> cores;
    cores.reserve(coeff.cores.size());
    {
        const Core3& c0 = coeff.core(0);
        Core4 op(1, n, n, c0.r_right);
        for (Index b = 0; b < c0.r_right; ++b) {
            Vector faces(nfaces);
            for (Index i = 0; i < nfaces; ++i) faces(i) = c0(0, i, b);
            Matrix a = stiffness_1d_from_faces(faces, h);
            for (Index jj = 0; jj < n; ++jj)
                for (Index ii = 0; ii < n; ++ii) op(0, ii, jj, b) = a(ii, jj);
        }
        cores.push_back(std::move(op));
    }
    for (Index k = 1; k < coeff.dim(); ++k) {
        const Core3& c = coeff.core(k);
        Core4 op(c.r_left, c.n, c.n, c.r_right);
        for (Index b = 0; b < c.r_right; ++b)
            for (Index i = 0; i < c.n; ++i)
                for (Index a = 0; a < c.r_left; ++a) op(a, i, i, b) = c(a, i, b);
        cores.push_back(std::move(op));
    }
    return TTMatrix(std::move(cores));
}

NewtonResult newton_reciprocal(const TTTensor& a, const TruncationSpec& spec,
                               Index maxit) {
    if (auto err = validate(a))
        throw std::invalid_argument("newton_reciprocal: " + *err);
    if (maxit < 1) throw std::invalid_argument("newton_reciprocal: maxit must be >= 1");

    const Shape shape = a.shape();
    const TTTensor ones = tt_ones(shape);
    const double ones_norm = norm(ones);

    TruncationSpec stage = spec;  // intermediate products, tighter than the update
    stage.eps = spec.eps * 0.1;

    NewtonResult out;
    out.value = ones;
    double prev_res = std::numeric_limits<double>::infinity();
    Index growth_streak = 0;

    for (Index it = 1; it <= maxit; ++it) {
        out.iterations = it;
        TTTensor ax = round(hadamard(a, out.value), stage);
        std::vector<ScaledTensor> resid_terms{{1.0, &ax}, {-1.0, &ones}};
        const double res = norm(rounded_sum(resid_terms, stage)) / ones_norm;
        out.residual = res;
        if (res <= spec.eps) {
            out.converged = true;
            return out;
        }
        if (res >= prev_res) {
            if (++growth_streak >= 3)
                throw std::runtime_error(
                    "newton_reciprocal: diverging (residual grew three times in a row, "
                    "last " + std::to_string(res) + ")");
        } else {
            growth_streak = 0;
        }
        prev_res = res;

        std::vector<ScaledTensor> upd_terms{{2.0, &ones}, {-1.0, &ax}};
        TTTensor upd = rounded_sum(upd_terms, stage);
        out.value = round(hadamard(out.value, upd), spec);
    }
    out.converged = false;
    return out;
}

TTTensor P2Preconditioner::apply(const TTTensor& v, double tol) const {
    TruncationSpec spec{.eps = tol, .rmax = rmax};
    TTTensor w = rounded_matvec(inv_laplace, v, spec);
    w = rounded_matvec(gamma_recip, w, spec);
    return rounded_matvec(inv_laplace, w, spec);
}

P2Preconditioner p2_preconditioner(Index nx, Index ny, Index d,
                                   const TruncationSpec& spec, Index m_quad) {
    const Grid1D g(nx);

    // Exponential-sum inverse of the 1D stencil, dense in the x slot.
    TTMatrix dinv1 = inv_laplace_expsum(nx, 1, m_quad);
    Matrix q(nx, nx);
    {
        const Core4& c = dinv1.core(0);
        for (Index j = 0; j < nx; ++j)
            for (Index i = 0; i < nx; ++i) q(i, j) = c(0, i, j, 0);
    }

    P2Preconditioner p2;
    p2.rmax = spec.rmax;
    if (d == 0) {
        p2.inv_laplace = tt_matrix_from_kron({{1.0, {q}}});
    } else {
        KronTerm t;
        t.coefficient = 1.0;
        t.factors.assign(static_cast<std::size_t>(d) + 1, Matrix::Identity(ny, ny));
        t.factors[0] = q;
        p2.inv_laplace = tt_matrix_from_kron({t});
    }

    if (d == 0) {
        Vector ones_faces = Vector::Ones(nx + 1);
        p2.gamma_recip =
            tt_matrix_from_kron({{1.0, {stiffness_1d_from_faces(ones_faces, g.h)}}});
        p2.newton.converged = true;
        p2.newton.value = tt_ones(Shape{nx + 1});
    } else {
        TTTensor a = kl_coefficient(nx, ny, d);
        p2.newton = newton_reciprocal(a, spec);
        p2.gamma_recip = stiffness_from_coefficient(p2.newton.value, g.h);
    }
    return p2;
}

}  // namespace ttkry
