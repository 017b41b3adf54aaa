#include "vessiot/geomkit.hpp"

namespace vessiot {

namespace {

RationalExpr d(const Context& ctx, const RationalExpr& e, std::size_t i) {
    return reduce(ctx, partial(ctx, e, ctx.independent(i)));
}

RationalExpr det3(const std::array<RationalExpr, 3>& a, const std::array<RationalExpr, 3>& b,
                  const std::array<RationalExpr, 3>& c) {
    return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
}

RationalExpr dot(const std::vector<RationalExpr>& a, const std::vector<RationalExpr>& b) {
    RationalExpr s;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

std::vector<RationalExpr> derive_all(const Context& ctx, const std::vector<RationalExpr>& f) {
    std::vector<RationalExpr> r;
    for (const auto& e : f) r.push_back(d(ctx, e, 0));
    return r;
}

}  // namespace

SurfaceData surface_invariants(const Context& ctx, const std::array<RationalExpr, 3>& f) {
    std::array<std::array<RationalExpr, 3>, 2> f1;
    std::array<std::array<std::array<RationalExpr, 3>, 2>, 2> f2;
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 2; ++i) {
            f1[i][k] = d(ctx, f[k], i);
            for (std::size_t j = 0; j < 2; ++j) f2[i][j][k] = d(ctx, d(ctx, f[k], i), j);
        }
    SurfaceData s;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            RationalExpr w;
            for (std::size_t k = 0; k < 3; ++k) w += f1[i][k] * f1[j][k];
            s.omega[i][j] = reduce(ctx, w);
            for (std::size_t r = 0; r < 2; ++r) {
                RationalExpr g;
                for (std::size_t k = 0; k < 3; ++k) g += f1[r][k] * f2[i][j][k];
                s.gamma[r][i][j] = reduce(ctx, g);
            }
            s.sigma[i][j] = reduce(ctx, det3(f1[0], f1[1], f2[i][j]));
        }
    s.det_omega = reduce(ctx, s.omega[0][0] * s.omega[1][1] - s.omega[0][1] * s.omega[0][1]);
    if (is_zero(ctx, s.det_omega)) throw DegenerateMetric();
    s.det_sigma = reduce(ctx, s.sigma[0][0] * s.sigma[1][1] - s.sigma[0][1] * s.sigma[0][1]);
    s.gauss_ratio = reduce(ctx, s.det_sigma / s.det_omega);
    return s;
}

RationalExpr gauss_residual(const Context& ctx, const SurfaceData& s) {
    const auto& w = s.omega;
    const auto& g = s.gamma;
    RationalExpr lhs = -(s.det_omega * (d(ctx, g[1][0][1], 0) - d(ctx, g[1][0][0], 1)));
    RationalExpr quad = w[1][1] * g[0][0][0] * g[0][1][1] + w[0][0] * g[1][0][0] * g[1][1][1] -
                        w[0][1] * (g[0][0][0] * g[1][1][1] + g[1][0][0] * g[0][1][1]);
    RationalExpr sq = w[1][1] * g[0][0][1] * g[0][0][1] + w[0][0] * g[1][0][1] * g[1][0][1] -
                      RationalExpr(2) * w[0][1] * g[0][0][1] * g[1][0][1];
    return reduce(ctx, lhs - (s.det_sigma + quad - sq));
}

namespace {

// det(omega)(d_b sigma_ab - d_a sigma_bb) minus its expression in (omega, gamma, sigma); (a, b) = (1, 2) or (2, 1)
RationalExpr codazzi_one(const Context& ctx, const SurfaceData& s, std::size_t a, std::size_t b) {
    const auto& w = s.omega;
    const auto& g = s.gamma;
    const auto& sg = s.sigma;
    // adj(omega) gamma, i.e. det(omega) times the Christoffel symbols
    auto G = [&](std::size_t l, std::size_t i, std::size_t j) {
        std::size_t o = 1 - l;
        return w[o][o] * g[l][i][j] - w[l][o] * g[o][i][j];
    };
    RationalExpr lhs = s.det_omega * (d(ctx, sg[a][b], b) - d(ctx, sg[b][b], a));
    RationalExpr rhs = G(a, b, b) * sg[a][a] + RationalExpr(2) * G(b, b, b) * sg[a][b] -
                       (G(a, a, a) + RationalExpr(2) * G(b, a, b)) * sg[b][b];
    return reduce(ctx, lhs - rhs);
}

}  // namespace

std::pair<RationalExpr, RationalExpr> codazzi_residual(const Context& ctx, const SurfaceData& s) {
    return {codazzi_one(ctx, s, 0, 1), codazzi_one(ctx, s, 1, 0)};
}

CurveData curve_invariants(const Context& ctx, const std::vector<RationalExpr>& f) {
    CurveData c;
    c.m = static_cast<int>(f.size());
    if (c.m != 2 && c.m != 3) throw Error("InvalidArgument", "curves must lie in R^2 or R^3");
    auto y1 = derive_all(ctx, f);
    auto y2 = derive_all(ctx, y1);
    c.omega = reduce(ctx, dot(y1, y1));
    if (is_zero(ctx, c.omega)) throw DegenerateCurve();
    c.gamma = reduce(ctx, dot(y1, y2));
    bool ok = is_zero(ctx, c.gamma - d(ctx, c.omega, 0) / RationalExpr(2));
    if (c.m == 2) {
        c.sigma = reduce(ctx, y1[0] * y2[1] - y1[1] * y2[0]);
        c.upsilon = reduce(ctx, dot(y2, y2));
        ok = ok && is_zero(ctx, c.omega * c.upsilon - c.gamma * c.gamma - c.sigma * c.sigma);
    } else {
        auto y3 = derive_all(ctx, y2);
        c.sigma = reduce(ctx, dot(y2, y2));
        c.phi = reduce(ctx, dot(y1, y3));
        c.psi = reduce(ctx, dot(y2, y3));
        c.upsilon = reduce(ctx, det3({y1[0], y1[1], y1[2]}, {y2[0], y2[1], y2[2]}, {y3[0], y3[1], y3[2]}));
        c.rho = reduce(ctx, c.omega * c.sigma - c.gamma * c.gamma);
        ok = ok && is_zero(ctx, c.phi - d(ctx, c.gamma, 0) + c.sigma) &&
             is_zero(ctx, c.psi - d(ctx, c.sigma, 0) / RationalExpr(2));
    }
    c.identities_hold = ok;
    return c;
}

FrenetSquares frenet_squares(const Context& ctx, const CurveData& c) {
    FrenetSquares r;
    RationalExpr w3 = c.omega.pow(3);
    if (c.m == 2) {
        r.kappa2 = reduce(ctx, c.sigma * c.sigma / w3);
        return r;
    }
    r.kappa2 = reduce(ctx, c.rho / w3);
    if (is_zero(ctx, c.rho)) throw ZeroCurvatureLocus();
    r.tau = reduce(ctx, c.upsilon / c.rho);
    return r;
}

Matrix frame_matrix(const Context& ctx, const JetSection& f, int m) {
    std::size_t n = ctx.n();
    Matrix M(m, std::vector<RationalExpr>(m));
    if (n == 1) {
        for (int k = 0; k < m; ++k)
            for (int j = 0; j < m; ++j) {
                MultiIndex mu(n);
                mu.e[0] = j + 1;
                M[k][j] = f.at(k, mu);
            }
        return M;
    }
    if (m != 3) throw Error("InvalidArgument", "surface frames need m = 3");
    std::array<std::array<RationalExpr, 3>, 2> c;
    for (std::size_t i = 0; i < 2; ++i)
        for (int k = 0; k < 3; ++k) c[i][k] = f.at(k, MultiIndex(n).bumped(i));
    for (int k = 0; k < 3; ++k) {
        M[k][0] = c[0][k];
        M[k][1] = c[1][k];
        int a = (k + 1) % 3, b = (k + 2) % 3;
        M[k][2] = reduce(ctx, c[0][a] * c[1][b] - c[0][b] * c[1][a]);
    }
    return M;
}

Gauging gauging(const Context& ctx, const JetSection& f, const JetSection& fbar, int m) {
    Matrix M = frame_matrix(ctx, f, m);
    Matrix Mb = frame_matrix(ctx, fbar, m);
    if (is_zero(ctx, determinant(ctx, M))) throw SingularFrame();
    Gauging g;
    g.A = multiply(ctx, Mb, inverse(ctx, M));
    MultiIndex zero(ctx.n());
    for (int k = 0; k < m; ++k) {
        RationalExpr s = fbar.at(k, zero);
        for (int l = 0; l < m; ++l) s -= g.A[k][l] * f.at(l, zero);
        g.B.push_back(reduce(ctx, s));
    }
    g.orthogonal = true;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            RationalExpr s = i == j ? RationalExpr(-1) : RationalExpr(0);
            for (int l = 0; l < m; ++l) s += g.A[i][l] * g.A[j][l];
            if (!is_zero(ctx, s)) g.orthogonal = false;
        }
    g.unimodular = is_zero(ctx, determinant(ctx, g.A) - RationalExpr(1));
    return g;
}

MaurerCartan maurer_cartan(const Context& ctx, const Gauging& g, std::size_t i) {
    std::size_t m = g.A.size();
    if (is_zero(ctx, determinant(ctx, g.A))) throw SingularFrame("A is singular");
    Matrix dA(m, std::vector<RationalExpr>(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) dA[a][b] = d(ctx, g.A[a][b], i);
    MaurerCartan r;
    r.P = multiply(ctx, dA, inverse(ctx, g.A));
    for (std::size_t a = 0; a < m; ++a) {
        RationalExpr s = d(ctx, g.B[a], i);
        for (std::size_t b = 0; b < m; ++b) s -= r.P[a][b] * g.B[b];
        r.Q.push_back(reduce(ctx, s));
    }
    r.skew = true;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (!is_zero(ctx, r.P[a][b] + r.P[b][a])) r.skew = false;
    return r;
}

}  // namespace vessiot
