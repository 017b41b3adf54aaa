#include "vessiot/mechanics.hpp"

#include "vessiot/linalg.hpp"

namespace vessiot {

namespace {

RationalExpr d(const Context& ctx, const RationalExpr& e, std::size_t i) {
    return reduce(ctx, total_derivative(ctx, e, i));
}

void require_zero(const Context& ctx, CheckReport& rep, const RationalExpr& e, const std::string& step) {
    RationalExpr r = reduce(ctx, e);
    if (r.is_zero()) return;
    if (rep.ok) rep.witness = to_string(ctx, r);
    rep.ok = false;
    rep.notes.push_back("nonzero: " + step);
}

void require_zero(const Context& ctx, CheckReport& rep, const DiffForm& f, const std::string& step) {
    if (f.is_zero(ctx)) return;
    for (const auto& [idx, c] : f.terms()) {
        RationalExpr r = reduce(ctx, c);
        if (r.is_zero()) continue;
        if (rep.ok) rep.witness = to_string(ctx, r);
        break;
    }
    rep.ok = false;
    rep.notes.push_back("nonzero: " + step);
}

CheckReport fresh() {
    CheckReport r;
    r.ok = true;
    return r;
}

// d/dxbar^j = sum_k (J^{-1})_{kj} d_k with J_{jk} = d_k phi^j
struct ChangeOfVariables {
    Matrix J, Jinv;
    RationalExpr delta;
};

ChangeOfVariables change_of_variables(const Context& ctx, const std::vector<RationalExpr>& phi) {
    std::size_t n = ctx.n();
    if (phi.size() != n) throw Error("InvalidArgument", "change of variables needs one component per independent");
    ChangeOfVariables c;
    c.J.assign(n, std::vector<RationalExpr>(n));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) c.J[j][k] = d(ctx, phi[j], k);
    c.delta = reduce(ctx, determinant(ctx, c.J));
    if (is_zero(ctx, c.delta)) throw Error("SingularFrame", "change of variables has zero jacobian");
    c.Jinv = inverse(ctx, c.J);
    return c;
}

RationalExpr dbar(const Context& ctx, const ChangeOfVariables& c, const RationalExpr& e, std::size_t j) {
    RationalExpr s;
    for (std::size_t k = 0; k < ctx.n(); ++k) s += c.Jinv[k][j] * total_derivative(ctx, e, k);
    return s;
}

}  // namespace

Bindings solve_for(const Context& ctx, const RationalExpr& relation, Var jet) {
    RationalExpr r = reduce(ctx, relation);
    const Polynomial& num = r.num();
    if (num.degree_in(jet) != 1) throw Error("InvalidArgument", ctx.name(jet) + " does not occur linearly");
    auto co = num.coefficients_in(jet);
    return {{jet, reduce(ctx, -RationalExpr(co[0]) / RationalExpr(co[1]))}};
}

CheckReport lie_condition_equivalence(const Context& ctx, const RationalExpr& xi, const RationalExpr& eta,
                                      const RationalExpr& F, Var designated, const std::optional<RationalExpr>& chi) {
    CheckReport rep = fresh();
    RationalExpr c1 = d(ctx, eta, 0) + F * d(ctx, eta, 1) - F * d(ctx, xi, 0) - F * F * d(ctx, xi, 1) -
                      d(ctx, F, 0) * xi - d(ctx, F, 1) * eta;
    RationalExpr u = eta - F * xi;
    RationalExpr c2 = d(ctx, u, 0) + F * d(ctx, u, 1) - d(ctx, F, 1) * u;
    require_zero(ctx, rep, c1 - c2, "regrouped invariance condition");
    RationalExpr x = chi ? *chi : u.inverse();
    RationalExpr omega = -F;
    RationalExpr e = d(ctx, x, 0) - d(ctx, omega * x, 1);
    Bindings b = solve_for(ctx, c1, designated);
    require_zero(ctx, rep, substitute(e, b), "integrating factor condition");
    rep.notes.push_back("solved for " + ctx.name(designated));
    return rep;
}

RationalExpr divergence(const Context& ctx, const RationalExpr& M, const std::vector<RationalExpr>& theta) {
    RationalExpr s;
    for (std::size_t i = 0; i < theta.size(); ++i) s += total_derivative(ctx, M * theta[i], i);
    return reduce(ctx, s);
}

CheckReport jacobi_multiplier_identity(const Context& ctx, const std::vector<RationalExpr>& phi) {
    CheckReport rep = fresh();
    auto c = change_of_variables(ctx, phi);
    for (std::size_t i = 0; i < ctx.n(); ++i) {
        RationalExpr s;
        for (std::size_t j = 0; j < ctx.n(); ++j) s += dbar(ctx, c, c.J[j][i] / c.delta, j);
        require_zero(ctx, rep, s, "identity for x^" + std::to_string(i + 1));
    }
    rep.numbers["n"] = ctx.n();
    return rep;
}

CheckReport multiplier_transport(const Context& ctx, const RationalExpr& M, const std::vector<RationalExpr>& theta,
                                 const std::vector<RationalExpr>& phi) {
    RationalExpr div = divergence(ctx, M, theta);
    if (!is_zero(ctx, div)) throw NotAMultiplier(to_string(ctx, div));
    CheckReport rep = fresh();
    auto c = change_of_variables(ctx, phi);
    RationalExpr s;
    for (std::size_t j = 0; j < ctx.n(); ++j) {
        RationalExpr tb;
        for (std::size_t i = 0; i < ctx.n(); ++i) tb += c.J[j][i] * theta[i];
        s += dbar(ctx, c, M / c.delta * tb, j);
    }
    require_zero(ctx, rep, s, "transported divergence");
    return rep;
}

CheckReport hessian_multiplier_identity(const Context& ctx, const RationalExpr& L) {
    CheckReport rep = fresh();
    RationalExpr v = RationalExpr::variable(ctx.independent(2));
    RationalExpr Lv = d(ctx, L, 2), Lx = d(ctx, L, 1);
    RationalExpr Lvv = d(ctx, Lv, 2), Ltv = d(ctx, Lv, 0), Lxv = d(ctx, Lv, 1);
    RationalExpr e = d(ctx, Lvv, 0) + d(ctx, v * Lvv, 1) + d(ctx, Lx - Ltv - v * Lxv, 2);
    require_zero(ctx, rep, e, "hessian multiplier identity");
    return rep;
}

CheckReport hj_closure_chain(const Context& ctx, const RationalExpr& H, const ContactUnknowns& u) {
    CheckReport rep = fresh();
    std::vector<Var> co{ctx.independent(0), ctx.independent(1), ctx.independent(2), ctx.independent(3)};
    Var t = co[0], x = co[1], z = co[2], p = co[3];
    RationalExpr pe = RationalExpr::variable(p);
    auto df = [&](const RationalExpr& f) { return DiffForm::differential(ctx, co, f); };
    auto dv = [&](Var v) { return DiffForm::differential(ctx, co, RationalExpr::variable(v)); };
    DiffForm alpha = dv(z) - dv(x).scaled(pe) + dv(t).scaled(H);
    DiffForm beta = df(u.Z) - df(u.X).scaled(u.P);

    DiffForm two = exterior_derivative(ctx, alpha);
    DiffForm dH = df(H);
    require_zero(ctx, rep, two - (wedge(dv(x), dv(p)) + wedge(dH, dv(t))), "two-form dx^dp + dH^dt");
    require_zero(ctx, rep, exterior_derivative(ctx, beta) - wedge(df(u.X), df(u.P)), "two-form dX^dP");

    DiffForm three = wedge(alpha, two);
    DiffForm shown = wedge(dv(z), wedge(dv(x), dv(p))) + wedge(dv(z), wedge(dH, dv(t))) -
                     wedge(dv(x), wedge(dH, dv(t))).scaled(pe) + wedge(dv(t), wedge(dv(x), dv(p))).scaled(H);
    require_zero(ctx, rep, three - shown, "wedge step");
    require_zero(ctx, rep, wedge(beta, exterior_derivative(ctx, beta)) - wedge(df(u.Z), wedge(df(u.X), df(u.P))),
                 "wedge step dZ^dX^dP");
    if (u.rho) {
        DiffForm rb = beta.scaled(*u.rho);
        DiffForm lhs = wedge(rb, exterior_derivative(ctx, rb));
        require_zero(ctx, rep, lhs - wedge(beta, exterior_derivative(ctx, beta)).scaled(u.rho->pow(2)),
                     "rho^2 factor");
    }

    DiffForm four = exterior_derivative(ctx, three);
    require_zero(ctx, rep, four - wedge(two, two), "four-form d(alpha^d alpha) = d alpha^d alpha");
    require_zero(ctx, rep, exterior_derivative(ctx, wedge(beta, exterior_derivative(ctx, beta))), "closed contact side");
    RationalExpr coef = reduce(ctx, four.coefficient({t, x, z, p}));
    RationalExpr Hz = d(ctx, H, 2);
    require_zero(ctx, rep, coef - RationalExpr(2) * Hz, "coefficient 2 H_z");
    rep.numbers["coefficient"] = to_string(ctx, coef);
    rep.numbers["compatible"] = coef.is_zero();
    return rep;
}

CheckReport separability_conditions(const Context& ctx, const RationalExpr& H) {
    RationalExpr Hp = d(ctx, H, 3);
    if (is_zero(ctx, Hp)) throw DegenerateHamiltonian();
    CheckReport rep = fresh();
    RationalExpr c1 = d(ctx, H, 2);
    RationalExpr c2 = d(ctx, d(ctx, H, 1) / Hp, 0);
    require_zero(ctx, rep, c1, "H_z = 0");
    require_zero(ctx, rep, c2, "d_t(H_x / H_p) = 0");
    rep.numbers["H_z"] = to_string(ctx, c1);
    rep.numbers["levi_civita"] = to_string(ctx, c2);
    return rep;
}

}  // namespace vessiot
