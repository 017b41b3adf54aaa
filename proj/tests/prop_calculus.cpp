#include <doctest.h>

#include "prop_common.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

using namespace vessiot;
using prop::Gen;

namespace {

ContextPtr rational_ctx() {
    Context::Builder b;
    b.independent("x").independent("y").independent("z").parameter("a");
    return b.build();
}

ContextPtr jet_ctx(int q) {
    Context::Builder b;
    b.independent("x1").independent("x2").dependent("u", {"x1", "x2"}).dependent("v", {"x1", "x2"}).dependent("w", {"x1"});
    b.order(q);
    return b.build();
}

RawExprPtr leaf(Gen& g, const std::vector<Var>& vars) {
    auto r = std::make_shared<RawExpr>();
    if (g.coin(55)) {
        r->op = RawExpr::Op::Var;
        r->var = g.pick(vars);
    } else {
        r->op = RawExpr::Op::Num;
        r->value = g.rational(4);
    }
    return r;
}

RawExprPtr tree(Gen& g, const std::vector<Var>& vars, int depth) {
    if (depth == 0 || g.coin(20)) return leaf(g, vars);
    auto r = std::make_shared<RawExpr>();
    switch (g.uniform(0, 5)) {
        case 0: r->op = RawExpr::Op::Add; break;
        case 1: r->op = RawExpr::Op::Sub; break;
        case 2: r->op = RawExpr::Op::Mul; break;
        case 3: r->op = RawExpr::Op::Div; break;
        case 4:
            r->op = RawExpr::Op::Pow;
            r->exponent = g.uniform(-2, 3);
            r->args.push_back(tree(g, vars, depth - 1));
            return r;
        default:
            r->op = RawExpr::Op::Neg;
            r->args.push_back(tree(g, vars, depth - 1));
            return r;
    }
    int arity = (r->op == RawExpr::Op::Add || r->op == RawExpr::Op::Mul) ? g.uniform(2, 3) : 2;
    for (int i = 0; i < arity; ++i) r->args.push_back(tree(g, vars, depth - 1));
    return r;
}

std::optional<Scalar> eval_tree(const RawExpr& e, const Point& p) {
    using Op = RawExpr::Op;
    switch (e.op) {
        case Op::Num: return e.value;
        case Op::Var: return p.at(e.var);
        case Op::Expr: return eval_point(e.expr, p);
        case Op::Neg: {
            auto a = eval_tree(*e.args[0], p);
            if (!a) return std::nullopt;
            return Scalar(-*a);
        }
        case Op::Add:
        case Op::Mul: {
            Scalar r = e.op == Op::Add ? Scalar(0) : Scalar(1);
            for (const auto& a : e.args) {
                auto v = eval_tree(*a, p);
                if (!v) return std::nullopt;
                r = e.op == Op::Add ? Scalar(r + *v) : Scalar(r * *v);
            }
            return r;
        }
        case Op::Sub:
        case Op::Div: {
            auto a = eval_tree(*e.args[0], p);
            auto b = eval_tree(*e.args[1], p);
            if (!a || !b) return std::nullopt;
            if (e.op == Op::Sub) return Scalar(*a - *b);
            if (*b == 0) return std::nullopt;
            return Scalar(*a / *b);
        }
        case Op::Pow: {
            auto a = eval_tree(*e.args[0], p);
            if (!a) return std::nullopt;
            if (e.exponent < 0 && *a == 0) return std::nullopt;
            Scalar r(1);
            for (int i = 0; i < std::abs(e.exponent); ++i) r *= *a;
            if (e.exponent < 0) r = 1 / r;
            return r;
        }
    }
    return std::nullopt;
}

VectorField random_field(Gen& g, const std::vector<Var>& support, const std::vector<Var>& vars) {
    VectorField f;
    int k = g.uniform(1, 3);
    for (int i = 0; i < k; ++i) {
        Polynomial num = g.polynomial(vars, 2, 2, 2);
        if (g.coin(30))
            f.set(g.pick(support), RationalExpr::make(num, Polynomial::variable(g.pick(vars)) + Polynomial(g.rational())));
        else
            f.set(g.pick(support), RationalExpr(num));
    }
    return f;
}

}  // namespace

TEST_CASE("canonical form agrees with direct evaluation at five points") {
    auto ctx = rational_ctx();
    std::vector<Var> vars{0, 1, 2, ctx->parameter(0)};
    Gen g(1001);
    int cases = 0, attempts = 0;
    while (cases < prop::kCanonicalCases) {
        REQUIRE(++attempts < 4 * prop::kCanonicalCases);
        auto t = tree(g, vars, g.uniform(1, 4));
        RationalExpr canon;
        try {
            canon = normalize(*t);
        } catch (const DivisionByZero&) {
            continue;
        }
        int points = 0;
        for (int tries = 0; points < 5 && tries < 40; ++tries) {
            Point p;
            for (Var v : vars) p[v] = g.point_value();
            auto direct = eval_tree(*t, p);
            if (!direct) continue;
            ++points;
            Scalar value = eval_point(canon, p);
            if (value != *direct) {
                FAIL_CHECK("mismatch for " << to_string(*ctx, canon));
                break;
            }
        }
        if (points < 5) continue;
        CHECK(parse(*ctx, to_string(*ctx, canon)) == canon);
        CHECK(canon.den().lead().c > 0);
        ++cases;
    }
    CHECK(cases == prop::kCanonicalCases);
}

TEST_CASE("formal derivatives commute") {
    auto ctx = jet_ctx(4);
    auto vars = prop::coordinates(*ctx, 2);
    vars.push_back(*ctx->jet(2, MultiIndex({2, 0})));
    Gen g(2002);
    for (int c = 0; c < prop::kCommutingCases; ++c) {
        RationalExpr e = g.expression(vars);
        std::size_t i = static_cast<std::size_t>(g.uniform(0, 1)), j = 1 - i;
        RationalExpr a = total_derivative(*ctx, total_derivative(*ctx, e, i), j);
        RationalExpr b = total_derivative(*ctx, total_derivative(*ctx, e, j), i);
        REQUIRE_MESSAGE((a - b).is_zero(), to_string(*ctx, e));
        if (c % 4 == 0) {
            MultiIndex mu({g.uniform(0, 1), g.uniform(0, 1)});
            RationalExpr step = e;
            for (std::size_t k = 0; k < 2; ++k)
                for (int r = 0; r < mu.e[k]; ++r) step = total_derivative(*ctx, step, k);
            CHECK(total_derivative(*ctx, e, mu) == step);
        }
    }
}

TEST_CASE("exterior derivative squares to zero") {
    auto ctx = jet_ctx(4);
    auto all = prop::coordinates(*ctx, 1);
    auto low = prop::coordinates(*ctx, 2);
    std::vector<Var> base{ctx->independent(0), ctx->independent(1)};
    Gen g(3003);
    for (int c = 0; c < prop::kExteriorCases; ++c) {
        bool total = g.coin(40);
        std::vector<Var> coords;
        if (total) {
            coords = base;
        } else {
            std::vector<Var> pool = all;
            std::shuffle(pool.begin(), pool.end(), g.engine());
            coords.assign(pool.begin(), pool.begin() + g.uniform(2, 5));
        }
        DerivMode mode = total ? DerivMode::Total : DerivMode::Partial;
        const std::vector<Var>& vars = total ? low : all;
        int grade = g.uniform(0, std::min<int>(2, static_cast<int>(coords.size()) - 1));
        DiffForm f(coords, grade);
        if (grade == 0) {
            f = DiffForm::scalar(coords, g.expression(vars));
        } else {
            int terms = g.uniform(1, 3);
            for (int t = 0; t < terms; ++t) {
                std::vector<int> idx(static_cast<std::size_t>(coords.size()));
                std::iota(idx.begin(), idx.end(), 0);
                std::shuffle(idx.begin(), idx.end(), g.engine());
                idx.resize(static_cast<std::size_t>(grade));
                std::sort(idx.begin(), idx.end());
                f.add_term(idx, g.expression(vars, 25));
            }
        }
        DiffForm df = exterior_derivative(*ctx, f, mode);
        CHECK(df.grade() == grade + 1);
        REQUIRE(exterior_derivative(*ctx, df, mode).is_zero(*ctx));
    }
}

TEST_CASE("bracket satisfies the Jacobi identity") {
    auto ctx = jet_ctx(3);
    auto vars = prop::coordinates(*ctx, 1);
    std::vector<Var> support(vars.begin(), vars.begin() + 7);
    Gen g(4004);
    for (int c = 0; c < prop::kJacobiCases; ++c) {
        auto a = random_field(g, support, support);
        auto b = random_field(g, support, support);
        auto d = random_field(g, support, support);
        auto j = bracket(*ctx, bracket(*ctx, a, b), d) + bracket(*ctx, bracket(*ctx, b, d), a) +
                 bracket(*ctx, bracket(*ctx, d, a), b);
        REQUIRE(j.equals(*ctx, VectorField()));
        CHECK(bracket(*ctx, a, b).equals(*ctx, bracket(*ctx, b, a).scaled(RationalExpr(-1))));
    }
}

TEST_CASE("Spencer operator annihilates holonomic sections") {
    Context::Builder b;
    b.independent("x1").independent("x2").dependent("u", {"x1", "x2"}).dependent("v", {"x1"}).hyperbolic("x1");
    b.order(4);
    auto ctx = b.build();
    std::vector<Var> xs{ctx->independent(0), ctx->independent(1), ctx->special(0), ctx->special(1)};
    std::vector<Var> x1{ctx->independent(0), ctx->special(0), ctx->special(1)};
    Gen g(5005);
    for (int c = 0; c < prop::kSpencerCases; ++c) {
        int q = g.uniform(1, 3);
        std::vector<RationalExpr> f{g.expression(xs, 30), g.expression(x1, 30)};
        auto s = holonomic_section(*ctx, f, q);
        bool zero = true;
        for (const auto& comp : spencer(*ctx, s)) zero = zero && is_zero(*ctx, comp.value);
        REQUIRE(zero);
        if (c % 10 == 0) {
            auto bent = s;
            MultiIndex mu({1, 0});
            bent.values[{0, mu.e}] = bent.at(0, mu) + RationalExpr(1);
            bool nonzero = false;
            for (const auto& comp : spencer(*ctx, bent)) nonzero = nonzero || !is_zero(*ctx, comp.value);
            CHECK(nonzero);
        }
    }
}
