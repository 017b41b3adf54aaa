#include "vessiot/systems.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vessiot {

bool SolvedSystem::fully_solved() const {
    return !equations.empty() &&
           std::all_of(equations.begin(), equations.end(), [](const Equation& e) { return e.leading.has_value(); });
}

Bindings SolvedSystem::leading_bindings() const {
    Bindings b;
    for (const auto& e : equations)
        if (e.leading) b[*e.leading] = RationalExpr::variable(*e.leading) - e.residual;
    return b;
}

SolvedSystem make_system(const Context& ctx, int order, std::vector<std::size_t> ordering, std::vector<int> unknowns,
                         const std::vector<EquationSpec>& eqs, std::vector<RationalExpr> genericity) {
    if (ordering.empty())
        for (std::size_t i = 0; i < ctx.n(); ++i) ordering.push_back(i);
    if (ordering.size() != ctx.n()) throw Error("InvalidSystem", "ordering must list every independent once");
    {
        std::set<std::size_t> seen(ordering.begin(), ordering.end());
        if (seen.size() != ctx.n() || *seen.rbegin() >= ctx.n())
            throw Error("InvalidSystem", "ordering must be a permutation of the independents");
    }
    if (unknowns.empty())
        for (std::size_t k = 0; k < ctx.dependents().size(); ++k) unknowns.push_back(static_cast<int>(k));
    if (order > ctx.max_order()) throw OrderOverflow("system order exceeds the context order");

    SolvedSystem s;
    s.order = order;
    s.ordering = std::move(ordering);
    s.unknowns = std::move(unknowns);
    s.genericity = std::move(genericity);

    Bindings leads;
    for (const auto& eq : eqs) {
        if (!eq.solved) continue;
        auto vs = eq.lhs.variables();
        if (!eq.lhs.is_polynomial() || vs.size() != 1 || eq.lhs != RationalExpr::variable(*vs.begin()))
            throw Error("InvalidSystem", "solved equation must have a single jet on the left: " + eq.label);
        Var v = *vs.begin();
        if (!ctx.is_jet(v) ||
            std::find(s.unknowns.begin(), s.unknowns.end(), ctx.id(v).index) == s.unknowns.end())
            throw Error("InvalidSystem", "leading variable is not a jet of an unknown: " + ctx.name(v));
        if (leads.count(v)) throw Error("InvalidSystem", "duplicate leading jet " + ctx.name(v));
        leads[v] = eq.rhs;
    }
    for (const auto& eq : eqs) {
        Equation e;
        e.label = eq.label;
        if (eq.solved) {
            Var v = *eq.lhs.variables().begin();
            RationalExpr rhs = reduce(ctx, substitute(eq.rhs, leads));
            e.leading = v;
            e.residual = RationalExpr::variable(v) - rhs;
        } else {
            e.residual = reduce(ctx, eq.lhs - eq.rhs);
        }
        e.source = static_cast<int>(s.equations.size());
        e.nu = MultiIndex(ctx.n());
        s.equations.push_back(std::move(e));
    }
    return s;
}

int jet_class(const Context& ctx, const std::vector<std::size_t>& ordering, Var v) {
    const auto& mu = ctx.id(v).mu;
    for (std::size_t c = 0; c < ordering.size(); ++c)
        if (mu.e[ordering[c]] > 0) return static_cast<int>(c) + 1;
    return 0;
}

std::vector<Var> unknown_jets(const Context& ctx, const SolvedSystem& s, int k) {
    std::vector<Var> out;
    for (int d : s.unknowns) {
        auto js = ctx.jets_of_order(d, k);
        out.insert(out.end(), js.begin(), js.end());
    }
    return out;
}

std::vector<Var> unknown_jets_up_to(const Context& ctx, const SolvedSystem& s, int q) {
    std::vector<Var> out;
    for (int k = 0; k <= q; ++k) {
        auto js = unknown_jets(ctx, s, k);
        out.insert(out.end(), js.begin(), js.end());
    }
    return out;
}

int equation_order(const Context& ctx, const SolvedSystem& s, const Equation& e) {
    int o = -1;
    for (Var v : e.residual.variables())
        if (ctx.is_jet(v) && std::find(s.unknowns.begin(), s.unknowns.end(), ctx.id(v).index) != s.unknowns.end())
            o = std::max(o, ctx.jet_order(v));
    return o;
}

namespace {

Matrix jacobian_rows(const Context& ctx, const std::vector<Equation>& eqs, const Bindings& b,
                     const std::vector<Var>& cols) {
    Matrix m;
    for (const auto& e : eqs) {
        std::vector<RationalExpr> row;
        row.reserve(cols.size());
        for (Var v : cols) {
            RationalExpr d = partial(ctx, e.residual, v);
            if (!d.is_zero() && !b.empty()) d = reduce(ctx, substitute(d, b));
            row.push_back(std::move(d));
        }
        m.push_back(std::move(row));
    }
    return m;
}

}  // namespace

Matrix jacobian(const Context& ctx, const SolvedSystem& s, const std::vector<Var>& cols) {
    return jacobian_rows(ctx, s.equations, s.leading_bindings(), cols);
}

namespace {

bool is_unknown(const Context& ctx, const SolvedSystem& s, Var v) {
    return ctx.is_jet(v) && std::find(s.unknowns.begin(), s.unknowns.end(), ctx.id(v).index) != s.unknowns.end();
}

// Solves each new row for its top-order jet of highest class; rows left without top jets are conditions.
void resolve_level(const Context& ctx, SolvedSystem& out, std::vector<Equation>& rows, Bindings& leads, int top) {
    std::vector<Equation> solved;
    Bindings level;
    for (auto& e : rows) {
        RationalExpr r = reduce(ctx, substitute(e.residual, level));
        std::optional<Var> pivot;
        int best = -1;
        for (Var v : r.variables()) {
            if (!is_unknown(ctx, out, v) || ctx.jet_order(v) != top) continue;
            int c = jet_class(ctx, out.ordering, v);
            if (c > best || (c == best && v < *pivot)) {
                best = c;
                pivot = v;
            }
        }
        if (!pivot) {
            if (!is_zero(ctx, r)) out.conditions.push_back(r);
            continue;
        }
        RationalExpr coef = reduce(ctx, partial(ctx, r, *pivot));
        if (!coef.is_constant() && std::find(out.genericity.begin(), out.genericity.end(), coef) == out.genericity.end())
            out.genericity.push_back(coef);
        RationalExpr rhs = reduce(ctx, RationalExpr::variable(*pivot) - r / coef);
        Bindings one{{*pivot, rhs}};
        for (auto& [v, x] : level) x = reduce(ctx, substitute(x, one));
        for (auto& q : solved) q.residual = reduce(ctx, substitute(q.residual, one));
        level[*pivot] = rhs;
        e.leading = *pivot;
        e.residual = RationalExpr::variable(*pivot) - rhs;
        solved.push_back(e);
    }
    for (auto& q : solved) leads[*q.leading] = RationalExpr::variable(*q.leading) - q.residual;
    rows = std::move(solved);
}

}  // namespace

SolvedSystem prolong_system(const Context& ctx, const SolvedSystem& s, int r) {
    if (r < 0) throw Error("InvalidSystem", "negative prolongation order");
    if (s.order + r > ctx.max_order()) throw OrderOverflow("prolongation exceeds the context order");
    const bool solved = s.fully_solved();
    SolvedSystem out = s;
    Bindings leads = s.leading_bindings();
    std::map<std::pair<int, std::vector<int>>, bool> seen;
    for (const auto& e : s.equations) seen[{e.source, e.nu.e}] = true;
    std::vector<Equation> frontier = s.equations;
    for (int level = 1; level <= r; ++level) {
        std::vector<Equation> next;
        for (const auto& e : frontier)
            for (std::size_t i = 0; i < ctx.n(); ++i) {
                MultiIndex nu = e.nu.bumped(i);
                auto key = std::make_pair(e.source, nu.e);
                if (seen.count(key)) continue;
                seen[key] = true;
                Equation d;
                d.residual = reduce(ctx, total_derivative(ctx, e.residual, i));
                if (solved) d.residual = reduce(ctx, substitute(d.residual, leads));
                d.source = e.source;
                d.nu = nu;
                d.label = e.label;
                next.push_back(d);
            }
        if (solved) {
            resolve_level(ctx, out, next, leads, s.order + level);
        } else {
            next.erase(std::remove_if(next.begin(), next.end(), [](const Equation& d) { return d.residual.is_zero(); }),
                       next.end());
        }
        for (const auto& d : next) out.equations.push_back(d);
        frontier = std::move(next);
    }
    out.order = s.order + r;
    return out;
}

SymbolSystem symbol_of(const Context& ctx, const SolvedSystem& s) {
    SymbolSystem sym;
    sym.order = s.order;
    sym.columns = unknown_jets(ctx, s, s.order);
    sym.rows = jacobian(ctx, s, sym.columns);
    sym.rows.erase(std::remove_if(sym.rows.begin(), sym.rows.end(),
                                  [](const std::vector<RationalExpr>& row) {
                                      return std::all_of(row.begin(), row.end(),
                                                         [](const RationalExpr& e) { return e.is_zero(); });
                                  }),
                   sym.rows.end());
    return sym;
}

namespace {

Matrix select_columns(const Matrix& m, const std::vector<std::size_t>& idx) {
    Matrix out;
    for (const auto& row : m) {
        std::vector<RationalExpr> r;
        for (std::size_t j : idx) r.push_back(row[j]);
        out.push_back(std::move(r));
    }
    return out;
}

RankReport rank_of(const Context& ctx, const Matrix& m) {
    if (m.empty() || m[0].empty()) return {0, true};
    return generic_rank(ctx, m);
}

}  // namespace

CharacterVector characters(const Context& ctx, const SolvedSystem& s) {
    SymbolSystem sym = symbol_of(ctx, s);
    int n = static_cast<int>(ctx.n());
    CharacterVector cv;
    cv.alpha.assign(n, 0);
    cv.beta.assign(n, 0);
    std::vector<int> count(n + 1, 0), cls(sym.columns.size());
    for (std::size_t j = 0; j < sym.columns.size(); ++j) {
        cls[j] = jet_class(ctx, s.ordering, sym.columns[j]);
        ++count[cls[j]];
    }
    int above = 0;  // rank of the columns of class > c
    for (int c = n; c >= 1; --c) {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < cls.size(); ++j)
            if (cls[j] >= c) idx.push_back(j);
        RankReport rk = rank_of(ctx, select_columns(sym.rows, idx));
        cv.exact = cv.exact && rk.exact;
        cv.beta[c - 1] = rk.rank - above;
        cv.alpha[c - 1] = count[c] - cv.beta[c - 1];
        above = rk.rank;
    }
    return cv;
}

std::string to_string(const std::vector<int>& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

Dimension fiber_dimension(const Context& ctx, const SolvedSystem& s) {
    auto cols = unknown_jets_up_to(ctx, s, s.order);
    RankReport rk = rank_of(ctx, jacobian(ctx, s, cols));
    return {static_cast<int>(cols.size()) - rk.rank, rk.exact};
}

Dimension symbol_dimension(const Context& ctx, const SolvedSystem& s) {
    SymbolSystem sym = symbol_of(ctx, s);
    RankReport rk = rank_of(ctx, sym.rows);
    return {static_cast<int>(sym.columns.size()) - rk.rank, rk.exact};
}

Dimension integrability_conditions(const Context& ctx, const SolvedSystem& s) {
    SolvedSystem p = prolong_system(ctx, s, 1);
    Dimension a = fiber_dimension(ctx, s), b = fiber_dimension(ctx, p), g = symbol_dimension(ctx, p);
    return {a.value - (b.value - g.value), a.exact && b.exact && g.exact};
}

Dimension compatibility_count(const Context& ctx, const SolvedSystem& s) {
    std::vector<Equation> rows;
    for (const auto& e : s.equations)
        for (std::size_t i = 0; i < ctx.n(); ++i) {
            Equation d;
            d.residual = reduce(ctx, total_derivative(ctx, e.residual, i));
            rows.push_back(d);
        }
    auto cols = unknown_jets(ctx, s, s.order + 1);
    RankReport rk = rank_of(ctx, jacobian_rows(ctx, rows, s.leading_bindings(), cols));
    return {static_cast<int>(rows.size()) - rk.rank, rk.exact};
}

CheckReport cartan_test(const Context& ctx, const SolvedSystem& s) {
    CheckReport rep;
    CharacterVector cv = characters(ctx, s);
    int bound = 0;
    for (std::size_t c = 0; c < cv.alpha.size(); ++c) bound += static_cast<int>(c + 1) * cv.alpha[c];
    Dimension next = symbol_dimension(ctx, prolong_system(ctx, s, 1));
    rep.ok = next.value == bound;
    rep.numbers["characters"] = cv.alpha;
    rep.numbers["bound"] = bound;
    rep.numbers["dim_symbol_next"] = next.value;
    rep.numbers["involutive"] = rep.ok;
    rep.numbers["exact"] = cv.exact && next.exact;
    rep.notes.push_back("coordinates assumed delta-regular for the declared ordering");
    if (!rep.ok)
        rep.witness = "dim g_{q+1} = " + std::to_string(next.value) + " != " + std::to_string(bound);
    return rep;
}

std::string JanetBoard::render() const {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ' ';
            out += static_cast<int>(c) < row.cls ? columns[c] : std::string("•");
        }
        out += '\n';
    }
    return out;
}

JanetBoard janet_board(const Context& ctx, const SolvedSystem& s) {
    JanetBoard board;
    for (std::size_t i : s.ordering) board.columns.push_back(ctx.independents()[i]);
    SymbolSystem sym = symbol_of(ctx, s);
    std::vector<std::size_t> order(sym.columns.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return jet_class(ctx, s.ordering, sym.columns[a]) > jet_class(ctx, s.ordering, sym.columns[b]);
    });
    std::mt19937_64 rng(mixed_seed(1));
    auto piv = pivot_columns_mod_p(ctx, select_columns(sym.rows, order), rng);
    for (std::size_t p : piv) {
        Var v = sym.columns[order[p]];
        board.rows.push_back({jet_class(ctx, s.ordering, v), ctx.id(v).index});
    }
    std::stable_sort(board.rows.begin(), board.rows.end(), [](const JanetRow& a, const JanetRow& b) {
        return a.cls != b.cls ? a.cls > b.cls : a.dependent < b.dependent;
    });
    return board;
}

CheckReport phs_check(const Context& cx, const SolvedSystem& a, const Context& cy, const SolvedSystem& r) {
    CheckReport rep;
    Dimension da = fiber_dimension(cx, a), dr = fiber_dimension(cy, r);
    rep.ok = da.value == dr.value;
    rep.numbers["dim_X"] = da.value;
    rep.numbers["dim_Y"] = dr.value;
    rep.numbers["exact"] = da.exact && dr.exact;
    if (!rep.ok) rep.witness = std::to_string(da.value) + " != " + std::to_string(dr.value);
    return rep;
}

CheckReport automorphic_criterion(const Context& cx, const SolvedSystem& a, const Context& cy, const SolvedSystem& r) {
    CheckReport rep;
    CheckReport low = phs_check(cx, a, cy, r);
    CheckReport high = phs_check(cx, prolong_system(cx, a, 1), cy, prolong_system(cy, r, 1));
    CheckReport inv = cartan_test(cx, a);
    rep.ok = low.ok && high.ok;
    rep.numbers["order"] = a.order;
    rep.numbers["dim_X"] = low.numbers["dim_X"];
    rep.numbers["dim_Y"] = low.numbers["dim_Y"];
    rep.numbers["dim_X_next"] = high.numbers["dim_X"];
    rep.numbers["dim_Y_next"] = high.numbers["dim_Y"];
    rep.numbers["involutive"] = inv.ok;
    rep.numbers["exact"] = low.numbers["exact"].get<bool>() && high.numbers["exact"].get<bool>();
    if (!low.ok)
        rep.witness = "order " + std::to_string(a.order) + ": " + low.witness;
    else if (!high.ok)
        rep.witness = "order " + std::to_string(a.order + 1) + ": " + high.witness;
    return rep;
}

}  // namespace vessiot
