#include "vessiot/invariants.hpp"

#include <algorithm>
#include <set>

namespace vessiot {

std::vector<VectorField> GeneratorSet::at_order(const Context& ctx, int q) const {
    if (!prolong) return fields;
    std::vector<VectorField> out;
    for (const auto& f : fields) out.push_back(prolong_field(ctx, f, q, deps));
    return out;
}

std::string GeneratorSet::label(std::size_t i) const {
    return i < labels.size() ? labels[i] : "theta" + std::to_string(i + 1);
}

CheckReport is_invariant(const Context& ctx, const RationalExpr& phi, const GeneratorSet& g) {
    CheckReport r;
    r.ok = true;
    auto fields = g.effective(ctx);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        RationalExpr v = reduce(ctx, fields[i].apply(ctx, phi));
        if (!is_zero(ctx, v)) {
            r.ok = false;
            r.witness = to_string(ctx, v);
            r.notes.push_back("not killed by " + g.label(i));
            break;
        }
    }
    r.numbers["generators"] = fields.size();
    return r;
}

RankReport generic_rank(const Context& ctx, const std::vector<VectorField>& fields, const std::vector<Var>& coords,
                        std::uint64_t seed) {
    std::vector<Var> cols = coords;
    if (cols.empty()) {
        std::set<Var> s;
        for (const auto& f : fields)
            for (const auto& [v, e] : f.components()) s.insert(v);
        cols.assign(s.begin(), s.end());
    }
    if (cols.empty() || fields.empty()) return {0, true};
    Matrix m;
    for (const auto& f : fields) {
        std::vector<RationalExpr> row;
        for (Var v : cols) row.push_back(f.component(v));
        m.push_back(row);
    }
    return generic_rank(ctx, m, seed);
}

RankReport generic_rank(const Context& ctx, const std::vector<VectorField>& fields, std::uint64_t seed) {
    return generic_rank(ctx, fields, {}, seed);
}

InvariantCount invariant_count(const Context& ctx, const GeneratorSet& g, int q) {
    std::vector<int> deps = g.deps;
    if (deps.empty())
        for (std::size_t k = 0; k < ctx.dependents().size(); ++k) deps.push_back(static_cast<int>(k));
    std::vector<Var> coords;
    for (int k : deps)
        for (int r = 0; r <= q; ++r)
            for (Var v : ctx.jets_of_order(k, r)) coords.push_back(v);
    InvariantCount c;
    c.fiber = static_cast<int>(coords.size());
    auto rr = generic_rank(ctx, g.at_order(ctx, q), coords);
    c.rank = rr.rank;
    c.exact = rr.exact;
    c.count = c.fiber - c.rank;
    return c;
}

StructureResult structure_constants(const Context& ctx, const GeneratorSet& g) {
    auto fields = g.effective(ctx);
    std::size_t n = fields.size();
    StructureResult res;
    res.c.assign(n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n, Scalar(0))));
    std::set<Var> cs;
    for (const auto& f : fields)
        for (const auto& [v, e] : f.components()) cs.insert(v);
    std::mt19937_64 rng(mixed_seed(0x5eed));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            VectorField br = bracket(ctx, fields[a], fields[b]);
            std::set<Var> cols = cs;
            for (const auto& [v, e] : br.components()) cols.insert(v);
            // linear equations in the constants from evaluation at rational points
            std::vector<std::vector<Scalar>> A;
            std::vector<Scalar> rhs;
            for (int trial = 0; trial < 4; ++trial) {
                Point pt = random_rational_point(ctx, rng);
                for (Var v : cols) {
                    std::vector<Scalar> row;
                    Scalar value;
                    try {
                        for (const auto& f : fields) row.push_back(eval_point(f.component(v), pt));
                        value = eval_point(br.component(v), pt);
                    } catch (const DenominatorVanishes&) {
                        continue;
                    }
                    A.push_back(row);
                    rhs.push_back(value);
                }
            }
            auto sol = solve_rational(A, rhs);
            bool closed = sol.has_value();
            if (closed) {
                VectorField comb;
                for (std::size_t t = 0; t < n; ++t)
                    if (sgn((*sol)[t]) != 0) comb = comb + fields[t].scaled(RationalExpr((*sol)[t]));
                closed = comb.equals(ctx, br);
            }
            if (!closed) {
                res.closed = false;
                res.offending = "[" + g.label(a) + "," + g.label(b) + "]";
                return res;
            }
            for (std::size_t t = 0; t < n; ++t) {
                res.c[a][b][t] = (*sol)[t];
                res.c[b][a][t] = -(*sol)[t];
            }
        }
    res.closed = true;
    return res;
}

bool jacobi_condition(const StructureTable& c) {
    std::size_t n = c.size();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t v = 0; v < n; ++v)
                for (std::size_t t = 0; t < n; ++t) {
                    Scalar sum = 0;
                    for (std::size_t l = 0; l < n; ++l)
                        sum += c[r][s][l] * c[l][v][t] + c[s][v][l] * c[l][r][t] + c[v][r][l] * c[l][s][t];
                    if (sgn(sum) != 0) return false;
                }
    return true;
}

CheckReport commutant_check(const Context& ctx, const GeneratorSet& delta, const GeneratorSet& theta) {
    CheckReport r;
    r.ok = true;
    auto ds = delta.effective(ctx), ts = theta.effective(ctx);
    for (std::size_t i = 0; i < ds.size() && r.ok; ++i)
        for (std::size_t j = 0; j < ts.size() && r.ok; ++j) {
            VectorField b = bracket(ctx, ds[i], ts[j]);
            if (!b.equals(ctx, VectorField())) {
                r.ok = false;
                r.notes.push_back("[" + delta.label(i) + "," + theta.label(j) + "] != 0");
                r.witness = to_string(ctx, b.components().begin()->second);
            }
        }
    return r;
}

CheckReport constancy_check(const Context& ctx, const std::vector<RationalExpr>& targets,
                            const std::vector<std::pair<VectorField, VectorField>>& pairs, const Bindings& ident) {
    CheckReport r;
    r.ok = true;
    for (std::size_t p = 0; p < pairs.size() && r.ok; ++p) {
        VectorField f = pairs[p].first + pairs[p].second;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            RationalExpr v = reduce(ctx, substitute(f.apply(ctx, targets[t]), ident));
            if (!is_zero(ctx, v)) {
                r.ok = false;
                r.witness = to_string(ctx, v);
                r.notes.push_back("pair " + std::to_string(p + 1) + " does not kill target " + std::to_string(t + 1));
                break;
            }
        }
    }
    r.numbers["pairs"] = pairs.size();
    r.numbers["targets"] = targets.size();
    return r;
}

std::string to_string(Membership m) {
    switch (m) {
        case Membership::Stable: return "stable";
        case Membership::Outside: return "outside";
        case Membership::Undecided: return "undecided";
    }
    return "?";
}

namespace {

// integer weight vectors (over `vars`) under which every generator is invariant
std::vector<std::vector<Scalar>> torus_weights(const std::vector<RationalExpr>& gens, const std::vector<Var>& vars) {
    auto pos = [&](Var v) { return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin()); };
    std::vector<std::vector<Scalar>> rows;
    auto exps = [&](const Monomial& m) {
        std::vector<Scalar> e(vars.size(), Scalar(0));
        for (const auto& [v, k] : m.f) e[pos(v)] = k;
        return e;
    };
    for (const auto& g : gens) {
        std::vector<Monomial> ms;
        for (const auto& t : g.num().terms()) ms.push_back(t.m);
        for (const auto& t : g.den().terms()) ms.push_back(t.m);
        auto base = exps(ms[0]);
        // numerator and denominator must share one weight: differences against the first monomial
        for (std::size_t i = 1; i < ms.size(); ++i) {
            auto e = exps(ms[i]);
            for (std::size_t k = 0; k < e.size(); ++k) e[k] -= base[k];
            rows.push_back(e);
        }
    }
    // kernel of rows
    std::size_t n = vars.size();
    std::vector<int> pivots;
    std::size_t r = 0;
    for (std::size_t j = 0; j < n && r < rows.size(); ++j) {
        std::size_t p = r;
        while (p < rows.size() && sgn(rows[p][j]) == 0) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[p], rows[r]);
        Scalar inv = 1 / rows[r][j];
        for (auto& x : rows[r]) x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || sgn(rows[i][j]) == 0) continue;
            Scalar f = rows[i][j];
            for (std::size_t k = 0; k < n; ++k) rows[i][k] -= f * rows[r][k];
        }
        pivots.push_back(static_cast<int>(j));
        ++r;
    }
    std::vector<std::vector<Scalar>> basis;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::find(pivots.begin(), pivots.end(), static_cast<int>(j)) != pivots.end()) continue;
        std::vector<Scalar> w(n, Scalar(0));
        w[j] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) w[pivots[i]] = -rows[i][j];
        basis.push_back(w);
    }
    return basis;
}

bool weight_invariant(const RationalExpr& e, const std::vector<Scalar>& w, const std::vector<Var>& vars) {
    auto weight = [&](const Monomial& m) {
        Scalar s = 0;
        for (const auto& [v, k] : m.f) {
            auto it = std::lower_bound(vars.begin(), vars.end(), v);
            if (it != vars.end() && *it == v) s += w[it - vars.begin()] * k;
        }
        return s;
    };
    if (e.is_zero()) return true;
    Scalar w0 = weight(e.num().lead().m);
    for (const auto& t : e.num().terms())
        if (weight(t.m) != w0) return false;
    for (const auto& t : e.den().terms())
        if (weight(t.m) != w0) return false;
    return true;
}

}  // namespace

std::vector<WitnessEntry> noninvariance_witness(const Context& ctx, const std::vector<RationalExpr>& gens,
                                                const VectorField& delta) {
    std::vector<WitnessEntry> out;
    for (const auto& g : gens) {
        RationalExpr v = reduce(ctx, delta.apply(ctx, g));
        Membership m = Membership::Undecided;
        bool listed = false;
        for (const auto& h : gens)
            if (is_zero(ctx, v - h)) listed = true;
        if (is_zero(ctx, v) || listed || v.is_constant()) {
            m = Membership::Stable;
        } else {
            std::set<Var> vs;
            for (const auto& h : gens)
                for (Var x : h.variables()) vs.insert(x);
            for (Var x : v.variables()) vs.insert(x);
            std::vector<Var> vars(vs.begin(), vs.end());
            for (const auto& w : torus_weights(gens, vars))
                if (!weight_invariant(v, w, vars)) m = Membership::Outside;
        }
        out.push_back(WitnessEntry{v, m});
    }
    return out;
}

bool generically_free(const Context& ctx, const GeneratorSet& g, int q) {
    auto fields = g.at_order(ctx, q);
    if (fields.empty()) return false;
    return generic_rank(ctx, fields).rank == static_cast<int>(fields.size());
}

}  // namespace vessiot
