#include "vessiot/diffideal.hpp"

#include <algorithm>

namespace vessiot {

namespace {

void multi_indices(std::size_t n, int k, std::vector<int>& cur, std::size_t pos, std::vector<MultiIndex>& out) {
    if (pos + 1 == n) {
        cur[pos] = k;
        out.emplace_back(cur);
        return;
    }
    for (int a = k; a >= 0; --a) {
        cur[pos] = a;
        multi_indices(n, k - a, cur, pos + 1, out);
    }
}

std::vector<MultiIndex> indices_up_to(std::size_t n, int r) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(n, 0);
    for (int k = 0; k <= r; ++k) multi_indices(n, k, cur, 0, out);
    return out;
}

bool contains(const std::vector<RationalExpr>& v, const RationalExpr& e) {
    return std::find(v.begin(), v.end(), e) != v.end();
}

}  // namespace

DiffPolySet prolong_gens(const DiffPolySet& s, int r) {
    const Context& ctx = *s.ctx;
    DiffPolySet out{s.ctx, {}};
    for (const auto& nu : indices_up_to(ctx.n(), r))
        for (const auto& a : s.generators) {
            RationalExpr e = reduce(ctx, total_derivative(ctx, a, nu));
            if (!e.is_zero() && !contains(out.generators, e)) out.generators.push_back(e);
        }
    return out;
}

bool same_generators(const DiffPolySet& a, const DiffPolySet& b) {
    for (const auto& e : a.generators)
        if (!contains(b.generators, e)) return false;
    for (const auto& e : b.generators)
        if (!contains(a.generators, e)) return false;
    return true;
}

CheckReport syzygy_check(const Context& ctx, const RationalExpr& combination) {
    CheckReport rep;
    RationalExpr e = reduce(ctx, combination);
    rep.ok = e.is_zero();
    if (!rep.ok) rep.witness = to_string(ctx, e);
    return rep;
}

RadicalCertificate radical_power_membership(const Context& ctx, const RationalExpr& a, std::size_t i, int r) {
    if (r < 1) throw Error("InvalidArgument", "r must be positive");
    if (r > 4) throw CertificateSearchExceeded("radical certificates are built for r <= 4");
    RationalExpr da = reduce(ctx, total_derivative(ctx, a, i));
    RationalExpr d2a = reduce(ctx, total_derivative(ctx, da, i));
    // u_k = a^{r-k} (da)^{2k-1} = sum_j c[j] d^j(a^r); u_{k+1} = (da d(u_k) - (2k-1) d^2a u_k) / (r-k)
    std::vector<RationalExpr> c{RationalExpr(0), RationalExpr(Scalar(1, r))};
    for (int k = 1; k < r; ++k) {
        std::vector<RationalExpr> next(c.size() + 1);
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j] += reduce(ctx, total_derivative(ctx, c[j], i)) * da - RationalExpr(2 * k - 1) * d2a * c[j];
            next[j + 1] += c[j] * da;
        }
        for (auto& e : next) e = reduce(ctx, e / RationalExpr(r - k));
        c = std::move(next);
    }
    RadicalCertificate cert;
    cert.target = reduce(ctx, da.pow(2 * r - 1));
    cert.coefficients = c;
    RationalExpr ar = a.pow(r), dj = ar, sum;
    std::string text;
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j > 0) dj = reduce(ctx, total_derivative(ctx, dj, i));
        if (c[j].is_zero()) continue;
        sum += c[j] * dj;
        if (!text.empty()) text += " + ";
        text += "(" + to_string(ctx, c[j]) + ")*d^" + std::to_string(j) + "(a^" + std::to_string(r) + ")";
    }
    RationalExpr diff = reduce(ctx, sum - cert.target);
    cert.report.ok = diff.is_zero();
    if (!cert.report.ok) cert.report.witness = to_string(ctx, diff);
    cert.report.numbers["r"] = r;
    cert.report.numbers["terms"] = std::count_if(c.begin(), c.end(), [](const auto& e) { return !e.is_zero(); });
    cert.report.notes.push_back(text);
    return cert;
}

CheckReport residue_ring_check(const DiffPolySet& s, int r, const std::vector<Var>& principal) {
    const Context& ctx = *s.ctx;
    DiffPolySet p = prolong_gens(s, r);
    auto is_principal = [&](Var v) { return std::find(principal.begin(), principal.end(), v) != principal.end(); };
    Bindings bind;
    std::vector<bool> done(p.generators.size(), false);
    int redundant = 0;
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t g = 0; g < p.generators.size(); ++g) {
            if (done[g]) continue;
            RationalExpr e = reduce(ctx, substitute(p.generators[g], bind));
            if (e.is_zero()) {
                done[g] = true;
                ++redundant;
                progress = true;
                continue;
            }
            if (!e.is_polynomial()) continue;
            std::optional<Var> lead;
            for (Var v : e.num().variables()) {
                if (!is_principal(v) || e.num().degree_in(v) != 1) continue;
                auto co = e.num().coefficients_in(v);
                if (!co[1].is_constant()) continue;
                if (!lead || ctx.jet_order(v) > ctx.jet_order(*lead)) lead = v;
            }
            if (!lead) continue;
            auto co = e.num().coefficients_in(*lead);
            RationalExpr rhs = reduce(ctx, -RationalExpr(co[0]) / RationalExpr(co[1]));
            Bindings one{{*lead, rhs}};
            for (auto& [v, val] : bind) val = reduce(ctx, substitute(val, one));
            bind[*lead] = rhs;
            done[g] = true;
            progress = true;
        }
    }
    CheckReport rep;
    int unsolved = static_cast<int>(std::count(done.begin(), done.end(), false));
    rep.numbers["generators"] = p.generators.size();
    rep.numbers["principal"] = principal.size();
    rep.numbers["solved"] = bind.size();
    rep.numbers["redundant"] = redundant;
    rep.numbers["unsolved"] = unsolved;
    rep.ok = unsolved == 0 && bind.size() == principal.size();
    for (Var v : principal)
        if (!bind.count(v)) {
            rep.ok = false;
            if (rep.witness.empty()) rep.witness = "no equation for " + ctx.name(v);
        }
    for (const auto& [v, val] : bind)
        for (Var w : val.variables())
            if (is_principal(w)) rep.ok = false;
    return rep;
}

}  // namespace vessiot
