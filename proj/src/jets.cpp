#include "vessiot/jets.hpp"

#include <algorithm>
#include <unordered_map>

namespace vessiot {

Polynomial total_derivative(const Context& ctx, const Polynomial& p, std::size_t i) {
    std::unordered_map<Var, Polynomial> store;
    Var xi = ctx.independent(i);
    auto dv = [&](Var w) -> const Polynomial* {
        switch (ctx.kind(w)) {
            case VarKind::Independent:
                if (w != xi) return nullptr;
                return &(store[w] = Polynomial(Scalar(1)));
            case VarKind::Parameter: return nullptr;
            case VarKind::Special: {
                std::size_t si = ctx.id(w).index;
                if (ctx.specials()[si].base != static_cast<int>(i)) return nullptr;
                return &*ctx.special_derivative(si);
            }
            case VarKind::Jet: {
                auto b = ctx.bump(w, i);
                if (!b) return nullptr;
                return &(store[w] = Polynomial::variable(*b));
            }
        }
        return nullptr;
    };
    return apply_derivation(p, dv);
}

RationalExpr total_derivative(const Context& ctx, const RationalExpr& e, std::size_t i) {
    if (i >= ctx.n()) throw UnknownVariable("independent index out of range");
    Polynomial dn = total_derivative(ctx, e.num(), i);
    if (e.den().is_constant()) return RationalExpr(dn);
    Polynomial dd = total_derivative(ctx, e.den(), i);
    if (dd.is_zero()) return RationalExpr::make(dn, e.den());
    return RationalExpr::make(dn * e.den() - e.num() * dd, e.den() * e.den());
}

RationalExpr total_derivative(const Context& ctx, const RationalExpr& e, const MultiIndex& mu) {
    RationalExpr r = e;
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (int k = 0; k < mu.e[i]; ++k) r = total_derivative(ctx, r, i);
    return r;
}

RationalExpr coordinate_derivative(const Context& ctx, const RationalExpr& e, Var v, DerivMode mode) {
    if (mode == DerivMode::Total && ctx.kind(v) == VarKind::Independent) return total_derivative(ctx, e, v);
    return partial(ctx, e, v);
}

// ---------------------------------------------------------------- vector fields

VectorField::VectorField(std::map<Var, RationalExpr> c) {
    for (auto& [v, e] : c)
        if (!e.is_zero()) c_.emplace(v, std::move(e));
}

RationalExpr VectorField::component(Var v) const {
    auto it = c_.find(v);
    return it == c_.end() ? RationalExpr() : it->second;
}

void VectorField::set(Var v, const RationalExpr& e) {
    if (e.is_zero()) c_.erase(v);
    else c_[v] = e;
}

bool VectorField::equals(const Context& ctx, const VectorField& o) const {
    VectorField d = *this - o;
    for (const auto& [v, e] : d.c_)
        if (!vessiot::is_zero(ctx, e)) return false;
    return true;
}

RationalExpr VectorField::apply(const Context& ctx, const RationalExpr& e, DerivMode mode) const {
    RationalExpr r;
    auto vars = e.variables();
    for (const auto& [v, c] : c_) {
        bool relevant = std::binary_search(vars.begin(), vars.end(), v);
        if (!relevant && ctx.kind(v) == VarKind::Independent) {
            // specials based on v and, in total mode, jets depend on v
            for (Var w : vars) {
                VarKind k = ctx.kind(w);
                if (k == VarKind::Special && ctx.specials()[ctx.id(w).index].base == static_cast<int>(v)) relevant = true;
                if (mode == DerivMode::Total && k == VarKind::Jet && ctx.in_base(ctx.id(w).index, static_cast<int>(v)))
                    relevant = true;
            }
        }
        if (!relevant) continue;
        r += c * coordinate_derivative(ctx, e, v, mode);
    }
    return r;
}

VectorField VectorField::operator+(const VectorField& o) const {
    VectorField r = *this;
    for (const auto& [v, e] : o.c_) r.set(v, r.component(v) + e);
    return r;
}

VectorField VectorField::operator-(const VectorField& o) const {
    VectorField r = *this;
    for (const auto& [v, e] : o.c_) r.set(v, r.component(v) - e);
    return r;
}

VectorField VectorField::scaled(const RationalExpr& s) const {
    VectorField r;
    for (const auto& [v, e] : c_) r.set(v, e * s);
    return r;
}

VectorField bracket(const Context& ctx, const VectorField& a, const VectorField& b, DerivMode mode) {
    std::map<Var, RationalExpr> out;
    std::vector<Var> keys;
    for (const auto& [v, e] : a.components()) keys.push_back(v);
    for (const auto& [v, e] : b.components()) keys.push_back(v);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (Var v : keys) {
        RationalExpr c = a.apply(ctx, b.component(v), mode) - b.apply(ctx, a.component(v), mode);
        c = reduce(ctx, c);
        if (!c.is_zero()) out[v] = c;
    }
    return VectorField(std::move(out));
}

VectorField prolong_field(const Context& ctx, const VectorField& theta, int q, const std::vector<int>& deps) {
    if (q > ctx.max_order())
        throw OrderOverflow("prolongation order " + std::to_string(q) + " exceeds max_order");
    for (const auto& [v, e] : theta.components())
        if (ctx.is_jet(v) && ctx.jet_order(v) > 0)
            throw Error("ContextMismatch", "field to prolong has components on derivative jets");
    std::vector<int> ks = deps;
    if (ks.empty())
        for (std::size_t k = 0; k < ctx.dependents().size(); ++k) ks.push_back(static_cast<int>(k));
    std::size_t n = ctx.n();
    std::vector<RationalExpr> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = theta.component(ctx.independent(i));
    // d_j xi^i cached per j
    std::vector<std::vector<RationalExpr>> dxi;
    if (q > 0) {
        dxi.assign(n, std::vector<RationalExpr>(n));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                if (!xi[i].is_zero()) dxi[j][i] = total_derivative(ctx, xi[i], j);
    }
    VectorField out = theta;
    for (int k : ks) {
        std::map<std::vector<int>, RationalExpr> eta;
        MultiIndex zero(n);
        eta[zero.e] = theta.component(ctx.jet_or_throw(k, zero));
        for (int r = 1; r <= q; ++r) {
            for (const auto& mu : ctx.multi_indices(k, r)) {
                std::size_t j = 0;
                while (mu.e[j] == 0) ++j;
                MultiIndex nu = mu.bumped(j, -1);
                RationalExpr c = total_derivative(ctx, eta.at(nu.e), j);
                for (std::size_t i = 0; i < n; ++i) {
                    if (xi[i].is_zero() || dxi[j][i].is_zero() || !ctx.in_base(k, static_cast<int>(i))) continue;
                    c -= RationalExpr::variable(ctx.jet_or_throw(k, nu.bumped(i))) * dxi[j][i];
                }
                c = reduce(ctx, c);
                eta[mu.e] = c;
                out.set(ctx.jet_or_throw(k, mu), c);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- sections

const RationalExpr& JetSection::at(int k, const MultiIndex& mu) const {
    auto it = values.find({k, mu.e});
    if (it == values.end()) throw Error("IncompleteSection", "section slot missing");
    return it->second;
}

JetSection holonomic_section(const Context& ctx, const std::vector<RationalExpr>& f, int q) {
    JetSection s;
    s.order = q;
    for (std::size_t k = 0; k < f.size(); ++k) {
        MultiIndex zero(ctx.n());
        s.values[{static_cast<int>(k), zero.e}] = f[k];
        for (int r = 1; r <= q; ++r) {
            for (const auto& mu : ctx.multi_indices(static_cast<int>(k), r)) {
                std::size_t j = 0;
                while (mu.e[j] == 0) ++j;
                MultiIndex nu = mu.bumped(j, -1);
                s.values[{static_cast<int>(k), mu.e}] =
                    reduce(ctx, partial(ctx, s.at(static_cast<int>(k), nu), ctx.independent(j)));
            }
        }
    }
    return s;
}

std::vector<SpencerComponent> spencer(const Context& ctx, const JetSection& f) {
    std::vector<SpencerComponent> out;
    std::vector<int> ks;
    for (const auto& [key, v] : f.values)
        if (ks.empty() || ks.back() != key.first) ks.push_back(key.first);
    for (int k : ks) {
        for (int r = 0; r < f.order; ++r) {
            for (const auto& mu : ctx.multi_indices(k, r)) {
                for (std::size_t i = 0; i < ctx.n(); ++i) {
                    if (!ctx.in_base(k, static_cast<int>(i))) continue;
                    RationalExpr c = partial(ctx, f.at(k, mu), ctx.independent(i)) - f.at(k, mu.bumped(i));
                    out.push_back(SpencerComponent{k, mu, i, reduce(ctx, c)});
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- forms

namespace {

// sort positions, returning sign of the permutation or 0 on repetition
int sort_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i)
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    return sign;
}

}  // namespace

DiffForm DiffForm::scalar(std::vector<Var> coords, const RationalExpr& f) {
    DiffForm r(std::move(coords), 0);
    r.add_term({}, f);
    return r;
}

DiffForm DiffForm::one_form(std::vector<Var> coords, const std::map<Var, RationalExpr>& c) {
    DiffForm r(coords, 1);
    for (const auto& [v, e] : c) {
        auto it = std::find(coords.begin(), coords.end(), v);
        if (it == coords.end()) throw Error("ContextMismatch", "form coefficient on a non-coordinate");
        r.add_term({static_cast<int>(it - coords.begin())}, e);
    }
    return r;
}

DiffForm DiffForm::differential(const Context& ctx, std::vector<Var> coords, const RationalExpr& f, DerivMode mode) {
    return exterior_derivative(ctx, scalar(std::move(coords), f), mode);
}

void DiffForm::add_term(std::vector<int> idx, const RationalExpr& c) {
    if (static_cast<int>(idx.size()) != grade_) throw Error("GradeMismatch", "term of wrong grade");
    int s = sort_sign(idx);
    if (s == 0 || c.is_zero()) return;
    auto it = terms_.find(idx);
    RationalExpr v = s > 0 ? c : -c;
    if (it == terms_.end()) {
        terms_.emplace(std::move(idx), v);
    } else {
        it->second += v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

RationalExpr DiffForm::coefficient(const std::vector<Var>& vars) const {
    std::vector<int> idx;
    for (Var v : vars) {
        auto it = std::find(coords_.begin(), coords_.end(), v);
        if (it == coords_.end()) return RationalExpr();
        idx.push_back(static_cast<int>(it - coords_.begin()));
    }
    int s = sort_sign(idx);
    if (s == 0) return RationalExpr();
    auto it = terms_.find(idx);
    if (it == terms_.end()) return RationalExpr();
    return s > 0 ? it->second : -it->second;
}

bool DiffForm::is_zero(const Context& ctx) const {
    for (const auto& [k, c] : terms_)
        if (!vessiot::is_zero(ctx, c)) return false;
    return true;
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    if (terms_.empty() && coords_.empty()) return o;
    if (o.grade_ != grade_ || o.coords_ != coords_) throw Error("GradeMismatch", "adding incompatible forms");
    DiffForm r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + o.scaled(RationalExpr(-1)); }

DiffForm DiffForm::scaled(const RationalExpr& s) const {
    DiffForm r(coords_, grade_);
    for (const auto& [k, c] : terms_) r.add_term(k, c * s);
    return r;
}

DiffForm exterior_derivative(const Context& ctx, const DiffForm& f, DerivMode mode) {
    DiffForm r(f.coords(), f.grade() + 1);
    for (const auto& [idx, c] : f.terms()) {
        for (std::size_t j = 0; j < f.coords().size(); ++j) {
            if (std::find(idx.begin(), idx.end(), static_cast<int>(j)) != idx.end()) continue;
            RationalExpr dc = reduce(ctx, coordinate_derivative(ctx, c, f.coords()[j], mode));
            if (dc.is_zero()) continue;
            std::vector<int> k{static_cast<int>(j)};
            k.insert(k.end(), idx.begin(), idx.end());
            r.add_term(k, dc);
        }
    }
    return r;
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    if (a.coords() != b.coords()) throw Error("GradeMismatch", "wedge of forms over different coordinates");
    DiffForm r(a.coords(), a.grade() + b.grade());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            std::vector<int> k = ia;
            k.insert(k.end(), ib.begin(), ib.end());
            r.add_term(k, ca * cb);
        }
    return r;
}

DiffForm interior(const Context& ctx, const VectorField& theta, const DiffForm& f) {
    (void)ctx;
    if (f.grade() == 0) return DiffForm(f.coords(), 0);
    DiffForm r(f.coords(), f.grade() - 1);
    for (const auto& [idx, c] : f.terms()) {
        for (std::size_t p = 0; p < idx.size(); ++p) {
            RationalExpr t = theta.component(f.coords()[idx[p]]);
            if (t.is_zero()) continue;
            std::vector<int> rest = idx;
            rest.erase(rest.begin() + static_cast<long>(p));
            r.add_term(rest, (p % 2 == 0) ? c * t : -(c * t));
        }
    }
    return r;
}

DiffForm lie_derivative_form(const Context& ctx, const VectorField& theta, const DiffForm& f, DerivMode mode) {
    DiffForm a = interior(ctx, theta, exterior_derivative(ctx, f, mode));
    if (f.grade() == 0) return a;
    return a + exterior_derivative(ctx, interior(ctx, theta, f), mode);
}

}  // namespace vessiot
